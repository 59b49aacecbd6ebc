#pragma once

// Check results and deterministic report serialization. Reports must be
// byte-identical across runs with the same configuration and seed, so all
// floats go through shortest round-trip formatting and check rows are
// ordered by name.

#include <algorithm>
#include <charconv>
#include <string>
#include <vector>

#include <json.hpp>

namespace wicklab {

struct CheckResult {
  std::string name;
  bool passed = false;
  double max_residual = 0.0;
  long samples = 0;
};

inline std::string fmt_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

inline nlohmann::ordered_json report_json(std::vector<CheckResult> checks,
                                          std::uint64_t seed, long samples, bool quick) {
  std::sort(checks.begin(), checks.end(),
            [](const CheckResult& a, const CheckResult& b) { return a.name < b.name; });
  nlohmann::ordered_json out;
  out["seed"] = seed;
  out["samples"] = samples;
  out["quick"] = quick;
  out["passed"] = std::all_of(checks.begin(), checks.end(),
                              [](const CheckResult& c) { return c.passed; });
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const CheckResult& c : checks) {
    nlohmann::ordered_json row;
    row["check"] = c.name;
    row["status"] = c.passed ? "pass" : "fail";
    row["max_residual"] = fmt_double(c.max_residual);
    row["samples"] = c.samples;
    rows.push_back(std::move(row));
  }
  out["checks"] = std::move(rows);
  return out;
}

}  // namespace wicklab
