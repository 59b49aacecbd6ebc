#pragma once

// JSON file formats: field configurations and model files.
//   field: {"dim", "side_length", "level", "values"} with values in
//          row-major coordinate order and rationals as "num/den" strings
//   model: {"noise", "dim", "level", "subgrid", "alpha2": dense matrix,
//           "alpha4": sparse COO list [[i,j,k,l,value], ...]}

#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "wicklab/lattice.hpp"
#include "wicklab/wick.hpp"

namespace wicklab {

inline nlohmann::ordered_json field_to_json(const Field<double>& f) {
  nlohmann::ordered_json out;
  out["dim"] = f.partition.domain.dim;
  out["side_length"] = rat_str(f.partition.domain.side);
  out["level"] = f.partition.level;
  out["values"] = f.values;
  return out;
}

inline Field<double> field_from_json(const nlohmann::json& j) {
  Domain dom{j.at("dim").get<int>(), parse_rat(j.at("side_length").get<std::string>())};
  Partition p = make_partition(dom, j.at("level").get<int>());
  Field<double> f = make_field<double>(p, 0.0);
  const auto& vals = j.at("values");
  if (static_cast<std::int64_t>(vals.size()) != p.cell_count())
    throw std::invalid_argument("field_from_json: value count does not match the partition");
  for (std::size_t i = 0; i < vals.size(); ++i) f.values[i] = vals[i].get<double>();
  return f;
}

// Rational-valued variant: values carried as "num/den" strings.
inline nlohmann::ordered_json field_to_json(const Field<Rat>& f) {
  nlohmann::ordered_json out;
  out["dim"] = f.partition.domain.dim;
  out["side_length"] = rat_str(f.partition.domain.side);
  out["level"] = f.partition.level;
  nlohmann::ordered_json vals = nlohmann::ordered_json::array();
  for (const Rat& v : f.values) vals.push_back(rat_str(v));
  out["values"] = std::move(vals);
  return out;
}

inline Field<Rat> rat_field_from_json(const nlohmann::json& j) {
  Domain dom{j.at("dim").get<int>(), parse_rat(j.at("side_length").get<std::string>())};
  Partition p = make_partition(dom, j.at("level").get<int>());
  Field<Rat> f = make_field<Rat>(p, Rat(0));
  const auto& vals = j.at("values");
  if (static_cast<std::int64_t>(vals.size()) != p.cell_count())
    throw std::invalid_argument("rat_field_from_json: value count does not match the partition");
  for (std::size_t i = 0; i < vals.size(); ++i)
    f.values[i] = parse_rat(vals[i].get<std::string>());
  return f;
}

inline nlohmann::ordered_json model_to_json(const ModelSpec& m) {
  const Partition& p = m.base();
  const std::int64_t c = p.cell_count();
  nlohmann::ordered_json out;
  out["noise"] = noise_name(m.kind);
  out["dim"] = p.domain.dim;
  out["level"] = p.level;
  out["subgrid"] = m.subgrid;
  nlohmann::ordered_json a2 = nlohmann::ordered_json::array();
  for (std::int64_t i = 0; i < c; ++i) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (std::int64_t j = 0; j < c; ++j)
      row.push_back(m.alpha2.entries[static_cast<std::size_t>(i * c + j)]);
    a2.push_back(std::move(row));
  }
  out["alpha2"] = std::move(a2);
  nlohmann::ordered_json a4 = nlohmann::ordered_json::array();
  if (m.has_quartic()) {
    const auto& k4 = m.alpha4.entries;
    for (std::size_t flat = 0; flat < k4.size(); ++flat) {
      if (k4[flat] == 0.0) continue;
      std::size_t rem = flat;
      long idx[4];
      for (int t = 3; t >= 0; --t) {
        idx[t] = static_cast<long>(rem % static_cast<std::size_t>(c));
        rem /= static_cast<std::size_t>(c);
      }
      a4.push_back({idx[0], idx[1], idx[2], idx[3], k4[flat]});
    }
  }
  out["alpha4"] = std::move(a4);
  return out;
}

inline ModelSpec model_from_json(const nlohmann::json& j) {
  Domain dom{j.at("dim").get<int>(), Rat(1)};
  Partition p = make_partition(dom, j.at("level").get<int>());
  const std::int64_t c = p.cell_count();
  ModelSpec m{noise_from_name(j.at("noise").get<std::string>()), KernelFamily::zero(2, p),
              KernelFamily{4, p, {}}, j.at("subgrid").get<int>()};
  const auto& a2 = j.at("alpha2");
  if (static_cast<std::int64_t>(a2.size()) != c)
    throw std::invalid_argument("model_from_json: alpha2 shape mismatch");
  for (std::int64_t i = 0; i < c; ++i)
    for (std::int64_t k = 0; k < c; ++k)
      m.alpha2.entries[static_cast<std::size_t>(i * c + k)] =
          a2[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)].get<double>();
  const auto& a4 = j.at("alpha4");
  if (!a4.empty()) {
    m.alpha4 = KernelFamily::zero(4, p);
    for (const auto& row : a4) {
      if (row.size() != 5) throw std::invalid_argument("model_from_json: bad alpha4 entry");
      std::array<long, 4> idx{row[0].get<long>(), row[1].get<long>(), row[2].get<long>(),
                              row[3].get<long>()};
      for (long x : idx)
        if (x < 0 || x >= c) throw std::invalid_argument("model_from_json: alpha4 index range");
      m.alpha4.at(std::span<const long>(idx)) = row[4].get<double>();
    }
  }
  return m;
}

inline void write_json_file(const std::string& path, const nlohmann::ordered_json& j) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open output file '" + path + "'");
  out << j.dump(2) << "\n";
}

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open input file '" + path + "'");
  return nlohmann::json::parse(in);
}

}  // namespace wicklab
