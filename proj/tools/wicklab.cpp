// wicklab command-line front end.
//
// Exit codes: 0 all requested checks pass, 1 a check failed (report still
// written), 2 usage error.

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wicklab/checks.hpp"
#include "wicklab/condexp.hpp"
#include "wicklab/io.hpp"
#include "wicklab/qft.hpp"
#include "wicklab/report.hpp"
#include "wicklab/rmatrix.hpp"
#include "wicklab/wick.hpp"

namespace {

using namespace wicklab;

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

std::vector<long> parse_longs(const std::string& s) {
  std::vector<long> out;
  for (const std::string& item : split_list(s)) out.push_back(std::stol(item));
  return out;
}

std::vector<Rat> parse_rats(const std::string& s) {
  std::vector<Rat> out;
  for (const std::string& item : split_list(s)) out.push_back(parse_rat(item));
  return out;
}

std::string poly_str(const Poly1<Rat>& p) {
  if (p.is_zero()) return "0";
  std::string out;
  for (int d = p.degree(); d >= 0; --d) {
    if (p.coeff(d) == 0) continue;
    if (!out.empty()) out += " + ";
    out += rat_str(p.coeff(d));
    if (d > 0) out += "*x^" + std::to_string(d);
  }
  return out;
}

// --- subcommand handlers ----------------------------------------------------

int cmd_noise_sample(const std::string& noise, int dim, int level, std::uint64_t seed,
                     const std::string& out_path) {
  Partition p = make_partition({dim, Rat(1)}, level);
  Field<double> f = sample_field(p, noise_from_name(noise), seed);
  nlohmann::ordered_json j = field_to_json(f);
  if (out_path.empty())
    std::cout << j.dump(2) << "\n";
  else
    write_json_file(out_path, j);
  return 0;
}

int cmd_condexp_verify(const std::string& noise, const std::string& exponents,
                       const std::string& volumes, const std::string& parent) {
  MonomialSpec spec{parse_longs(exponents), parse_rats(volumes), parse_rat(parent)};
  NoiseKind kind = noise_from_name(noise);
  Poly1<Rat> closed = cond_exp_closed(kind, spec);
  Poly1<Rat> oracle = cond_exp_oracle(kind, spec);
  std::cout << "closed: " << poly_str(closed) << "\n";
  std::cout << "oracle: " << poly_str(oracle) << "\n";
  std::cout << "difference: " << poly_str(closed - oracle) << "\n";
  return closed == oracle ? 0 : 1;
}

int cmd_condexp_mc(const std::string& noise, long k, long children, const std::string& parent,
                   std::uint64_t seed, long samples) {
  NoiseKind kind = noise_from_name(noise);
  Rat p = parse_rat(parent);
  Rat q = Rat(p / Rat(children));
  Poly1<double> fine = map_coeffs<double>(renormalized_power(kind, k, q), to_double);
  Poly1<double> coarse = map_coeffs<double>(wick_power(kind, k, p), to_double);
  MartingaleMcResult res = martingale_mc(kind, p, children, fine, coarse, seed, samples);
  std::cout << "key,count,mean_diff,se,z,used\n";
  for (const MartingaleBin& b : res.bins)
    std::cout << b.key << "," << b.count << "," << fmt_double(b.mean) << ","
              << fmt_double(b.se) << "," << fmt_double(b.z) << "," << (b.used ? 1 : 0) << "\n";
  std::cout << "# max_abs_z=" << fmt_double(res.max_abs_z) << " used_bins=" << res.used_bins
            << " flagged_bins=" << res.flagged_bins << "\n";
  return res.max_abs_z <= 4.0 ? 0 : 1;
}

int cmd_combinat_stirling(int kind, long k, long l) {
  Int v = kind == 1 ? stirling1_signed(k, l) : stirling2(k, l);
  std::cout << v.get_str() << "\n";
  return 0;
}

int cmd_combinat_hermite(long n, const std::string& var) {
  Poly1<Rat> h = hermite_var(n, parse_rat(var));
  nlohmann::ordered_json coeffs = nlohmann::ordered_json::array();
  for (int d = 0; d <= h.degree(); ++d) coeffs.push_back(rat_str(h.coeff(d)));
  nlohmann::ordered_json out;
  out["n"] = n;
  out["var"] = var;
  out["coefficients_ascending"] = std::move(coeffs);
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_rmatrix_show(const std::string& noise, long k, const std::string& lambda,
                     const std::string& mu) {
  NoiseKind kind = noise_from_name(noise);
  Rat lam = parse_rat(lambda);
  GaussRatMatrix r =
      mu.empty() ? r_matrix(kind, k, lam) : r_matrix_pair(kind, k, parse_rat(mu), lam);
  nlohmann::ordered_json out;
  out["noise"] = noise;
  out["k"] = k;
  out["lambda"] = lambda;
  if (!mu.empty()) out["mu"] = mu;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (long i = 0; i <= k; ++i) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (long j = 0; j <= k; ++j) row.push_back(gauss_rat_str(r(i, j)));
    rows.push_back(std::move(row));
  }
  out["entries"] = std::move(rows);
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_wick_table(const std::string& noise, long n, const std::string& volume) {
  Poly1<Rat> w = wick_power(noise_from_name(noise), n, parse_rat(volume));
  std::cout << "degree,coefficient\n";
  for (int d = w.degree(); d >= 0; --d)
    std::cout << d << "," << rat_str(w.coeff(d)) << "\n";
  return 0;
}

int cmd_wick_check_product(const std::string& noise, long degree) {
  NoiseKind kind = noise_from_name(noise);
  const Rat p = Rat(1);
  std::vector<std::vector<Rat>> placements;
  for (long den = degree + 1; den <= degree + 10; ++den)
    placements.push_back(std::vector<Rat>(static_cast<std::size_t>(degree), make_rat(1, den)));
  placements.push_back(std::vector<Rat>(static_cast<std::size_t>(degree),
                                        make_rat(1, 2 * degree)));
  Rat diff = wick_product_independence_check(kind, degree, p, placements);
  std::cout << "placements," << placements.size() << "\n";
  std::cout << "max_coefficient_difference," << rat_str(diff) << "\n";
  return diff == 0 ? 0 : 1;
}

int cmd_qft_build(const std::string& noise, int dim, int level, int subgrid, bool quartic,
                  const std::string& out_path) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("qft build: dim must be in [1,3]");
  Domain dom{dim, Rat(1)};
  ModelSpec m = quartic ? build_quartic_model(dom, level, subgrid)
                        : build_free_field_model(noise_from_name(noise), dom, level, subgrid);
  if (quartic && noise_from_name(noise) != NoiseKind::gauss)
    throw std::invalid_argument("qft build: the quartic model uses the gauss reference");
  nlohmann::ordered_json j = model_to_json(m);
  if (out_path.empty())
    std::cout << j.dump(2) << "\n";
  else
    write_json_file(out_path, j);
  return 0;
}

int cmd_qft_npoint(const std::string& model_path, const std::string& cells) {
  ModelSpec m = model_from_json(read_json_file(model_path));
  double v = connected_cumulant(m, parse_longs(cells));
  std::cout << fmt_double(v) << "\n";
  return 0;
}

int cmd_qft_rp(const std::string& model_path, int degree, int axis) {
  ModelSpec m = model_from_json(read_json_file(model_path));
  RpGramResult res = rp_gram(m, degree, axis);
  std::cout << "basis_size," << res.basis_size << "\n";
  std::cout << "min_eigenvalue," << fmt_double(res.min_eigenvalue) << "\n";
  return res.min_eigenvalue >= -1e-10 ? 0 : 1;
}

int cmd_qft_cm(const std::string& model_path, int order, int grid, std::uint64_t seed) {
  ModelSpec m = model_from_json(read_json_file(model_path));
  CmCheckResult res = cm_check(m, order, grid, seed);
  std::cout << "orders_checked," << res.orders_checked << "\n";
  std::cout << "min_signed_value," << fmt_double(res.min_signed_value) << "\n";
  std::cout << "passed," << (res.passed ? 1 : 0) << "\n";
  return res.passed ? 0 : 1;
}

int cmd_qft_check_quartic(const std::string& model_path, long samples, std::uint64_t seed) {
  ModelSpec m = model_from_json(read_json_file(model_path));
  QuarticCheckResult res = quartic_s_check(m, samples, seed);
  std::cout << "max_value," << fmt_double(res.max_value) << "\n";
  std::cout << "max_route_diff," << fmt_double(res.max_route_diff) << "\n";
  std::cout << "value_at_zero," << fmt_double(res.value_at_zero) << "\n";
  bool ok = res.max_value <= 0.0 && res.max_route_diff <= 1e-10 && res.value_at_zero == 0.0;
  return ok ? 0 : 1;
}

int cmd_verify_all(bool quick, std::uint64_t seed, long samples, const std::string& out_path) {
  checks::CheckOptions opt;
  opt.quick = quick;
  opt.seed = seed;
  opt.mc_samples = samples;
  std::vector<CheckResult> results = checks::run_all(opt);
  nlohmann::ordered_json report = report_json(results, seed, samples, quick);
  if (!out_path.empty()) write_json_file(out_path, report);
  std::cout << report.dump(2) << "\n";
  return report["passed"].get<bool>() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wicklab: effective white noise analysis on dyadic lattice partitions"};
  app.require_subcommand(1);

  std::string noise = "gauss", out_path, model_path, exponents, volumes, parent = "1";
  std::string lambda = "1", mu, var = "1", cells, volume = "1";
  int dim = 1, level = 1, subgrid = 4, stirling_kind = 2, degree = 1, axis = 0, order = 3;
  int grid = 25;
  long k = 0, l = 0, n = 1, samples = 100000, children = 2;
  std::uint64_t seed = 2026;
  bool quick = false, quartic = false;

  // noise sample
  auto* noise_cmd = app.add_subcommand("noise", "reference noise operations");
  auto* sample = noise_cmd->add_subcommand("sample", "sample a field configuration");
  sample->add_option("--noise", noise)->check(CLI::IsMember({"gauss", "poisson", "gamma"}));
  sample->add_option("--dim", dim);
  sample->add_option("--level", level);
  sample->add_option("--seed", seed);
  sample->add_option("--out", out_path);

  // condexp verify | mc
  auto* condexp_cmd = app.add_subcommand("condexp", "conditional expectations");
  auto* verify = condexp_cmd->add_subcommand("verify", "closed form vs oracle");
  verify->add_option("--noise", noise)->check(CLI::IsMember({"gauss", "poisson", "gamma"}));
  verify->add_option("--exponents", exponents)->required();
  verify->add_option("--volumes", volumes)->required();
  verify->add_option("--parent", parent);
  auto* mc = condexp_cmd->add_subcommand("mc", "binned martingale monte carlo");
  mc->add_option("--noise", noise)->check(CLI::IsMember({"gauss", "poisson", "gamma"}));
  mc->add_option("--k", k);
  mc->add_option("--children", children);
  mc->add_option("--parent", parent);
  mc->add_option("--samples", samples);
  mc->add_option("--seed", seed);

  // combinat stirling | hermite
  auto* combinat_cmd = app.add_subcommand("combinat", "exact combinatorics");
  auto* stirling = combinat_cmd->add_subcommand("stirling", "stirling numbers");
  stirling->add_option("--kind", stirling_kind)->check(CLI::IsMember({1, 2}));
  stirling->add_option("--k", k)->required();
  stirling->add_option("--l", l)->required();
  auto* hermite = combinat_cmd->add_subcommand("hermite", "variance hermite polynomial");
  hermite->add_option("--n", n)->required();
  hermite->add_option("--var", var);

  // rmatrix show
  auto* rmatrix_cmd = app.add_subcommand("rmatrix", "hypothesis-R matrices");
  auto* show = rmatrix_cmd->add_subcommand("show", "print R(lambda) or R(mu,lambda)");
  show->add_option("--noise", noise)->check(CLI::IsMember({"gauss", "poisson", "gamma"}));
  show->add_option("--k", k)->required();
  show->add_option("--lambda", lambda)->required();
  show->add_option("--mu", mu);

  // wick table | check-product
  auto* wick_cmd = app.add_subcommand("wick", "wick powers and products");
  auto* table = wick_cmd->add_subcommand("table", "wick power coefficient table");
  table->add_option("--noise", noise)->check(CLI::IsMember({"gauss", "poisson", "gamma"}));
  table->add_option("--n", n)->required();
  table->add_option("--volume", volume);
  auto* check_product = wick_cmd->add_subcommand("check-product", "placement independence");
  check_product->add_option("--noise", noise)
      ->check(CLI::IsMember({"gauss", "poisson", "gamma"}));
  check_product->add_option("--degree", n)->required();

  // qft build | npoint | rp | cm | check-quartic
  auto* qft_cmd = app.add_subcommand("qft", "constructive QFT layer");
  auto* build = qft_cmd->add_subcommand("build", "build a model file");
  build->add_option("--noise", noise)->check(CLI::IsMember({"gauss", "poisson", "gamma"}));
  build->add_option("--dim", dim);
  build->add_option("--level", level);
  build->add_option("--subgrid", subgrid);
  build->add_flag("--quartic", quartic);
  build->add_option("--out", out_path);
  auto* npoint = qft_cmd->add_subcommand("npoint", "connected cumulant at distinct cells");
  npoint->add_option("--model", model_path)->required();
  npoint->add_option("--cells", cells)->required();
  auto* rp = qft_cmd->add_subcommand("rp", "reflection positivity gram matrix");
  rp->add_option("--model", model_path)->required();
  rp->add_option("--degree", degree);
  rp->add_option("--axis", axis);
  auto* cm = qft_cmd->add_subcommand("cm", "complete monotonicity check");
  cm->add_option("--model", model_path)->required();
  cm->add_option("--order", order);
  cm->add_option("--grid", grid);
  cm->add_option("--seed", seed);
  auto* check_quartic = qft_cmd->add_subcommand("check-quartic", "quartic Sa dual-route check");
  check_quartic->add_option("--model", model_path)->required();
  check_quartic->add_option("--samples", samples);
  check_quartic->add_option("--seed", seed);

  // verify-all
  auto* verify_all = app.add_subcommand("verify-all", "run the verification suite");
  verify_all->add_flag("--quick", quick, "exact-arithmetic identities only, no monte carlo");
  verify_all->add_option("--seed", seed);
  verify_all->add_option("--samples", samples);
  verify_all->add_option("--out", out_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  }

  try {
    if (sample->parsed()) return cmd_noise_sample(noise, dim, level, seed, out_path);
    if (verify->parsed()) return cmd_condexp_verify(noise, exponents, volumes, parent);
    if (mc->parsed()) return cmd_condexp_mc(noise, k, children, parent, seed, samples);
    if (stirling->parsed()) return cmd_combinat_stirling(stirling_kind, k, l);
    if (hermite->parsed()) return cmd_combinat_hermite(n, var);
    if (show->parsed()) return cmd_rmatrix_show(noise, k, lambda, mu);
    if (table->parsed()) return cmd_wick_table(noise, n, volume);
    if (check_product->parsed()) return cmd_wick_check_product(noise, n);
    if (build->parsed()) return cmd_qft_build(noise, dim, level, subgrid, quartic, out_path);
    if (npoint->parsed()) return cmd_qft_npoint(model_path, cells);
    if (rp->parsed()) return cmd_qft_rp(model_path, degree, axis);
    if (cm->parsed()) return cmd_qft_cm(model_path, order, grid, seed);
    if (check_quartic->parsed()) return cmd_qft_check_quartic(model_path, samples, seed);
    if (verify_all->parsed()) return cmd_verify_all(quick, seed, samples, out_path);
    std::cerr << "no subcommand given\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
