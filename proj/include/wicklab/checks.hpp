#pragma once

// The verification checks behind `verify-all` and the acceptance suite.
// Each check pins its tolerance in code and reports the worst residual it
// saw; exact checks report 0 or 1 (failure count folded into `passed`).

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "wicklab/condexp.hpp"
#include "wicklab/parallel.hpp"
#include "wicklab/qft.hpp"
#include "wicklab/report.hpp"
#include "wicklab/rmatrix.hpp"
#include "wicklab/wick.hpp"

namespace wicklab::checks {

inline constexpr NoiseKind kNoises[] = {NoiseKind::gauss, NoiseKind::poisson, NoiseKind::gamma};

// --- exact identity suite ---------------------------------------------------

inline CheckResult stirling_exact() {
  CheckResult r{"exact.stirling", true, 0.0, 0};
  for (long k = 0; k <= 15 && r.passed; ++k) {
    if (!stirling_identity_check(k)) r.passed = false;
    for (long l = 0; l <= 15; ++l) {
      Int acc(0);
      for (long j = 0; j <= k; ++j) acc += stirling2(k, j) * stirling1_signed(j, l);
      if (acc != (k == l ? 1 : 0)) r.passed = false;
      ++r.samples;
    }
  }
  // falling-factorial / stirling bridge, exact
  for (long s = 0; s <= 10; ++s)
    for (const Rat& a : {make_rat(1, 3), make_rat(5, 2)})
      for (long x = -2; x <= 2; ++x) {
        Rat lhs = rat_pow(a, s) * falling_factorial(s, a).eval(Rat(x));
        Rat rhs(0);
        for (long l = 0; l <= s; ++l)
          rhs += Rat(stirling1_signed(s, l)) * rat_pow(a * Rat(x), l);
        if (lhs != rhs) r.passed = false;
        ++r.samples;
      }
  return r;
}

inline CheckResult generator_diagonalization() {
  CheckResult r{"exact.generator_diagonalization", true, 0.0, 0};
  for (long n = 0; n <= 10; ++n) {
    GaussRatMatrix a = poisson_generator(n);
    GeneratorDiagonalization g = diagonalize_generator(n);
    GaussRatMatrix rec = g.u * g.d * g.u_inv;
    GaussRatMatrix id = g.u * g.u_inv;
    for (long i = 0; i <= n; ++i) {
      if (g.d(i, i) != GaussRat(Rat(i))) r.passed = false;  // spectrum {0..n}
      for (long j = 0; j <= n; ++j) {
        if (rec(i, j) != a(i, j)) r.passed = false;
        if (id(i, j) != GaussRat(Rat(i == j ? 1 : 0))) r.passed = false;
        ++r.samples;
      }
    }
  }
  return r;
}

inline CheckResult r1_diagonal() {
  CheckResult r{"exact.rmatrix_r1", true, 0.0, 0};
  const Rat lambdas[] = {make_rat(1, 2), make_rat(1, 3),  make_rat(2, 3), make_rat(3, 4),
                         Rat(1),         make_rat(5, 4),  make_rat(3, 2), Rat(2),
                         make_rat(7, 3), make_rat(11, 5)};
  for (NoiseKind kind : kNoises)
    for (const Rat& lam : lambdas) {
      GaussRatMatrix m = r_matrix(kind, 1, lam);
      if (!(m(0, 0) == GaussRat(Rat(1)) && m(0, 1).is_zero() && m(1, 0).is_zero() &&
            m(1, 1) == GaussRat(Rat(Rat(1) / lam))))
        r.passed = false;
      ++r.samples;
    }
  return r;
}

inline CheckResult rmatrix_closed_forms() {
  CheckResult r{"exact.rmatrix_closed_forms", true, 0.0, 0};
  const Rat mu = make_rat(2, 5), lam = make_rat(9, 4);
  for (NoiseKind kind : kNoises) {
    GaussRatMatrix a = r_matrix_pair(kind, 6, mu, lam);
    GaussRatMatrix b = r_pair_closed(kind, 6, mu, lam);
    for (long i = 0; i <= 6; ++i)
      for (long j = 0; j <= 6; ++j) {
        if (a(i, j) != b(i, j)) r.passed = false;
        ++r.samples;
      }
    double res = r_defining_residual(kind, a, mu, lam);
    r.max_residual = std::max(r.max_residual, res);
    if (res > 1e-10) r.passed = false;
  }
  return r;
}

inline CheckResult rmatrix_semigroup(std::uint64_t seed) {
  CheckResult r{"exact.rmatrix_semigroup", true, 0.0, 0};
  RngStream rng(seed, 101);
  for (NoiseKind kind : kNoises)
    for (int rep = 0; rep < 20; ++rep) {
      Rat l1 = make_rat(1 + static_cast<long>(rng.next_u32() % 20),
                        1 + static_cast<long>(rng.next_u32() % 8));
      Rat l2 = make_rat(1 + static_cast<long>(rng.next_u32() % 20),
                        1 + static_cast<long>(rng.next_u32() % 8));
      Rat l3 = make_rat(1 + static_cast<long>(rng.next_u32() % 20),
                        1 + static_cast<long>(rng.next_u32() % 8));
      GaussRatMatrix ab = r_matrix_pair(kind, 4, l1, l2) * r_matrix_pair(kind, 4, l2, l3);
      GaussRatMatrix ac = r_matrix_pair(kind, 4, l1, l3);
      for (long i = 0; i <= 4; ++i)
        for (long j = 0; j <= 4; ++j)
          if (ab(i, j) != ac(i, j)) r.passed = false;
      ++r.samples;
    }
  return r;
}

inline CheckResult hypothesis_r() {
  CheckResult r{"exact.hypothesis_r", true, 0.0, 0};
  for (NoiseKind kind : kNoises)
    for (long k = 0; k <= 8; ++k) {
      auto res = check_hypothesis_R(kind, k, make_rat(7, 5));
      r.max_residual = std::max(r.max_residual, res.residual);
      if (res.residual > 1e-10) r.passed = false;
      ++r.samples;
    }
  return r;
}

inline CheckResult charfn_semigroup() {
  CheckResult r{"exact.charfn_semigroup", true, 0.0, 0};
  for (NoiseKind kind : kNoises)
    for (int i = 0; i <= 100; ++i) {
      double xi = -5.0 + 0.1 * i;
      Complex lhs = charfn(kind, 0.75, xi) * charfn(kind, 2.5, xi);
      Complex rhs = charfn(kind, 3.25, xi);
      double d = std::abs(lhs - rhs);
      r.max_residual = std::max(r.max_residual, d);
      if (d > 1e-12) r.passed = false;
      ++r.samples;
    }
  return r;
}

// --- oracle equivalence suite ------------------------------------------------

inline CheckResult condexp_anchors() {
  CheckResult r{"exact.condexp_anchors", true, 0.0, 0};
  const Rat q = make_rat(1, 4), p = Rat(1);
  auto expect_eq = [&r](const Poly1<Rat>& a, const Poly1<Rat>& b) {
    if (a != b) r.passed = false;
    ++r.samples;
  };
  expect_eq(cond_exp_closed(NoiseKind::poisson, {{2}, {q}, p}),
            Poly1<Rat>{Rat(0), Rat(Rat(1) / q - Rat(1) / p), Rat(1)});
  expect_eq(cond_exp_closed(NoiseKind::gauss, {{2}, {q}, p}),
            Poly1<Rat>{Rat(Rat(1) / q - Rat(1) / p), Rat(0), Rat(1)});
  expect_eq(cond_exp_closed(NoiseKind::gamma,
                            {{1, 1}, {make_rat(1, 3), make_rat(1, 2)}, p}),
            Poly1<Rat>::monomial(2, Rat(p / (p + 1))));
  return r;
}

inline CheckResult condexp_oracle_equivalence(std::uint64_t seed) {
  CheckResult r{"exact.condexp_oracle_equivalence", true, 0.0, 0};
  RngStream rng(seed, 202);
  for (NoiseKind kind : kNoises) {
    int done = 0;
    while (done < 50) {
      int n = 1 + static_cast<int>(rng.next_u32() % 3);
      std::vector<long> exps;
      long total = 0;
      for (int i = 0; i < n; ++i) {
        long k = static_cast<long>(rng.next_u32() % 4);
        exps.push_back(k);
        total += k;
      }
      if (total == 0 || total > 6) continue;
      std::vector<Rat> vols;
      Rat sum(0);
      for (int i = 0; i < n; ++i) {
        Rat v = make_rat(1 + static_cast<long>(rng.next_u32() % 12),
                         1 + static_cast<long>(rng.next_u32() % 8));
        vols.push_back(v);
        sum += v;
      }
      Rat deficit = (rng.next_u32() % 3 == 0)
                        ? Rat(0)
                        : make_rat(1 + static_cast<long>(rng.next_u32() % 12),
                                   1 + static_cast<long>(rng.next_u32() % 8));
      MonomialSpec spec{exps, vols, Rat(sum + deficit)};
      if (cond_exp_closed(kind, spec) != cond_exp_oracle(kind, spec)) r.passed = false;
      ++done;
      ++r.samples;
    }
  }
  return r;
}

// --- wick martingale suite ----------------------------------------------------

inline CheckResult wick_martingale() {
  CheckResult r{"exact.wick_martingale", true, 0.0, 0};
  const Rat q = make_rat(2, 7), p = make_rat(5, 3);
  for (NoiseKind kind : kNoises)
    for (long k = 0; k <= 8; ++k) {
      if (cond_exp_poly(kind, renormalized_power(kind, k, q), q, p) != wick_power(kind, k, p))
        r.passed = false;
      ++r.samples;
    }
  return r;
}

inline CheckResult wick_placement_independence() {
  CheckResult r{"exact.wick_placement_independence", true, 0.0, 0};
  const Rat p = Rat(1);
  std::vector<std::vector<Rat>> placements2 = {
      {make_rat(1, 3), make_rat(1, 3)},   {make_rat(1, 2), make_rat(1, 2)},
      {make_rat(1, 3), make_rat(2, 3)},   {make_rat(1, 4), make_rat(1, 8)},
      {make_rat(1, 5), make_rat(3, 5)},   {make_rat(1, 10), make_rat(1, 10)},
      {make_rat(9, 10), make_rat(1, 20)}, {make_rat(1, 6), make_rat(1, 7)},
      {make_rat(2, 5), make_rat(2, 5)},   {make_rat(1, 2), make_rat(1, 4)}};
  std::vector<std::vector<Rat>> placements3 = {
      {make_rat(1, 4), make_rat(1, 4), make_rat(1, 4)},
      {make_rat(1, 2), make_rat(1, 4), make_rat(1, 8)},
      {make_rat(1, 3), make_rat(1, 3), make_rat(1, 6)},
      {make_rat(1, 5), make_rat(2, 5), make_rat(1, 5)},
      {make_rat(1, 8), make_rat(1, 8), make_rat(1, 8)},
      {make_rat(1, 10), make_rat(1, 2), make_rat(1, 5)},
      {make_rat(1, 6), make_rat(1, 6), make_rat(1, 2)},
      {make_rat(2, 7), make_rat(2, 7), make_rat(2, 7)},
      {make_rat(1, 9), make_rat(1, 3), make_rat(1, 9)},
      {make_rat(3, 10), make_rat(3, 10), make_rat(1, 10)}};
  for (NoiseKind kind : kNoises) {
    if (wick_product_independence_check(kind, 2, p, placements2) != Rat(0)) r.passed = false;
    if (wick_product_independence_check(kind, 3, p, placements3) != Rat(0)) r.passed = false;
    r.samples += static_cast<long>(placements2.size() + placements3.size());
  }
  return r;
}

// --- monte carlo suite ---------------------------------------------------------

inline CheckResult mc_martingale(std::uint64_t seed, long samples) {
  CheckResult r{"mc.martingale", true, 0.0, 0};
  const Rat p = Rat(1);
  const long children = 2;
  const Rat q = Rat(p / Rat(children));
  for (NoiseKind kind : kNoises) {
    for (long k = 1; k <= 3; ++k) {
      // a_Q = k-th wick power at the fine scale; a_P the coarse wick power
      Poly1<double> fine = map_coeffs<double>(renormalized_power(kind, k, q), to_double);
      Poly1<double> coarse = map_coeffs<double>(wick_power(kind, k, p), to_double);
      auto res = martingale_mc(kind, p, children, fine, coarse, seed + static_cast<std::uint64_t>(k),
                               samples);
      r.max_residual = std::max(r.max_residual, res.max_abs_z);
      if (res.max_abs_z > 4.0 || res.used_bins < 1) r.passed = false;
      r.samples += res.samples;
    }
  }
  return r;
}

inline CheckResult mc_transform_ratio(std::uint64_t seed, long samples) {
  CheckResult r{"mc.transform_ratio", true, 0.0, 0};
  Partition part = make_partition({1, Rat(1)}, 1);
  const Rat vol = make_rat(1, 2);
  const double probes[5] = {-2.0, -0.9, 0.3, 1.1, 2.4};
  for (NoiseKind kind : kNoises) {
    MultiPoly<double> a(2);
    {
      Poly1<Rat> w2 = wick_power(kind, 2, vol);
      for (int d = 0; d <= w2.degree(); ++d) {
        if (w2.coeff(d) == 0) continue;
        MultiPoly<double>::Exponents e = {d, 0};
        a.add_term(std::move(e), to_double(w2.coeff(d)));
      }
    }
    for (double xi0 : probes) {
      std::vector<double> xi = {xi0, -0.4};
      McEstimate est = t_transform_mc(kind, part, a, xi, seed, samples);
      Complex mh = mu_hat(kind, part, xi);
      Complex closed = s_from_polynomial(kind, part, a, xi);
      double dist = std::abs(est.value / mh - closed);
      double gate = 4.0 * est.se / std::abs(mh);
      r.max_residual = std::max(r.max_residual, gate > 0 ? dist / gate : dist);
      if (dist > gate + 1e-12) r.passed = false;
      r.samples += est.samples;
    }
  }
  return r;
}

// --- S-homomorphism -------------------------------------------------------------

inline CheckResult s_homomorphism(std::uint64_t seed) {
  CheckResult r{"wick.s_homomorphism", true, 0.0, 0};
  Partition part = make_partition({1, Rat(1)}, 1);
  RngStream rng(seed, 303);
  for (NoiseKind kind : kNoises) {
    for (int rep = 0; rep < 100; ++rep) {
      auto random_chaos = [&](int max_order) {
        ChaosExpansion c = ChaosExpansion::zero(part, max_order);
        for (auto& ker : c.kernels)
          for (auto& v : ker) v = 2.0 * rng.uniform() - 1.0;
        return c;
      };
      ChaosExpansion a = random_chaos(static_cast<int>(rng.next_u32() % 4));
      ChaosExpansion b = random_chaos(static_cast<int>(rng.next_u32() % 4));
      std::vector<double> xi = {2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0};
      Complex sa = s_transform(kind, a, xi);
      Complex sb = s_transform(kind, b, xi);
      Complex sab =
          s_from_polynomial(kind, part, chaos_to_polynomial(kind, wick_product(a, b)), xi);
      double d = std::abs(sab - sa * sb);
      r.max_residual = std::max(r.max_residual, d);
      if (d > 1e-10) r.passed = false;
      ++r.samples;
    }
  }
  return r;
}

inline CheckResult scale_consistency(std::uint64_t seed) {
  CheckResult r{"wick.scale_consistency", true, 0.0, 0};
  Partition part = make_partition({1, Rat(1)}, 2);
  const std::size_t c = static_cast<std::size_t>(part.cell_count());
  RngStream rng(seed, 404);
  for (NoiseKind kind : kNoises) {
    ModelSpec m{kind, KernelFamily::zero(2, part), KernelFamily{4, part, {}}, 1};
    Eigen::MatrixXd b(c, c);
    for (std::size_t i = 0; i < c; ++i)
      for (std::size_t j = 0; j < c; ++j) b(i, j) = 0.2 * (2.0 * rng.uniform() - 1.0);
    Eigen::MatrixXd alpha = b.transpose() * b;
    for (std::size_t i = 0; i < c; ++i)
      for (std::size_t j = 0; j < c; ++j) m.alpha2.entries[i * c + j] = alpha(i, j);
    for (int rep = 0; rep < 20; ++rep) {
      std::vector<double> xi_coarse = {rng.normal(), rng.normal()};
      std::vector<double> xi_fine = inject_dual(part.domain, 1, 2, xi_coarse);
      Complex fine = phi_model(m, 2, xi_fine);
      Complex coarse = phi_model(m, 1, xi_coarse);
      double rel = std::abs(fine - coarse) / std::abs(coarse);
      r.max_residual = std::max(r.max_residual, rel);
      if (rel > 1e-12) r.passed = false;
      ++r.samples;
    }
  }
  return r;
}

// --- QFT suite -------------------------------------------------------------------

inline CheckResult qft_green() {
  CheckResult r{"qft.green", true, 0.0, 0};
  for (int dim : {1, 2}) {
    Domain dom{dim, Rat(1)};
    int n = dim == 1 ? 32 : 16;
    GreenMatrix g = discrete_green(dom, n);
    double res = green_residual(g);
    r.max_residual = std::max(r.max_residual, res);
    if (res > 1e-8) r.passed = false;
    Eigen::VectorXd sums = g.g.rowwise().sum();
    for (long i = 0; i < sums.size(); ++i)
      if (std::abs(sums(i) - 1.0) > 1e-10) r.passed = false;
    if (g.g.minCoeff() <= 0.0) r.passed = false;
    ++r.samples;
  }
  return r;
}

inline CheckResult qft_kernel_compatibility() {
  CheckResult r{"qft.kernel_compatibility", true, 0.0, 0};
  // two successive coarsenings against directly built coarse kernels
  struct Case {
    int dim, level, subgrid;
  } cases[] = {{1, 3, 4}, {2, 2, 4}};
  for (const Case& cs : cases) {
    Domain dom{cs.dim, Rat(1)};
    Partition fine = make_partition(dom, cs.level);
    int n = static_cast<int>(fine.cells_per_axis()) * cs.subgrid;
    GreenMatrix green = discrete_green(dom, n);
    KernelFamily k2 = propagator_kernel(green, fine, cs.subgrid);
    KernelFamily k4 = quartic_kernel(green, fine, cs.subgrid);
    for (int step = 1; step <= 2; ++step) {
      int target = cs.level - step;
      Partition coarse = make_partition(dom, target);
      int coarse_subgrid = cs.subgrid * (1 << step);
      KernelFamily d2 = propagator_kernel(green, coarse, coarse_subgrid);
      KernelFamily s2 = k2.coarsened(target);
      for (std::size_t i = 0; i < d2.entries.size(); ++i) {
        double rel = std::abs(d2.entries[i] - s2.entries[i]) /
                     std::max(1e-30, std::abs(d2.entries[i]));
        r.max_residual = std::max(r.max_residual, rel);
        if (rel > 1e-12) r.passed = false;
      }
      KernelFamily d4 = quartic_kernel(green, coarse, coarse_subgrid);
      KernelFamily s4 = k4.coarsened(target);
      for (std::size_t i = 0; i < d4.entries.size(); ++i) {
        double rel = std::abs(d4.entries[i] - s4.entries[i]) /
                     std::max(1e-30, std::abs(d4.entries[i]));
        r.max_residual = std::max(r.max_residual, rel);
        if (rel > 1e-12) r.passed = false;
      }
      ++r.samples;
    }
  }
  return r;
}

inline CheckResult qft_quartic_sa(std::uint64_t seed) {
  CheckResult r{"qft.quartic_sa", true, 0.0, 0};
  ModelSpec model = build_quartic_model({1, Rat(1)}, 2, 4);
  QuarticCheckResult res = quartic_s_check(model, 1000, seed);
  r.samples = 1000;
  r.max_residual = res.max_route_diff;
  if (res.max_value > 0.0 || res.max_route_diff > 1e-10 || res.value_at_zero != 0.0)
    r.passed = false;
  return r;
}

inline CheckResult qft_cumulant_reference_independence() {
  CheckResult r{"qft.cumulant_reference_independence", true, 0.0, 0};
  ModelSpec ref = build_free_field_model(NoiseKind::gauss, {1, Rat(1)}, 2, 4);
  for (NoiseKind kind : kNoises) {
    ModelSpec m = ref;
    m.kind = kind;
    for (long i = 0; i < 4; ++i)
      for (long j = 0; j < 4; ++j) {
        if (i == j) continue;
        double d = std::abs(connected_cumulant(m, {i, j}) - connected_cumulant(ref, {i, j}));
        r.max_residual = std::max(r.max_residual, d);
        if (d > 1e-10) r.passed = false;
        ++r.samples;
      }
  }
  return r;
}

inline CheckResult qft_rp_gram() {
  CheckResult r{"qft.rp_gram", true, 0.0, 0};
  double worst = 0.0;
  for (int level : {1, 2, 3}) {
    ModelSpec m = build_free_field_model(NoiseKind::gauss, {1, Rat(1)}, level, 2);
    for (int d = 0; d <= 2; ++d) {
      RpGramResult res = rp_gram(m, d, 0);
      worst = std::min(worst, res.min_eigenvalue);
      ++r.samples;
    }
  }
  {
    ModelSpec m = build_free_field_model(NoiseKind::gauss, {2, Rat(1)}, 2, 2);
    RpGramResult res = rp_gram(m, 1, 0);
    worst = std::min(worst, res.min_eigenvalue);
    ++r.samples;
  }
  r.max_residual = std::abs(std::min(worst, 0.0));
  if (worst < -1e-10) r.passed = false;
  return r;
}

inline CheckResult qft_cm(std::uint64_t seed) {
  CheckResult r{"qft.cm", true, 0.0, 0};
  for (NoiseKind kind : {NoiseKind::poisson, NoiseKind::gamma}) {
    ModelSpec m = build_free_field_model(kind, {1, Rat(1)}, 2, 4);
    CmCheckResult res = cm_check(m, 3, 25, seed);
    if (!res.passed) r.passed = false;
    r.max_residual = std::max(r.max_residual, std::abs(std::min(res.min_signed_value, 0.0)));
    r.samples += res.orders_checked;
  }
  return r;
}

// --- driver ----------------------------------------------------------------------

struct CheckOptions {
  std::uint64_t seed = 2026;
  long mc_samples = 100000;
  bool quick = false;
};

inline std::vector<CheckResult> run_all(const CheckOptions& opt) {
  std::vector<std::function<CheckResult()>> jobs = {
      [] { return stirling_exact(); },
      [] { return generator_diagonalization(); },
      [] { return r1_diagonal(); },
      [] { return rmatrix_closed_forms(); },
      [&] { return rmatrix_semigroup(opt.seed); },
      [] { return hypothesis_r(); },
      [] { return charfn_semigroup(); },
      [] { return condexp_anchors(); },
      [&] { return condexp_oracle_equivalence(opt.seed); },
      [] { return wick_martingale(); },
      [] { return wick_placement_independence(); },
      [&] { return s_homomorphism(opt.seed); },
      [&] { return scale_consistency(opt.seed); }};
  if (!opt.quick) {
    jobs.push_back([&] { return mc_martingale(opt.seed, opt.mc_samples); });
    jobs.push_back([&] { return mc_transform_ratio(opt.seed, opt.mc_samples); });
    jobs.push_back([] { return qft_green(); });
    jobs.push_back([] { return qft_kernel_compatibility(); });
    jobs.push_back([&] { return qft_quartic_sa(opt.seed); });
    jobs.push_back([] { return qft_cumulant_reference_independence(); });
    jobs.push_back([] { return qft_rp_gram(); });
    jobs.push_back([&] { return qft_cm(opt.seed); });
  }
  return run_jobs<CheckResult>(jobs);
}

}  // namespace wicklab::checks
