#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "wicklab/noise.hpp"

using namespace wicklab;

namespace {
const NoiseKind kAll[] = {NoiseKind::gauss, NoiseKind::poisson, NoiseKind::gamma};
}

TEST_CASE("density anchors") {
  CHECK(density(NoiseKind::poisson, 1.0, 0.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(density(NoiseKind::gauss, 1.0, 0.0) ==
        doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-14));
  for (double s : {0.0, 0.5, 1.0, 3.5})
    CHECK(density(NoiseKind::gamma, 1.0, s) == doctest::Approx(std::exp(-s)).epsilon(1e-14));

  SUBCASE("outside the support gives 0, not an error") {
    CHECK(density(NoiseKind::poisson, 1.0, 0.5) == 0.0);
    CHECK(density(NoiseKind::poisson, 1.0, -1.0) == 0.0);
    CHECK(density(NoiseKind::gamma, 2.0, -0.5) == 0.0);
  }
  SUBCASE("nonpositive lambda is an argument error") {
    CHECK_THROWS_AS(density(NoiseKind::gauss, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(density(NoiseKind::gamma, -1.0, 1.0), std::invalid_argument);
  }
}

TEST_CASE("density normalization") {
  SUBCASE("poisson sums to 1") {
    for (double lam : {0.25, 1.0, 7.5}) {
      double acc = 0.0;
      for (int s = 0; s <= 200; ++s) acc += density(NoiseKind::poisson, lam, s);
      CHECK(acc == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  SUBCASE("gauss and gamma integrate to 1 (trapezoid)") {
    for (NoiseKind kind : {NoiseKind::gauss, NoiseKind::gamma}) {
      double lam = 1.5, lo = kind == NoiseKind::gauss ? -40.0 : 1e-9, hi = 40.0;
      int n = 400000;
      double acc = 0.0, dx = (hi - lo) / n;
      for (int i = 0; i <= n; ++i) {
        double w = (i == 0 || i == n) ? 0.5 : 1.0;
        acc += w * density(kind, lam, lo + i * dx) * dx;
      }
      CHECK(acc == doctest::Approx(1.0).epsilon(1e-6));
    }
  }
}

TEST_CASE("characteristic function anchors") {
  for (NoiseKind kind : kAll) CHECK(std::abs(charfn(kind, 0.7, 0.0) - 1.0) < 1e-15);
  CHECK(std::abs(charfn(NoiseKind::gauss, 2.0, 1.0) - std::exp(-1.0)) < 1e-15);
  CHECK(std::abs(charfn(NoiseKind::gamma, 1.0, 1.0) - Complex(0.5, -0.5)) < 1e-15);

  SUBCASE("|charfn| <= 1") {
    for (NoiseKind kind : kAll)
      for (double xi = -5.0; xi <= 5.0; xi += 0.37)
        CHECK(std::abs(charfn(kind, 1.3, xi)) <= 1.0 + 1e-14);
  }
}

TEST_CASE("semigroup property on a 101-point grid") {
  const Rat l1 = make_rat(3, 4), l2 = make_rat(5, 2);
  for (NoiseKind kind : kAll) {
    for (int i = 0; i <= 100; ++i) {
      double xi = -5.0 + 0.1 * i;
      Complex lhs = charfn(kind, to_double(l1), xi) * charfn(kind, to_double(l2), xi);
      Complex rhs = charfn(kind, to_double(l1 + l2), xi);
      CHECK(std::abs(lhs - rhs) <= 1e-12);
    }
  }
}

TEST_CASE("poisson density matches charfn through the fourier sum") {
  for (double lam : {0.5, 2.0, 10.0}) {
    for (double xi : {-2.0, -0.3, 0.9, 3.0}) {
      Complex acc = 0.0;
      const Complex i(0, 1);
      for (int s = 0; s <= 200; ++s)
        acc += std::exp(-i * xi * static_cast<double>(s)) * density(NoiseKind::poisson, lam, s);
      CHECK(std::abs(acc - charfn(NoiseKind::poisson, lam, xi)) <= 1e-10);
    }
  }
}

TEST_CASE("charfn_deriv agrees with central finite differences") {
  for (NoiseKind kind : kAll) {
    for (int k = 1; k <= 3; ++k) {
      for (double xi : {-1.1, 0.0, 0.7}) {
        double h = 1e-5;
        Complex num = (charfn_deriv(kind, 1.7, k - 1, xi + h) -
                       charfn_deriv(kind, 1.7, k - 1, xi - h)) /
                      (2 * h);
        CHECK(std::abs(num - charfn_deriv(kind, 1.7, k, xi)) < 1e-6);
      }
    }
  }
}

TEST_CASE("hypothesis R") {
  SUBCASE("k=0 is the identity row") {
    for (NoiseKind kind : kAll) {
      auto res = check_hypothesis_R(kind, 0, make_rat(3, 2));
      CHECK(res.residual <= 1e-10);
      CHECK(res.c[0] == GaussRat(Rat(0)));
      CHECK(res.c[1] == GaussRat(Rat(1)));
    }
  }
  SUBCASE("gauss closed form: nu^(k) nu' = (nu^(k+1) + k lambda nu^(k-1)) nu") {
    // Forced by nu_lambda' = -lambda xi nu_lambda and the Hermite product
    // rule; k=1 by hand: nu'nu' = lambda^2 xi^2 nu^2 = (nu'' + lambda nu) nu.
    Rat lam = make_rat(5, 3);
    for (long k = 1; k <= 6; ++k) {
      auto res = check_hypothesis_R(NoiseKind::gauss, k, lam);
      CHECK(res.residual <= 1e-10);
      CHECK(res.c[static_cast<std::size_t>(k + 1)] == GaussRat(Rat(1)));
      CHECK(res.c[static_cast<std::size_t>(k - 1)] == GaussRat(Rat(Rat(k) * lam)));
      for (long l = 0; l <= k + 1; ++l)
        if (l != k + 1 && l != k - 1) CHECK(res.c[static_cast<std::size_t>(l)].is_zero());
    }
  }
  SUBCASE("poisson k=2, lambda=1 residual") {
    auto res = check_hypothesis_R(NoiseKind::poisson, 2, Rat(1));
    CHECK(res.residual <= 1e-10);
  }
  SUBCASE("residuals across noises and orders") {
    for (NoiseKind kind : kAll)
      for (long k = 0; k <= 8; ++k)
        CHECK(check_hypothesis_R(kind, k, make_rat(7, 5)).residual <= 1e-10);
  }
}

TEST_CASE("sample_field support and determinism") {
  Partition p = make_partition({2, Rat(1)}, 2);
  const double vol = to_double(cell_volume(p.domain, 2));

  SUBCASE("poisson totals are nonnegative integers") {
    Field<double> f = sample_field(p, NoiseKind::poisson, 42);
    for (double x : f.values) {
      double s = x * vol;
      CHECK(s >= 0.0);
      CHECK(std::abs(s - std::round(s)) < 1e-9);
    }
  }
  SUBCASE("gamma values are positive") {
    Field<double> f = sample_field(p, NoiseKind::gamma, 42);
    for (double x : f.values) CHECK(x > 0.0);
  }
  SUBCASE("same seed reproduces bit-identically, different seed does not") {
    for (NoiseKind kind : kAll) {
      Field<double> a = sample_field(p, kind, 7, 3);
      Field<double> b = sample_field(p, kind, 7, 3);
      Field<double> c = sample_field(p, kind, 8, 3);
      CHECK(a.values == b.values);
      CHECK(a.values != c.values);
    }
  }
  SUBCASE("per-cell streams: a single cell's draw is order-independent") {
    // Drawing cell 5's stream alone matches its value inside the full field.
    Field<double> f = sample_field(p, NoiseKind::gauss, 11, 2);
    RngStream rng(11, 2 * static_cast<std::uint64_t>(p.cell_count()) + 5);
    double s = sample_total(NoiseKind::gauss, vol, rng);
    CHECK(f.values[5] == s / vol);
  }
}

TEST_CASE("sampled moments match analytic moments within 4 standard errors") {
  const long n = 100000;
  for (NoiseKind kind : kAll) {
    double lam = 1.0;
    double mean = 0.0, m2 = 0.0;
    for (long i = 0; i < n; ++i) {
      RngStream rng(1234, static_cast<std::uint64_t>(i));
      double s = sample_total(kind, lam, rng);
      mean += s;
      m2 += s * s;
    }
    mean /= n;
    m2 /= n;
    double var = m2 - mean * mean;
    double se_mean = std::sqrt(total_variance(kind, lam) / n);
    CHECK(std::abs(mean - total_mean(kind, lam)) <= 4 * se_mean);
    // crude SE for the variance estimate; adequate as a 4-sigma gate
    double se_var = total_variance(kind, lam) * std::sqrt(8.0 / n);
    CHECK(std::abs(var - total_variance(kind, lam)) <= 4 * se_var);
  }
}

TEST_CASE("gamma sampler covers shape < 1 (small cells)") {
  const long n = 50000;
  const double lam = 0.125;
  double mean = 0.0;
  for (long i = 0; i < n; ++i) {
    RngStream rng(99, static_cast<std::uint64_t>(i));
    double s = sample_total(NoiseKind::gamma, lam, rng);
    CHECK(s > 0.0);
    mean += s;
  }
  mean /= n;
  CHECK(std::abs(mean - lam) <= 4 * std::sqrt(lam / n));
}
