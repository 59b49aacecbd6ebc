#pragma once

// The three reference convolution semigroups (Gauss, Poisson, Gamma):
// densities, characteristic functions nu_hat_lambda and their derivatives,
// per-cell sampling of the reference product measure, and the closure
// property of derivative families ("Hypothesis R").
//
// Derivatives of nu_hat live in a small noise-specific functional basis:
//   Gauss:   xi^m * nu_hat_lambda          (Hermite-weighted Gaussians)
//   Poisson: e^(-i m xi) * nu_hat_lambda
//   Gamma:   (1 + i xi)^(-lambda - m)
// All basis coefficients are exact Gaussian rationals, which is what makes
// the algebraic identities of this module exactly checkable.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "wicklab/combinat.hpp"
#include "wicklab/exact.hpp"
#include "wicklab/lattice.hpp"
#include "wicklab/poly.hpp"
#include "wicklab/rng.hpp"

namespace wicklab {

enum class NoiseKind { gauss, poisson, gamma };

inline const char* noise_name(NoiseKind k) {
  switch (k) {
    case NoiseKind::gauss: return "gauss";
    case NoiseKind::poisson: return "poisson";
    case NoiseKind::gamma: return "gamma";
  }
  return "?";
}

inline NoiseKind noise_from_name(const std::string& s) {
  if (s == "gauss") return NoiseKind::gauss;
  if (s == "poisson") return NoiseKind::poisson;
  if (s == "gamma") return NoiseKind::gamma;
  throw std::invalid_argument("unknown noise '" + s + "'");
}

using Complex = std::complex<double>;

// ---------------------------------------------------------------------------
// Densities and characteristic functions
// ---------------------------------------------------------------------------

// rho_lambda(s) with respect to the invariant measure on the support
// (Lebesgue on R / R+, counting on N). Points outside the support give 0.
inline double density(NoiseKind kind, double lambda, double s) {
  if (!(lambda > 0)) throw std::invalid_argument("density: lambda must be > 0");
  switch (kind) {
    case NoiseKind::gauss:
      return std::exp(-s * s / (2.0 * lambda)) / std::sqrt(2.0 * std::numbers::pi * lambda);
    case NoiseKind::poisson: {
      double r = std::round(s);
      if (r < 0 || std::abs(s - r) > 1e-9) return 0.0;
      return std::exp(-lambda + r * std::log(lambda) - std::lgamma(r + 1.0));
    }
    case NoiseKind::gamma:
      if (s < 0) return 0.0;
      if (s == 0) return lambda == 1.0 ? 1.0 : 0.0;
      return std::exp((lambda - 1.0) * std::log(s) - s - std::lgamma(lambda));
  }
  return 0.0;
}

namespace detail {

// nu_hat for real lambda of either sign; the defining relations of the R
// matrices involve nu_hat_{lambda - mu} as a bare function.
inline Complex charfn_any(NoiseKind kind, double lambda, double xi) {
  const Complex i(0.0, 1.0);
  switch (kind) {
    case NoiseKind::gauss: return std::exp(-lambda * xi * xi / 2.0);
    case NoiseKind::poisson: return std::exp(lambda * (std::exp(-i * xi) - 1.0));
    case NoiseKind::gamma: return std::pow(1.0 + i * xi, -lambda);
  }
  return {};
}

}  // namespace detail

// nu_hat_lambda(xi) = E[e^(-i xi s)] under nu_lambda.
inline Complex charfn(NoiseKind kind, double lambda, double xi) {
  if (!(lambda > 0)) throw std::invalid_argument("charfn: lambda must be > 0");
  return detail::charfn_any(kind, lambda, xi);
}

// k-th xi-derivative of nu_hat_lambda, from the closed-form expansions.
inline Complex charfn_deriv(NoiseKind kind, double lambda, int k, double xi) {
  if (!(lambda > 0)) throw std::invalid_argument("charfn_deriv: lambda must be > 0");
  if (k < 0) throw std::invalid_argument("charfn_deriv: k must be >= 0");
  const Complex i(0.0, 1.0);
  switch (kind) {
    case NoiseKind::gauss: {
      // nu_hat^(k) = (-lambda)^k H_k^(1/lambda)(xi) nu_hat, with the Appell
      // value recursion H_{n+1} = xi H_n - (n/lambda) H_{n-1}.
      double h_prev = 0.0, h = 1.0;
      for (int n = 0; n < k; ++n) {
        double h_next = xi * h - static_cast<double>(n) / lambda * h_prev;
        h_prev = h;
        h = h_next;
      }
      return std::pow(-lambda, k) * h * detail::charfn_any(kind, lambda, xi);
    }
    case NoiseKind::poisson: {
      Complex acc = 0.0;
      Complex e = std::exp(-i * xi);
      for (int l = 0; l <= k; ++l)
        acc += to_double(Rat(stirling2(k, l))) * std::pow(lambda * e, l);
      return std::pow(-i, k) * acc * detail::charfn_any(kind, lambda, xi);
    }
    case NoiseKind::gamma:
      return std::pow(-i, k) * to_double(rising_factorial(Rat(lambda), k)) *
             std::pow(1.0 + i * xi, -lambda - static_cast<double>(k));
  }
  return {};
}

// ---------------------------------------------------------------------------
// Exact basis expansions
// ---------------------------------------------------------------------------

// Coefficients of nu_hat_lambda^(k) over the noise's functional basis
// (indices m = 0..size-1).
inline GaussRatVector charfn_deriv_coeffs(NoiseKind kind, long k, const Rat& lambda, long size) {
  GaussRatVector c = GaussRatVector::Zero(size);
  switch (kind) {
    case NoiseKind::gauss: {
      Poly1<Rat> h = hermite_var(k, Rat(1) / lambda);
      GaussRat pref = i_pow(2 * k) * GaussRat(rat_pow(lambda, k));  // (-lambda)^k
      for (long m = 0; m <= h.degree() && m < size; ++m)
        c(m) = pref * GaussRat(h.coeff(static_cast<int>(m)));
      break;
    }
    case NoiseKind::poisson:
      for (long m = 0; m <= k && m < size; ++m)
        c(m) = i_pow(-k) * GaussRat(Rat(stirling2(k, m)) * rat_pow(lambda, m));
      break;
    case NoiseKind::gamma:
      if (k < size) c(k) = i_pow(-k) * GaussRat(rising_factorial(lambda, k));
      break;
  }
  return c;
}

// Coefficients of nu_hat_mu^(j) * nu_hat_{lambda-mu} over the basis of
// parameter lambda. The product collapses back into the lambda family with
// mu-side coefficients, so lambda itself does not appear.
inline GaussRatVector pair_lhs_coeffs(NoiseKind kind, long j, const Rat& mu, long size) {
  GaussRatVector c = GaussRatVector::Zero(size);
  switch (kind) {
    case NoiseKind::gauss: {
      Poly1<Rat> h = hermite_var(j, Rat(1) / mu);
      GaussRat pref = i_pow(2 * j) * GaussRat(rat_pow(mu, j));  // (-mu)^j
      for (long m = 0; m <= h.degree() && m < size; ++m)
        c(m) = pref * GaussRat(h.coeff(static_cast<int>(m)));
      break;
    }
    case NoiseKind::poisson:
      for (long m = 0; m <= j && m < size; ++m)
        c(m) = i_pow(-j) * GaussRat(Rat(stirling2(j, m)) * rat_pow(mu, m));
      break;
    case NoiseKind::gamma:
      if (j < size) c(j) = i_pow(-j) * GaussRat(rising_factorial(mu, j));
      break;
  }
  return c;
}

// ---------------------------------------------------------------------------
// Hypothesis R: nu_hat^(k) nu_hat' = sum_l c_kl nu_hat^(l) nu_hat
// ---------------------------------------------------------------------------

struct HypothesisRResult {
  std::vector<GaussRat> c;  // c_{k,0..k+1}, solved exactly
  double residual = 0.0;    // max |LHS - RHS| on the probe grid
};

inline HypothesisRResult check_hypothesis_R(NoiseKind kind, long k, const Rat& lambda) {
  if (k < 0 || k > 8) throw std::invalid_argument("check_hypothesis_R: k must be in [0,8]");
  if (lambda <= 0) throw std::invalid_argument("check_hypothesis_R: lambda must be > 0");
  const long size = k + 2;

  // LHS coefficients of nu_hat^(k) nu_hat' / nu_hat^2 over the basis.
  GaussRatMatrix lhs = GaussRatMatrix::Zero(1, size);
  switch (kind) {
    case NoiseKind::gauss: {
      Poly1<Rat> prod = hermite_var(k, Rat(1) / lambda) * hermite_var(1, Rat(1) / lambda);
      GaussRat pref = i_pow(2 * (k + 1)) * GaussRat(rat_pow(lambda, k + 1));
      for (long m = 0; m <= prod.degree(); ++m)
        lhs(0, m) = pref * GaussRat(prod.coeff(static_cast<int>(m)));
      break;
    }
    case NoiseKind::poisson:
      for (long m = 1; m < size; ++m)
        lhs(0, m) = i_pow(-(k + 1)) * GaussRat(Rat(stirling2(k, m - 1)) * rat_pow(lambda, m));
      break;
    case NoiseKind::gamma:
      lhs(0, k + 1) = i_pow(-(k + 1)) * GaussRat(lambda * rising_factorial(lambda, k));
      break;
  }

  // Rows of B are the basis coefficients of nu_hat^(l) nu_hat / nu_hat^2.
  GaussRatMatrix b(size, size);
  for (long l = 0; l < size; ++l)
    b.row(l) = charfn_deriv_coeffs(kind, l, lambda, size).transpose();

  GaussRatMatrix c = solve_right_lower_triangular<GaussRat>(lhs, b);

  HypothesisRResult out;
  out.c.assign(static_cast<std::size_t>(size), GaussRat());
  for (long l = 0; l < size; ++l) out.c[static_cast<std::size_t>(l)] = c(0, l);

  const double lam = to_double(lambda);
  for (double xi = -3.0; xi <= 3.0 + 1e-12; xi += 0.25) {
    Complex left = charfn_deriv(kind, lam, static_cast<int>(k), xi) *
                   charfn_deriv(kind, lam, 1, xi);
    Complex right = 0.0;
    for (long l = 0; l < size; ++l) {
      Complex cl(to_double(out.c[static_cast<std::size_t>(l)].re),
                 to_double(out.c[static_cast<std::size_t>(l)].im));
      right += cl * charfn_deriv(kind, lam, static_cast<int>(l), xi) * charfn(kind, lam, xi);
    }
    out.residual = std::max(out.residual, std::abs(left - right));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

// Draws s ~ nu_lambda from the given stream.
inline double sample_total(NoiseKind kind, double lambda, RngStream& rng) {
  switch (kind) {
    case NoiseKind::gauss: return std::sqrt(lambda) * rng.normal();
    case NoiseKind::poisson: return static_cast<double>(rng.poisson(lambda));
    case NoiseKind::gamma: return rng.gamma(lambda);
  }
  return 0.0;
}

// Reference measure on X_P: cells independent, |p| x_p ~ nu_{|p|}.
// Stream id (instance * cell_count + cell index) makes draws reproducible
// and order-independent; `instance` separates Monte Carlo repetitions.
inline Field<double> sample_field(const Partition& p, NoiseKind kind, std::uint64_t seed,
                                  std::uint64_t instance = 0) {
  Field<double> f = make_field<double>(p, 0.0);
  const double vol = to_double(cell_volume(p.domain, p.level));
  const std::uint64_t n = static_cast<std::uint64_t>(p.cell_count());
  for (std::uint64_t i = 0; i < n; ++i) {
    RngStream rng(seed, instance * n + i);
    f.values[static_cast<std::size_t>(i)] = sample_total(kind, vol, rng) / vol;
  }
  return f;
}

// Analytic mean/variance of s ~ nu_lambda, for moment tests.
inline double total_mean(NoiseKind kind, double lambda) {
  return kind == NoiseKind::gauss ? 0.0 : lambda;
}
inline double total_variance(NoiseKind kind, double lambda) {
  (void)kind;
  return lambda;
}

}  // namespace wicklab
