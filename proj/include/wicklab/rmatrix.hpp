#pragma once

// The matrices R^k(lambda) and R(mu,lambda) of Hypothesis R, defined row-wise
// by  nu_hat_{lambda-mu} * nu_hat_mu^(j) = sum_l R_jl(mu,lambda) nu_hat_lambda^(l).
//
// Construction is generic: both sides are expanded exactly in the noise's
// functional basis and the triangular system is solved in Gaussian rationals.
// Closed forms (Gamma diagonal, Poisson scale-flow exponential, Gauss
// Hermite connection coefficients) are provided as independent routes.

#include <cmath>
#include <stdexcept>

#include "wicklab/combinat.hpp"
#include "wicklab/exact.hpp"
#include "wicklab/noise.hpp"

namespace wicklab {

// R(mu,lambda), order k: a (k+1)x(k+1) lower-triangular exact matrix.
inline GaussRatMatrix r_matrix_pair(NoiseKind kind, long k, const Rat& mu, const Rat& lambda) {
  if (k < 0) throw std::invalid_argument("r_matrix_pair: k must be >= 0");
  if (mu <= 0 || lambda <= 0)
    throw std::invalid_argument("r_matrix_pair: parameters must be > 0");
  const long size = k + 1;
  GaussRatMatrix lhs(size, size);
  GaussRatMatrix basis(size, size);
  for (long j = 0; j < size; ++j) {
    lhs.row(j) = pair_lhs_coeffs(kind, j, mu, size).transpose();
    basis.row(j) = charfn_deriv_coeffs(kind, j, lambda, size).transpose();
  }
  return solve_right_lower_triangular<GaussRat>(lhs, basis);
}

// R(lambda) = R(1, lambda).
inline GaussRatMatrix r_matrix(NoiseKind kind, long k, const Rat& lambda) {
  return r_matrix_pair(kind, k, Rat(1), lambda);
}

// ---------------------------------------------------------------------------
// Closed forms (independent routes, used as oracles)
// ---------------------------------------------------------------------------

// Gamma: diagonal with R_jj(mu,lambda) = mu^(j) / lambda^(j) (rising factorials).
inline GaussRatMatrix gamma_r_pair_closed(long k, const Rat& mu, const Rat& lambda) {
  GaussRatMatrix r = GaussRatMatrix::Zero(k + 1, k + 1);
  for (long j = 0; j <= k; ++j)
    r(j, j) = GaussRat(rising_factorial(mu, j) / rising_factorial(lambda, j));
  return r;
}

// Poisson: R(mu,lambda) = U K U^{-1} with K = diag((mu/lambda)^j).
inline GaussRatMatrix poisson_r_pair_closed(long k, const Rat& mu, const Rat& lambda) {
  GeneratorDiagonalization g = diagonalize_generator(k);
  GaussRatMatrix kmat = GaussRatMatrix::Zero(k + 1, k + 1);
  for (long j = 0; j <= k; ++j) kmat(j, j) = GaussRat(rat_pow(mu / lambda, j));
  return g.u * kmat * g.u_inv;
}

// Gauss: connection coefficients between Hermite families of variances
// 1/mu and 1/lambda; R_{j,j-2m} = mu^j lambda^(2m-j) C(j,2m) (2m-1)!! (1/lambda - 1/mu)^m.
inline GaussRatMatrix gauss_r_pair_closed(long k, const Rat& mu, const Rat& lambda) {
  GaussRatMatrix r = GaussRatMatrix::Zero(k + 1, k + 1);
  for (long j = 0; j <= k; ++j) {
    Rat dblfact(1);  // (2m-1)!! running product
    for (long m = 0; 2 * m <= j; ++m) {
      if (m > 0) dblfact *= Rat(2 * m - 1);
      Rat val = rat_pow(mu, j) * rat_pow(lambda, 2 * m - j) * Rat(binomial(j, 2 * m)) *
                dblfact * rat_pow(Rat(1) / lambda - Rat(1) / mu, m);
      r(j, j - 2 * m) = GaussRat(val);
    }
  }
  return r;
}

inline GaussRatMatrix r_pair_closed(NoiseKind kind, long k, const Rat& mu, const Rat& lambda) {
  switch (kind) {
    case NoiseKind::gauss: return gauss_r_pair_closed(k, mu, lambda);
    case NoiseKind::poisson: return poisson_r_pair_closed(k, mu, lambda);
    case NoiseKind::gamma: return gamma_r_pair_closed(k, mu, lambda);
  }
  throw std::logic_error("r_pair_closed: bad kind");
}

// ---------------------------------------------------------------------------
// Numeric residual of the defining relation on a xi-grid
// ---------------------------------------------------------------------------

inline double r_defining_residual(NoiseKind kind, const GaussRatMatrix& r, const Rat& mu,
                                  const Rat& lambda) {
  const long size = r.rows();
  const double mu_d = to_double(mu);
  const double lam_d = to_double(lambda);
  double worst = 0.0;
  for (double xi = -3.0; xi <= 3.0 + 1e-12; xi += 0.5) {
    for (long j = 0; j < size; ++j) {
      Complex left = detail::charfn_any(kind, lam_d - mu_d, xi) *
                     charfn_deriv(kind, mu_d, static_cast<int>(j), xi);
      Complex right = 0.0;
      for (long l = 0; l <= j; ++l) {
        Complex rjl(to_double(r(j, l).re), to_double(r(j, l).im));
        right += rjl * charfn_deriv(kind, lam_d, static_cast<int>(l), xi);
      }
      worst = std::max(worst, std::abs(left - right));
    }
  }
  return worst;
}

}  // namespace wicklab
