#pragma once

// Exact integer/rational combinatorics: Stirling numbers of both kinds,
// parameterized falling factorials, variance-parameter Hermite polynomials,
// Touchard polynomials, and the lowering generator of the Poisson scale
// flow together with its exact diagonalization.

#include <stdexcept>
#include <vector>

#include "wicklab/exact.hpp"
#include "wicklab/poly.hpp"

namespace wicklab {

constexpr long kStirlingMax = 64;

namespace detail {

inline const std::vector<std::vector<Int>>& stirling2_table() {
  static const std::vector<std::vector<Int>> table = [] {
    std::vector<std::vector<Int>> t(kStirlingMax + 1);
    t[0] = {Int(1)};
    for (long k = 1; k <= kStirlingMax; ++k) {
      t[k].assign(k + 1, Int(0));
      for (long l = 1; l <= k; ++l) {
        // {k,l} = l*{k-1,l} + {k-1,l-1}
        Int a = (l <= k - 1) ? t[k - 1][l] : Int(0);
        t[k][l] = Int(l) * a + t[k - 1][l - 1];
      }
    }
    return t;
  }();
  return table;
}

inline const std::vector<std::vector<Int>>& stirling1_table() {
  static const std::vector<std::vector<Int>> table = [] {
    std::vector<std::vector<Int>> t(kStirlingMax + 1);
    t[0] = {Int(1)};
    for (long k = 1; k <= kStirlingMax; ++k) {
      t[k].assign(k + 1, Int(0));
      for (long l = 1; l <= k; ++l) {
        // s(k,l) = s(k-1,l-1) - (k-1)*s(k-1,l)
        Int a = (l <= k - 1) ? t[k - 1][l] : Int(0);
        t[k][l] = t[k - 1][l - 1] - Int(k - 1) * a;
      }
    }
    return t;
  }();
  return table;
}

}  // namespace detail

// Stirling numbers of the second kind, {k brace l}.
inline Int stirling2(long k, long l) {
  if (k < 0 || l < 0 || k > kStirlingMax || l > kStirlingMax)
    throw std::invalid_argument("stirling2: arguments out of range");
  if (l > k) return Int(0);
  return detail::stirling2_table()[k][l];
}

// Signed Stirling numbers of the first kind, s(k,l).
inline Int stirling1_signed(long k, long l) {
  if (k < 0 || l < 0 || k > kStirlingMax || l > kStirlingMax)
    throw std::invalid_argument("stirling1_signed: arguments out of range");
  if (l > k) return Int(0);
  return detail::stirling1_table()[k][l];
}

// Checks l*{k,l} = sum_{j=l}^{k} C(k,j-1) (-1)^(k-j) {j,l} exactly for all l.
inline bool stirling_identity_check(long k) {
  if (k < 0 || k > 20) throw std::invalid_argument("stirling_identity_check: k out of range");
  for (long l = 0; l <= k; ++l) {
    Int lhs = Int(l) * stirling2(k, l);
    Int rhs(0);
    for (long j = l; j <= k; ++j) {
      Int term = binomial(k, j - 1) * stirling2(j, l);
      rhs += ((k - j) % 2 == 0) ? term : -term;
    }
    if (lhs != rhs) return false;
  }
  return true;
}

// (x)_{n,a} = x(x - 1/a)(x - 2/a)...(x - (n-1)/a), monic of degree n.
inline Poly1<Rat> falling_factorial(long n, const Rat& a) {
  if (n < 0) throw std::invalid_argument("falling_factorial: n must be >= 0");
  if (a == 0) throw std::invalid_argument("falling_factorial: parameter must be nonzero");
  Poly1<Rat> out = Poly1<Rat>::constant(Rat(1));
  for (long i = 0; i < n; ++i) out = out * Poly1<Rat>{-Rat(i) / a, Rat(1)};
  return out;
}

// Hermite polynomial of variance v: h_0 = 1, h_{n+1}(x) = x h_n(x) - v h_n'(x).
inline Poly1<Rat> hermite_var(long n, const Rat& v) {
  if (n < 0) throw std::invalid_argument("hermite_var: n must be >= 0");
  Poly1<Rat> h = Poly1<Rat>::constant(Rat(1));
  for (long i = 0; i < n; ++i) h = Poly1<Rat>::x() * h - v * h.derivative();
  return h;
}

// Touchard polynomial phi_k(x) = sum_j {k,j} x^j.
inline Poly1<Rat> touchard(long k) {
  std::vector<Rat> c(static_cast<std::size_t>(k) + 1);
  for (long j = 0; j <= k; ++j) c[static_cast<std::size_t>(j)] = Rat(stirling2(k, j));
  return Poly1<Rat>(std::move(c));
}

// ---------------------------------------------------------------------------
// Poisson scale-flow generator, A_{kj} = i^(k-j) C(k, j-1) for j <= k.
// ---------------------------------------------------------------------------

inline GaussRatMatrix poisson_generator(long n) {
  if (n < 0 || n > 16) throw std::invalid_argument("poisson_generator: n out of range");
  GaussRatMatrix a = GaussRatMatrix::Zero(n + 1, n + 1);
  for (long k = 0; k <= n; ++k)
    for (long j = 0; j <= k; ++j) {
      Int b = binomial(k, j - 1);
      if (b != 0) a(k, j) = i_pow(k - j) * GaussRat(Rat(b));
    }
  return a;
}

struct GeneratorDiagonalization {
  GaussRatMatrix u;      // U_{kj} = i^(n-k) {k brace j}
  GaussRatMatrix d;      // diag(0, ..., n)
  GaussRatMatrix u_inv;  // U^{-1}_{kj} = i^(j-n) s(k,j)
};

// Exact A = U D U^{-1} with spectrum {0, ..., n}. The i-power in U follows
// the convention under which the factorization verifies exactly.
inline GeneratorDiagonalization diagonalize_generator(long n) {
  if (n < 0 || n > 16) throw std::invalid_argument("diagonalize_generator: n out of range");
  GeneratorDiagonalization out;
  out.u = GaussRatMatrix::Zero(n + 1, n + 1);
  out.d = GaussRatMatrix::Zero(n + 1, n + 1);
  out.u_inv = GaussRatMatrix::Zero(n + 1, n + 1);
  for (long k = 0; k <= n; ++k) {
    out.d(k, k) = GaussRat(Rat(k));
    for (long j = 0; j <= k; ++j) {
      out.u(k, j) = i_pow(n - k) * GaussRat(Rat(stirling2(k, j)));
      out.u_inv(k, j) = i_pow(j - n) * GaussRat(Rat(stirling1_signed(k, j)));
    }
  }
  return out;
}

}  // namespace wicklab
