#pragma once

// Exact arithmetic: arbitrary-precision integers/rationals (GMP) and
// Gaussian rationals a + b*i, plus the Eigen scalar glue for both.

#include <gmpxx.h>

#include <Eigen/Core>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace wicklab {

using Int = mpz_class;
using Rat = mpq_class;

inline Rat make_rat(long num, long den = 1) {
  if (den == 0) throw std::invalid_argument("make_rat: zero denominator");
  Rat r(num, den);
  r.canonicalize();
  return r;
}

// Parses "num", "num/den" or "-num/den".
inline Rat parse_rat(std::string_view s) {
  if (s.empty()) throw std::invalid_argument("parse_rat: empty string");
  Rat r;
  if (r.set_str(std::string(s), 10) != 0)
    throw std::invalid_argument("parse_rat: bad rational '" + std::string(s) + "'");
  if (r.get_den() == 0) throw std::invalid_argument("parse_rat: zero denominator");
  r.canonicalize();
  return r;
}

inline std::string rat_str(const Rat& r) { return r.get_str(); }

inline double to_double(const Rat& r) { return r.get_d(); }

// Rat -> scalar conversion for code generic over exact and floating types.
template <class T>
T to_scalar(const Rat& r);
template <>
inline Rat to_scalar<Rat>(const Rat& r) {
  return r;
}
template <>
inline double to_scalar<double>(const Rat& r) {
  return to_double(r);
}

inline Rat rat_pow(const Rat& base, long e) {
  if (e < 0) {
    if (base == 0) throw std::invalid_argument("rat_pow: 0 to negative power");
    return Rat(1) / rat_pow(base, -e);
  }
  Rat out(1), b = base;
  for (long n = e; n > 0; n >>= 1) {
    if (n & 1) out *= b;
    b *= b;
  }
  return out;
}

inline Int factorial(long n) {
  if (n < 0) throw std::invalid_argument("factorial: negative argument");
  Int f;
  mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(n));
  return f;
}

inline Int binomial(long n, long k) {
  if (k < 0 || k > n || n < 0) return Int(0);
  Int b;
  mpz_bin_uiui(b.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return b;
}

// x(x+1)...(x+n-1); empty product for n = 0.
inline Rat rising_factorial(const Rat& x, long n) {
  Rat out(1);
  for (long i = 0; i < n; ++i) out *= x + Rat(i);
  return out;
}

// x(x-1)...(x-n+1).
inline Rat falling_factorial_value(const Rat& x, long n) {
  Rat out(1);
  for (long i = 0; i < n; ++i) out *= x - Rat(i);
  return out;
}

// ---------------------------------------------------------------------------
// Gaussian rationals
// ---------------------------------------------------------------------------

struct GaussRat {
  Rat re, im;

  GaussRat() : re(0), im(0) {}
  GaussRat(long v) : re(v), im(0) {}  // NOLINT: implicit by design
  GaussRat(Rat r) : re(std::move(r)), im(0) {}
  GaussRat(Rat r, Rat i) : re(std::move(r)), im(std::move(i)) {}

  bool is_real() const { return im == 0; }
  bool is_zero() const { return re == 0 && im == 0; }

  GaussRat conj() const { return {re, -im}; }
  Rat norm2() const { return re * re + im * im; }

  GaussRat& operator+=(const GaussRat& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  GaussRat& operator-=(const GaussRat& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  GaussRat& operator*=(const GaussRat& o) {
    Rat r = re * o.re - im * o.im;
    Rat i = re * o.im + im * o.re;
    re = std::move(r);
    im = std::move(i);
    return *this;
  }
  GaussRat& operator/=(const GaussRat& o) {
    Rat n2 = o.norm2();
    if (n2 == 0) throw std::invalid_argument("GaussRat: division by zero");
    Rat r = (re * o.re + im * o.im) / n2;
    Rat i = (im * o.re - re * o.im) / n2;
    re = std::move(r);
    im = std::move(i);
    return *this;
  }
};

inline GaussRat operator+(GaussRat a, const GaussRat& b) { return a += b; }
inline GaussRat operator-(GaussRat a, const GaussRat& b) { return a -= b; }
inline GaussRat operator*(GaussRat a, const GaussRat& b) { return a *= b; }
inline GaussRat operator/(GaussRat a, const GaussRat& b) { return a /= b; }
inline GaussRat operator-(const GaussRat& a) { return {-a.re, -a.im}; }
inline bool operator==(const GaussRat& a, const GaussRat& b) {
  return a.re == b.re && a.im == b.im;
}
inline bool operator!=(const GaussRat& a, const GaussRat& b) { return !(a == b); }

// ADL hooks used by Eigen's generic kernels.
inline GaussRat conj(const GaussRat& z) { return z.conj(); }
inline Rat real(const GaussRat& z) { return z.re; }
inline Rat imag(const GaussRat& z) { return z.im; }
inline Rat abs2(const GaussRat& z) { return z.norm2(); }

// i^k for any integer k, as an exact Gaussian rational.
inline GaussRat i_pow(long k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return GaussRat(Rat(1), Rat(0));
    case 1: return GaussRat(Rat(0), Rat(1));
    case 2: return GaussRat(Rat(-1), Rat(0));
    default: return GaussRat(Rat(0), Rat(-1));
  }
}

inline Rat require_real(const GaussRat& z, const char* where) {
  if (!z.is_real()) throw std::logic_error(std::string(where) + ": nonzero imaginary part");
  return z.re;
}

inline std::string gauss_rat_str(const GaussRat& z) {
  if (z.im == 0) return rat_str(z.re);
  return rat_str(z.re) + (z.im > 0 ? "+" : "") + rat_str(z.im) + "i";
}

inline std::ostream& operator<<(std::ostream& os, const GaussRat& z) {
  return os << gauss_rat_str(z);
}

}  // namespace wicklab

namespace Eigen {

template <>
struct NumTraits<mpq_class> : GenericNumTraits<mpq_class> {
  using Real = mpq_class;
  using NonInteger = mpq_class;
  using Nested = mpq_class;
  using Literal = long;
  static inline Real epsilon() { return 0; }
  static inline Real dummy_precision() { return 0; }
  static inline int digits10() { return 0; }
  enum {
    IsInteger = 0,
    IsSigned = 1,
    IsComplex = 0,
    RequireInitialization = 1,
    ReadCost = 2,
    AddCost = 6,
    MulCost = 8
  };
};

template <>
struct NumTraits<wicklab::GaussRat> : GenericNumTraits<wicklab::GaussRat> {
  using Real = mpq_class;
  using NonInteger = wicklab::GaussRat;
  using Nested = wicklab::GaussRat;
  using Literal = long;
  static inline Real epsilon() { return 0; }
  static inline Real dummy_precision() { return 0; }
  static inline int digits10() { return 0; }
  enum {
    IsInteger = 0,
    IsSigned = 1,
    IsComplex = 1,
    RequireInitialization = 1,
    ReadCost = 4,
    AddCost = 12,
    MulCost = 32
  };
};

}  // namespace Eigen

namespace wicklab {

using RatMatrix = Eigen::Matrix<Rat, Eigen::Dynamic, Eigen::Dynamic>;
using RatVector = Eigen::Matrix<Rat, Eigen::Dynamic, 1>;
using GaussRatMatrix = Eigen::Matrix<GaussRat, Eigen::Dynamic, Eigen::Dynamic>;
using GaussRatVector = Eigen::Matrix<GaussRat, Eigen::Dynamic, 1>;

// Solves X * B = L for X, with B lower-triangular and exactly invertible.
// Works for any exact field scalar; used where Eigen's decompositions
// would want floating-point pivoting.
template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> solve_right_lower_triangular(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& L,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& B) {
  const Eigen::Index n = B.rows();
  if (B.cols() != n || L.cols() != n)
    throw std::invalid_argument("solve_right_lower_triangular: shape mismatch");
  for (Eigen::Index j = 0; j < n; ++j)
    if (B(j, j) == Scalar(0))
      throw std::runtime_error("solve_right_lower_triangular: singular system");
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> X(L.rows(), n);
  // Column j of X*B involves B(m,j) for m >= j only; sweep columns downward.
  for (Eigen::Index r = 0; r < L.rows(); ++r) {
    for (Eigen::Index j = n - 1; j >= 0; --j) {
      Scalar acc = L(r, j);
      for (Eigen::Index m = j + 1; m < n; ++m) acc -= X(r, m) * B(m, j);
      X(r, j) = acc / B(j, j);
    }
  }
  return X;
}

// Exact inverse of a lower-triangular matrix.
template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> invert_lower_triangular(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& M) {
  const Eigen::Index n = M.rows();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> inv =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    inv(j, j) = Scalar(1) / M(j, j);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      Scalar acc = Scalar(0);
      for (Eigen::Index m = j; m < i; ++m) acc += M(i, m) * inv(m, j);
      inv(i, j) = -acc / M(i, i);
    }
  }
  return inv;
}

}  // namespace wicklab
