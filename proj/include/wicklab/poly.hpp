#pragma once

// Polynomials: dense univariate Poly1<T> and sparse multivariate MultiPoly<T>.
// Scalar-generic so the same code runs over exact rationals, Gaussian
// rationals, doubles and complex doubles.

#include <algorithm>
#include <initializer_list>
#include <map>
#include <stdexcept>
#include <vector>

namespace wicklab {

template <class T>
class Poly1 {
 public:
  Poly1() = default;
  Poly1(std::initializer_list<T> ascending) : c_(ascending) { trim(); }
  explicit Poly1(std::vector<T> ascending) : c_(std::move(ascending)) { trim(); }

  static Poly1 constant(T v) { return Poly1(std::vector<T>{std::move(v)}); }
  static Poly1 x() { return Poly1(std::vector<T>{T(0), T(1)}); }
  static Poly1 monomial(int n, T coeff) {
    std::vector<T> c(static_cast<std::size_t>(n) + 1, T(0));
    c.back() = std::move(coeff);
    return Poly1(std::move(c));
  }

  // Degree of the zero polynomial is -1.
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }

  T coeff(int n) const {
    if (n < 0 || n >= static_cast<int>(c_.size())) return T(0);
    return c_[static_cast<std::size_t>(n)];
  }
  const std::vector<T>& coeffs() const { return c_; }

  Poly1& operator+=(const Poly1& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), T(0));
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
    trim();
    return *this;
  }
  Poly1& operator-=(const Poly1& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), T(0));
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
    trim();
    return *this;
  }
  Poly1& operator*=(const T& s) {
    for (auto& c : c_) c *= s;
    trim();
    return *this;
  }
  Poly1 operator*(const Poly1& o) const {
    if (is_zero() || o.is_zero()) return Poly1();
    std::vector<T> out(c_.size() + o.c_.size() - 1, T(0));
    for (std::size_t i = 0; i < c_.size(); ++i)
      for (std::size_t j = 0; j < o.c_.size(); ++j) out[i + j] += c_[i] * o.c_[j];
    return Poly1(std::move(out));
  }

  Poly1 derivative() const {
    if (c_.size() <= 1) return Poly1();
    std::vector<T> out(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) out[i - 1] = c_[i] * T(static_cast<long>(i));
    return Poly1(std::move(out));
  }

  // p(x + a), expanded by Horner on the shifted variable.
  Poly1 shifted(const T& a) const {
    Poly1 out;
    for (int i = degree(); i >= 0; --i) {
      out = out * Poly1(std::vector<T>{a, T(1)});
      out += Poly1::constant(coeff(i));
    }
    return out;
  }

  template <class U>
  U eval(const U& x) const {
    U acc = U(0);
    for (int i = degree(); i >= 0; --i) acc = acc * x + U(c_[static_cast<std::size_t>(i)]);
    return acc;
  }

  bool operator==(const Poly1& o) const { return c_ == o.c_; }
  bool operator!=(const Poly1& o) const { return !(*this == o); }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == T(0)) c_.pop_back();
  }

  std::vector<T> c_;  // ascending powers, trailing zeros trimmed
};

template <class T>
Poly1<T> operator+(Poly1<T> a, const Poly1<T>& b) {
  return a += b;
}
template <class T>
Poly1<T> operator-(Poly1<T> a, const Poly1<T>& b) {
  return a -= b;
}
template <class T>
Poly1<T> operator*(Poly1<T> a, const T& s) {
  return a *= s;
}
template <class T>
Poly1<T> operator*(const T& s, Poly1<T> a) {
  return a *= s;
}

template <class U, class T, class F>
Poly1<U> map_coeffs(const Poly1<T>& p, F f) {
  std::vector<U> out(static_cast<std::size_t>(p.degree() + 1));
  for (int i = 0; i <= p.degree(); ++i) out[static_cast<std::size_t>(i)] = f(p.coeff(i));
  return Poly1<U>(std::move(out));
}

// ---------------------------------------------------------------------------
// Sparse multivariate polynomial over a fixed number of variables.
// ---------------------------------------------------------------------------

template <class T>
class MultiPoly {
 public:
  using Exponents = std::vector<int>;

  explicit MultiPoly(int nvars = 0) : nvars_(nvars) {}

  static MultiPoly constant(int nvars, T v) {
    MultiPoly p(nvars);
    p.add_term(Exponents(static_cast<std::size_t>(nvars), 0), std::move(v));
    return p;
  }
  static MultiPoly variable(int nvars, int var) {
    Exponents e(static_cast<std::size_t>(nvars), 0);
    e.at(static_cast<std::size_t>(var)) = 1;
    MultiPoly p(nvars);
    p.add_term(std::move(e), T(1));
    return p;
  }

  int nvars() const { return nvars_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t term_count() const { return terms_.size(); }
  const std::map<Exponents, T>& terms() const { return terms_; }

  void add_term(Exponents e, T coeff) {
    if (static_cast<int>(e.size()) != nvars_)
      throw std::invalid_argument("MultiPoly: exponent arity mismatch");
    auto it = terms_.find(e);
    if (it == terms_.end()) {
      if (!(coeff == T(0))) terms_.emplace(std::move(e), std::move(coeff));
    } else {
      it->second += coeff;
      if (it->second == T(0)) terms_.erase(it);
    }
  }

  MultiPoly& operator+=(const MultiPoly& o) {
    check_arity(o);
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }
  MultiPoly& operator-=(const MultiPoly& o) {
    check_arity(o);
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
  }
  MultiPoly operator*(const MultiPoly& o) const {
    check_arity(o);
    MultiPoly out(nvars_);
    for (const auto& [ea, ca] : terms_)
      for (const auto& [eb, cb] : o.terms_) {
        Exponents e = ea;
        for (std::size_t i = 0; i < e.size(); ++i) e[i] += eb[i];
        out.add_term(std::move(e), ca * cb);
      }
    return out;
  }
  MultiPoly& operator*=(const T& s) {
    if (s == T(0)) {
      terms_.clear();
      return *this;
    }
    for (auto& [e, c] : terms_) c *= s;
    return *this;
  }

  int total_degree() const {
    int d = -1;
    for (const auto& [e, c] : terms_) {
      int t = 0;
      for (int x : e) t += x;
      d = std::max(d, t);
    }
    return d;
  }

  template <class U>
  U eval(const std::vector<U>& xs) const {
    if (static_cast<int>(xs.size()) != nvars_)
      throw std::invalid_argument("MultiPoly::eval: arity mismatch");
    U acc = U(0);
    for (const auto& [e, c] : terms_) {
      U term = U(c);
      for (std::size_t i = 0; i < e.size(); ++i)
        for (int k = 0; k < e[i]; ++k) term = term * xs[i];
      acc = acc + term;
    }
    return acc;
  }

  bool operator==(const MultiPoly& o) const {
    return nvars_ == o.nvars_ && terms_ == o.terms_;
  }
  bool operator!=(const MultiPoly& o) const { return !(*this == o); }

 private:
  void check_arity(const MultiPoly& o) const {
    if (o.nvars_ != nvars_) throw std::invalid_argument("MultiPoly: arity mismatch");
  }

  int nvars_;
  std::map<Exponents, T> terms_;
};

template <class T>
MultiPoly<T> operator+(MultiPoly<T> a, const MultiPoly<T>& b) {
  return a += b;
}
template <class T>
MultiPoly<T> operator-(MultiPoly<T> a, const MultiPoly<T>& b) {
  return a -= b;
}
template <class T>
MultiPoly<T> operator*(MultiPoly<T> a, const T& s) {
  return a *= s;
}

}  // namespace wicklab
