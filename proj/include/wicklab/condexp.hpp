#pragma once

// Conditional expectations of monomials in child-cell variables given the
// parent-cell variable, E[x_{q_1}^{k_1} ... x_{q_n}^{k_n} | x_p].
//
// Two independent routes:
//  * cond_exp_closed: the R-matrix pipeline. The one-merge step
//      E[x_q^k x_m^j | x_{q+m}]
//    is expanded through R(|q|, |q|+|m|), and n-cell monomials reduce by
//    merging one child at a time into the (possibly empty) deficit cell.
//  * cond_exp_oracle: elementary conditioning of the product measure.
//    Conditioned on the total s, child totals are multinomial (Poisson),
//    s times a Dirichlet split (Gamma), or a Gaussian bridge (Gauss).
// Both produce exact rational polynomials in x_p; their equality is the
// binding correctness test for the whole R-matrix layer.

#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "wicklab/combinat.hpp"
#include "wicklab/exact.hpp"
#include "wicklab/noise.hpp"
#include "wicklab/poly.hpp"
#include "wicklab/rmatrix.hpp"

namespace wicklab {

struct MonomialSpec {
  std::vector<long> exponents;
  std::vector<Rat> child_vols;
  Rat parent_vol;

  long total_degree() const {
    return std::accumulate(exponents.begin(), exponents.end(), 0L);
  }
  Rat deficit() const {
    Rat s(0);
    for (const Rat& v : child_vols) s += v;
    return parent_vol - s;
  }
};

inline void validate_monomial_spec(const MonomialSpec& spec) {
  if (spec.exponents.size() != spec.child_vols.size())
    throw std::invalid_argument("MonomialSpec: exponents/volumes size mismatch");
  for (long k : spec.exponents)
    if (k < 0) throw std::invalid_argument("MonomialSpec: negative exponent");
  for (const Rat& v : spec.child_vols)
    if (v <= 0) throw std::invalid_argument("MonomialSpec: child volumes must be > 0");
  if (spec.parent_vol <= 0) throw std::invalid_argument("MonomialSpec: parent volume must be > 0");
  if (spec.deficit() < 0)
    throw std::invalid_argument("MonomialSpec: child volumes exceed the parent volume");
  if (spec.total_degree() > 8)
    throw std::invalid_argument("MonomialSpec: total degree above the R-matrix budget (8)");
}

// ---------------------------------------------------------------------------
// Closed form
// ---------------------------------------------------------------------------

// E[x_1^{k1} x_2^{k2} | x_p] for an exact two-child split p = q_1 + q_2:
//   mu1^{-k1} mu2^{-k2} sum_j C(k2,j)(-1)^j (lam x)^{k2-j}
//                       sum_l i^{k1+j} (-i)^l R_{k1+j,l}(mu1,lam) (lam x)^l.
inline Poly1<GaussRat> cond_exp_two_cell(NoiseKind kind, long k1, const Rat& mu1, long k2,
                                         const Rat& mu2) {
  const Rat lam = mu1 + mu2;
  const long order = k1 + k2;
  GaussRatMatrix r = r_matrix_pair(kind, order, mu1, lam);
  Poly1<GaussRat> out;
  const GaussRat scale = GaussRat(rat_pow(mu1, -k1) * rat_pow(mu2, -k2));
  for (long j = 0; j <= k2; ++j) {
    GaussRat outer = scale * GaussRat(Rat(binomial(k2, j)) * rat_pow(lam, k2 - j));
    if (j % 2 == 1) outer = -outer;
    for (long l = 0; l <= k1 + j; ++l) {
      GaussRat coeff = outer * i_pow(k1 + j) * i_pow(-l) * r(k1 + j, l) * GaussRat(rat_pow(lam, l));
      out += Poly1<GaussRat>::monomial(static_cast<int>(k2 - j + l), coeff);
    }
  }
  return out;
}

namespace detail {

inline Poly1<Rat> to_real_poly(const Poly1<GaussRat>& p, const char* where) {
  std::vector<Rat> c(static_cast<std::size_t>(p.degree() + 1));
  for (int i = 0; i <= p.degree(); ++i) c[static_cast<std::size_t>(i)] = require_real(p.coeff(i), where);
  return Poly1<Rat>(std::move(c));
}

}  // namespace detail

// E[x_{q_1}^{k_1}...x_{q_n}^{k_n} | x_p] as an exact polynomial in x_p,
// by merging children one at a time into the deficit cell.
inline Poly1<Rat> cond_exp_closed(NoiseKind kind, const MonomialSpec& spec) {
  validate_monomial_spec(spec);
  Poly1<GaussRat> merged = Poly1<GaussRat>::constant(GaussRat(Rat(1)));
  Rat merged_vol = spec.deficit();
  for (std::size_t idx = spec.exponents.size(); idx-- > 0;) {
    const long k = spec.exponents[idx];
    const Rat& q = spec.child_vols[idx];
    if (merged_vol == 0) {
      // No variable merged yet: conditioning on x_q itself is the identity.
      merged = Poly1<GaussRat>::monomial(static_cast<int>(k), merged.coeff(0));
    } else {
      Poly1<GaussRat> next;
      for (int j = 0; j <= merged.degree(); ++j) {
        Poly1<GaussRat> step = cond_exp_two_cell(kind, k, q, j, merged_vol);
        step *= merged.coeff(j);
        next += step;
      }
      merged = next;
    }
    merged_vol += q;
  }
  return detail::to_real_poly(merged, "cond_exp_closed");
}

// Conditional expectation of a polynomial observable living on one child:
// E[f(x_q) | x_p], the workhorse for tower checks and Wick martingales.
inline Poly1<Rat> cond_exp_poly(NoiseKind kind, const Poly1<Rat>& f, const Rat& child_vol,
                                const Rat& parent_vol) {
  Poly1<Rat> out;
  for (int j = 0; j <= f.degree(); ++j) {
    if (f.coeff(j) == 0) continue;
    MonomialSpec spec{{j}, {child_vol}, parent_vol};
    Poly1<Rat> term = j == 0 ? Poly1<Rat>::constant(Rat(1)) : cond_exp_closed(kind, spec);
    out += f.coeff(j) * term;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Conditional-law oracles
// ---------------------------------------------------------------------------

namespace detail {

// Poisson: child totals given s are Multinomial(s; |q_i|/|p|), so
// E[prod t_i^{k_i} | s] = sum_{j <= k} prod {k_i, j_i} c_i^{j_i} (s)_J.
inline Poly1<Rat> poisson_oracle(const MonomialSpec& spec) {
  const std::size_t n = spec.exponents.size();
  Poly1<Rat> acc;
  std::vector<long> j(n, 0);
  for (;;) {
    Rat coeff(1);
    long total_j = 0;
    for (std::size_t i = 0; i < n; ++i) {
      coeff *= Rat(stirling2(spec.exponents[i], j[i])) *
               rat_pow(spec.child_vols[i] / spec.parent_vol, j[i]);
      total_j += j[i];
    }
    if (coeff != 0) {
      // (s)_J expanded via signed Stirling numbers, s = |p| x.
      for (long l = 0; l <= total_j; ++l) {
        Rat c = coeff * Rat(stirling1_signed(total_j, l)) * rat_pow(spec.parent_vol, l);
        if (c != 0) acc += Poly1<Rat>::monomial(static_cast<int>(l), c);
      }
    }
    // odometer over 0 <= j_i <= k_i
    std::size_t pos = 0;
    while (pos < n && ++j[pos] > spec.exponents[pos]) j[pos++] = 0;
    if (pos == n) break;
  }
  Rat norm(1);
  for (std::size_t i = 0; i < n; ++i) norm *= rat_pow(spec.child_vols[i], spec.exponents[i]);
  acc *= Rat(1) / norm;
  return acc;
}

// Gamma: (t_i/s) ~ Dirichlet(|q_1|,...,|q_n|, deficit), whose moments are
// prod |q_i|^(k_i) / |p|^(K) in rising factorials.
inline Poly1<Rat> gamma_oracle(const MonomialSpec& spec) {
  const long K = spec.total_degree();
  Rat coeff = rat_pow(spec.parent_vol, K) / rising_factorial(spec.parent_vol, K);
  for (std::size_t i = 0; i < spec.exponents.size(); ++i)
    coeff *= rising_factorial(spec.child_vols[i], spec.exponents[i]) /
             rat_pow(spec.child_vols[i], spec.exponents[i]);
  return Poly1<Rat>::monomial(static_cast<int>(K), coeff);
}

// Gauss: given x_p the children are jointly Gaussian with mean x_p and
// covariance sigma_ij = delta_ij/|q_i| - 1/|p| (the bridge). Central
// moments by the Stein/Wick pairing recursion, memoized on exponents.
inline Rat gauss_central_moment(const std::vector<long>& j, const RatMatrix& sigma,
                                std::map<std::vector<long>, Rat>& memo) {
  long total = std::accumulate(j.begin(), j.end(), 0L);
  if (total == 0) return Rat(1);
  if (total % 2 == 1) return Rat(0);
  auto it = memo.find(j);
  if (it != memo.end()) return it->second;
  std::size_t a = 0;
  while (j[a] == 0) ++a;
  std::vector<long> rest = j;
  --rest[a];
  Rat acc(0);
  for (std::size_t b = 0; b < j.size(); ++b) {
    if (rest[b] == 0) continue;
    std::vector<long> next = rest;
    --next[b];
    acc += Rat(rest[b]) * sigma(static_cast<long>(a), static_cast<long>(b)) *
           gauss_central_moment(next, sigma, memo);
  }
  memo.emplace(j, acc);
  return acc;
}

inline Poly1<Rat> gauss_oracle(const MonomialSpec& spec) {
  const std::size_t n = spec.exponents.size();
  RatMatrix sigma(n, n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      Rat v = -Rat(1) / spec.parent_vol;
      if (a == b) v += Rat(1) / spec.child_vols[a];
      sigma(static_cast<long>(a), static_cast<long>(b)) = v;
    }
  std::map<std::vector<long>, Rat> memo;
  const long K = spec.total_degree();
  Poly1<Rat> acc;
  std::vector<long> j(n, 0);
  for (;;) {
    Rat coeff(1);
    long total_j = 0;
    for (std::size_t i = 0; i < n; ++i) {
      coeff *= Rat(binomial(spec.exponents[i], j[i]));
      total_j += j[i];
    }
    Rat central = gauss_central_moment(j, sigma, memo);
    Rat c = coeff * central;
    if (c != 0) acc += Poly1<Rat>::monomial(static_cast<int>(K - total_j), c);
    std::size_t pos = 0;
    while (pos < n && ++j[pos] > spec.exponents[pos]) j[pos++] = 0;
    if (pos == n) break;
  }
  return acc;
}

}  // namespace detail

inline Poly1<Rat> cond_exp_oracle(NoiseKind kind, const MonomialSpec& spec) {
  validate_monomial_spec(spec);
  switch (kind) {
    case NoiseKind::poisson: return detail::poisson_oracle(spec);
    case NoiseKind::gamma: return detail::gamma_oracle(spec);
    case NoiseKind::gauss: return detail::gauss_oracle(spec);
  }
  throw std::logic_error("cond_exp_oracle: bad kind");
}

// ---------------------------------------------------------------------------
// Monte Carlo martingale verification
// ---------------------------------------------------------------------------

struct MartingaleBin {
  long key;       // discrete coarse value (Poisson) or quantile-bin index
  long count;
  double mean;    // mean of a_fine - a_coarse within the bin
  double se;
  double z;
  bool used;      // false when count < min_bin_count (flagged, not fatal)
};

struct MartingaleMcResult {
  std::vector<MartingaleBin> bins;
  double max_abs_z = 0.0;
  long used_bins = 0;
  long flagged_bins = 0;
  long samples = 0;
};

// Samples child fields of one coarse cell, bins by the coarse value, and
// compares conditional sample means of a_fine(x_q) against a_coarse(x_p).
// Bins are exact coarse values for Poisson and 0.1-standard-deviation
// quantile bins for Gauss/Gamma.
inline MartingaleMcResult martingale_mc(NoiseKind kind, const Rat& parent_vol, long n_children,
                                        const Poly1<double>& a_fine,
                                        const Poly1<double>& a_coarse, std::uint64_t seed,
                                        long n_samples, long min_bin_count = 50) {
  if (n_children < 1) throw std::invalid_argument("martingale_mc: need at least one child");
  if (n_samples < 1) throw std::invalid_argument("martingale_mc: need samples");
  const double child_vol = to_double(parent_vol) / static_cast<double>(n_children);
  const double pvol = to_double(parent_vol);
  const double sd_coarse = 1.0 / std::sqrt(pvol);  // var x_p = 1/|p| for all three noises

  struct Acc {
    long n = 0;
    double sum = 0.0, sum2 = 0.0;
  };
  std::map<long, Acc> table;

  for (long i = 0; i < n_samples; ++i) {
    double total = 0.0;
    double x_first = 0.0;
    for (long c = 0; c < n_children; ++c) {
      RngStream rng(seed, static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(n_children) +
                              static_cast<std::uint64_t>(c));
      double x = sample_total(kind, child_vol, rng) / child_vol;
      if (c == 0) x_first = x;
      total += x;
    }
    double x_p = total / static_cast<double>(n_children);
    long key;
    if (kind == NoiseKind::poisson)
      key = static_cast<long>(std::llround(x_p * pvol));
    else
      key = static_cast<long>(std::floor(x_p / (0.1 * sd_coarse)));
    double diff = a_fine.eval(x_first) - a_coarse.eval(x_p);
    Acc& acc = table[key];
    ++acc.n;
    acc.sum += diff;
    acc.sum2 += diff * diff;
  }

  MartingaleMcResult out;
  out.samples = n_samples;
  for (const auto& [key, acc] : table) {
    MartingaleBin bin{};
    bin.key = key;
    bin.count = acc.n;
    bin.mean = acc.sum / acc.n;
    double var = acc.sum2 / acc.n - bin.mean * bin.mean;
    bin.se = acc.n > 1 ? std::sqrt(std::max(var, 0.0) / acc.n) : 0.0;
    bin.z = bin.se > 0 ? bin.mean / bin.se : 0.0;
    bin.used = acc.n >= min_bin_count;
    if (bin.used) {
      ++out.used_bins;
      out.max_abs_z = std::max(out.max_abs_z, std::abs(bin.z));
    } else {
      ++out.flagged_bins;
    }
    out.bins.push_back(bin);
  }
  return out;
}

}  // namespace wicklab
