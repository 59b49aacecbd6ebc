#pragma once

// Wick powers and products as renormalized polynomials, chaos-expansion
// kernels, S- and T-transforms, and the Wick exponential closure
// phi = mu_hat * exp(Sa).
//
// A Wick power at scale p is stored through its polynomial representative:
//   Gauss   H_n^{1/|p|}(x_p)        Poisson (x_p)_{n,|p|}
//   Gamma   (|p|^n / |p|^(n)) x_p^n
// The same polynomial at a finer scale q is the renormalized power whose
// conditional expectation at p reproduces the coarse Wick power.

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>


#include "wicklab/combinat.hpp"
#include "wicklab/condexp.hpp"
#include "wicklab/exact.hpp"
#include "wicklab/lattice.hpp"
#include "wicklab/noise.hpp"
#include "wicklab/poly.hpp"

namespace wicklab {

// ---------------------------------------------------------------------------
// Wick powers
// ---------------------------------------------------------------------------

inline Poly1<Rat> wick_power(NoiseKind kind, long n, const Rat& vol) {
  if (n < 0 || n > 10) throw std::invalid_argument("wick_power: n must be in [0,10]");
  if (vol <= 0) throw std::invalid_argument("wick_power: volume must be > 0");
  switch (kind) {
    case NoiseKind::gauss: return hermite_var(n, Rat(1) / vol);
    case NoiseKind::poisson: return falling_factorial(n, vol);
    case NoiseKind::gamma:
      return Poly1<Rat>::monomial(static_cast<int>(n),
                                  Rat(rat_pow(vol, n) / rising_factorial(vol, n)));
  }
  throw std::logic_error("wick_power: bad kind");
}

// The scale-|q| representative whose conditional expectation at any coarser
// cell p is wick_power(kind, k, |p|): the same polynomial family.
inline Poly1<Rat> renormalized_power(NoiseKind kind, long k, const Rat& vol) {
  return wick_power(kind, k, vol);
}

// The defining route: n factors placed in pairwise distinct children with
// the given volumes (sum <= parent; the rest is the empty child), then
// conditioned back to the parent scale.
inline Poly1<Rat> wick_power_via_placement(NoiseKind kind, long n, const Rat& parent_vol,
                                           const std::vector<Rat>& child_vols) {
  if (static_cast<long>(child_vols.size()) != n)
    throw std::invalid_argument("wick_power_via_placement: need one child per factor");
  if (n == 0) return Poly1<Rat>::constant(Rat(1));
  MonomialSpec spec{std::vector<long>(static_cast<std::size_t>(n), 1), child_vols, parent_vol};
  return cond_exp_closed(kind, spec);
}

// Equal-volume default placement: n factors in n+1 children of volume |p|/(n+1).
inline Poly1<Rat> wick_power_via_placement(NoiseKind kind, long n, const Rat& parent_vol) {
  std::vector<Rat> vols(static_cast<std::size_t>(n), Rat(parent_vol / Rat(n + 1)));
  return wick_power_via_placement(kind, n, parent_vol, vols);
}

// Max coefficient-wise difference of the placement route across strategies
// and against the closed form; exactly 0 when the Wick product is
// placement-independent.
inline Rat wick_product_independence_check(NoiseKind kind, long n, const Rat& parent_vol,
                                           const std::vector<std::vector<Rat>>& placements) {
  Poly1<Rat> reference = wick_power(kind, n, parent_vol);
  Rat worst(0);
  for (const auto& vols : placements) {
    Poly1<Rat> p = wick_power_via_placement(kind, n, parent_vol, vols);
    for (int i = 0; i <= std::max(p.degree(), reference.degree()); ++i) {
      Rat d = p.coeff(i) - reference.coeff(i);
      if (d < 0) d = -d;
      if (d > worst) worst = d;
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Effective Wick polynomials over a partition
// ---------------------------------------------------------------------------

// Wick product of field evaluations x_{p_1} <> ... <> x_{p_n} (cells listed
// with repetition) as an ordinary polynomial over the cells of P. Factors
// on distinct cells multiply; repeated cells become Wick powers via the
// placement route.
inline MultiPoly<Rat> wick_product_eval(NoiseKind kind, const Partition& p,
                                        const std::vector<Cell>& factors) {
  long degree = static_cast<long>(factors.size());
  if (degree > 8) throw std::invalid_argument("wick_product_eval: total degree above 8");
  std::map<std::int64_t, long> multiplicity;
  for (const Cell& c : factors) ++multiplicity[cell_index(p, c)];
  const int nvars = static_cast<int>(p.cell_count());
  MultiPoly<Rat> out = MultiPoly<Rat>::constant(nvars, Rat(1));
  const Rat vol = cell_volume(p.domain, p.level);
  for (const auto& [cell_idx, mult] : multiplicity) {
    Poly1<Rat> pw = wick_power_via_placement(kind, mult, vol);
    MultiPoly<Rat> factor(nvars);
    for (int d = 0; d <= pw.degree(); ++d) {
      if (pw.coeff(d) == 0) continue;
      MultiPoly<Rat>::Exponents e(static_cast<std::size_t>(nvars), 0);
      e[static_cast<std::size_t>(cell_idx)] = d;
      factor.add_term(std::move(e), pw.coeff(d));
    }
    out = out * factor;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Chaos expansions (kernel side)
// ---------------------------------------------------------------------------

// Symmetric order-k tensor over the cells of a base partition, closed under
// coarsening by block summation.
struct KernelFamily {
  int order = 2;
  Partition base;
  std::vector<double> entries;  // dense, size C^order, row-major

  static KernelFamily zero(int order, const Partition& base) {
    std::size_t size = 1;
    for (int i = 0; i < order; ++i) size *= static_cast<std::size_t>(base.cell_count());
    return KernelFamily{order, base, std::vector<double>(size, 0.0)};
  }

  double at(std::span<const long> idx) const {
    return entries[flat_index(idx, base.cell_count())];
  }
  double& at(std::span<const long> idx) {
    return entries[flat_index(idx, base.cell_count())];
  }

  static std::size_t flat_index(std::span<const long> idx, std::int64_t c) {
    std::size_t flat = 0;
    for (long i : idx) flat = flat * static_cast<std::size_t>(c) + static_cast<std::size_t>(i);
    return flat;
  }

  // Block sums over descendant tuples; exact up to accumulation order.
  KernelFamily coarsened(int target_level) const {
    if (target_level > base.level)
      throw std::invalid_argument("KernelFamily::coarsened: target above base level");
    Partition coarse = make_partition(base.domain, target_level);
    KernelFamily out = zero(order, coarse);
    const std::int64_t cf = base.cell_count();
    std::vector<long> idx(static_cast<std::size_t>(order), 0);
    for (std::size_t flat = 0; flat < entries.size(); ++flat) {
      std::size_t rem = flat;
      for (int a = order - 1; a >= 0; --a) {
        idx[static_cast<std::size_t>(a)] = static_cast<long>(rem % static_cast<std::size_t>(cf));
        rem /= static_cast<std::size_t>(cf);
      }
      std::size_t coarse_flat = 0;
      for (int a = 0; a < order; ++a) {
        Cell fine = cell_at(base, idx[static_cast<std::size_t>(a)]);
        coarse_flat = coarse_flat * static_cast<std::size_t>(coarse.cell_count()) +
                      static_cast<std::size_t>(cell_index(coarse, ancestor(fine, target_level)));
      }
      out.entries[coarse_flat] += entries[flat];
    }
    return out;
  }
};

// S(x_p) as a pointwise factor: Gauss -i xi, Poisson e^(-i xi),
// Gamma (1+i xi)^(-1).
inline Complex s_point(NoiseKind kind, double xi) {
  const Complex i(0.0, 1.0);
  switch (kind) {
    case NoiseKind::gauss: return -i * xi;
    case NoiseKind::poisson: return std::exp(-i * xi);
    case NoiseKind::gamma: {
      Complex denom = 1.0 + i * xi;
      if (std::abs(denom) == 0.0) throw std::domain_error("s_point: gamma pole at xi = i");
      return 1.0 / denom;
    }
  }
  throw std::logic_error("s_point: bad kind");
}

// r-th derivative of s_point at 0 (used by cumulants): all three noises
// share s'(0) = -i; they differ from order 2 on.
inline Complex s_point_deriv0(NoiseKind kind, int r) {
  const Complex i(0.0, 1.0);
  switch (kind) {
    case NoiseKind::gauss:
      if (r == 0) return 0.0;
      return r == 1 ? -i : Complex(0.0);
    case NoiseKind::poisson: return std::pow(-i, r);
    case NoiseKind::gamma:
      return std::tgamma(static_cast<double>(r) + 1.0) * std::pow(-i, r);
  }
  throw std::logic_error("s_point_deriv0: bad kind");
}

// A finite chaos expansion sum_k int x^{<> k} d alpha^k over one partition.
struct ChaosExpansion {
  Partition base;
  std::vector<std::vector<double>> kernels;  // kernels[k] has C^k entries

  static ChaosExpansion zero(const Partition& base, int max_order) {
    ChaosExpansion c{base, {}};
    std::size_t size = 1;
    for (int k = 0; k <= max_order; ++k) {
      c.kernels.emplace_back(size, 0.0);
      size *= static_cast<std::size_t>(base.cell_count());
    }
    return c;
  }
};

// S of a chaos expansion: sum_k sum_tuples alpha_(p_1..p_k) prod s(xi_{p_i}).
inline Complex s_transform(NoiseKind kind, const ChaosExpansion& a,
                           const std::vector<double>& xi) {
  const std::int64_t c = a.base.cell_count();
  if (static_cast<std::int64_t>(xi.size()) != c)
    throw std::invalid_argument("s_transform: xi size mismatch");
  std::vector<Complex> s(static_cast<std::size_t>(c));
  for (std::int64_t i = 0; i < c; ++i) s[static_cast<std::size_t>(i)] = s_point(kind, xi[static_cast<std::size_t>(i)]);
  Complex acc = 0.0;
  for (std::size_t k = 0; k < a.kernels.size(); ++k) {
    const auto& ker = a.kernels[k];
    for (std::size_t flat = 0; flat < ker.size(); ++flat) {
      if (ker[flat] == 0.0) continue;
      Complex term = ker[flat];
      std::size_t rem = flat;
      for (std::size_t j = 0; j < k; ++j) {
        term *= s[rem % static_cast<std::size_t>(c)];
        rem /= static_cast<std::size_t>(c);
      }
      acc += term;
    }
  }
  return acc;
}

// Wick product on the kernel side: graded tensor products.
inline ChaosExpansion wick_product(const ChaosExpansion& a, const ChaosExpansion& b) {
  if (!(a.base == b.base)) throw std::invalid_argument("wick_product: base partitions differ");
  const std::size_t c = static_cast<std::size_t>(a.base.cell_count());
  const int ka = static_cast<int>(a.kernels.size()) - 1;
  const int kb = static_cast<int>(b.kernels.size()) - 1;
  ChaosExpansion out = ChaosExpansion::zero(a.base, ka + kb);
  for (int i = 0; i <= ka; ++i)
    for (int j = 0; j <= kb; ++j) {
      const auto& ai = a.kernels[static_cast<std::size_t>(i)];
      const auto& bj = b.kernels[static_cast<std::size_t>(j)];
      auto& dst = out.kernels[static_cast<std::size_t>(i + j)];
      std::size_t stride = 1;
      for (int t = 0; t < j; ++t) stride *= c;
      for (std::size_t fa = 0; fa < ai.size(); ++fa) {
        if (ai[fa] == 0.0) continue;
        for (std::size_t fb = 0; fb < bj.size(); ++fb)
          dst[fa * stride + fb] += ai[fa] * bj[fb];
      }
    }
  return out;
}

// Polynomial representative: each kernel tuple becomes the product of
// per-cell Wick powers of the tuple's multiplicities.
inline MultiPoly<double> chaos_to_polynomial(NoiseKind kind, const ChaosExpansion& a) {
  const std::int64_t c = a.base.cell_count();
  const Rat vol = cell_volume(a.base.domain, a.base.level);
  MultiPoly<double> out(static_cast<int>(c));
  for (std::size_t k = 0; k < a.kernels.size(); ++k) {
    const auto& ker = a.kernels[k];
    for (std::size_t flat = 0; flat < ker.size(); ++flat) {
      if (ker[flat] == 0.0) continue;
      std::map<long, long> mult;
      std::size_t rem = flat;
      for (std::size_t j = 0; j < k; ++j) {
        ++mult[static_cast<long>(rem % static_cast<std::size_t>(c))];
        rem /= static_cast<std::size_t>(c);
      }
      MultiPoly<double> term = MultiPoly<double>::constant(static_cast<int>(c), ker[flat]);
      for (const auto& [cell, m] : mult) {
        Poly1<double> pw = map_coeffs<double>(wick_power(kind, m, vol), to_double);
        MultiPoly<double> factor(static_cast<int>(c));
        for (int d = 0; d <= pw.degree(); ++d) {
          if (pw.coeff(d) == 0.0) continue;
          MultiPoly<double>::Exponents e(static_cast<std::size_t>(c), 0);
          e[static_cast<std::size_t>(cell)] = d;
          factor.add_term(std::move(e), pw.coeff(d));
        }
        term = term * factor;
      }
      out += term;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// T- and S-transforms of polynomial observables
// ---------------------------------------------------------------------------

// T(a)(xi) = E[e^(-i xi x) a(x)] for a polynomial observable; per cell,
// E[x^m e^(-i |p| xi x)] = (i/|p|)^m nu_hat^(m)(xi), so T factorizes.
inline Complex t_transform_closed(NoiseKind kind, const Partition& p,
                                  const MultiPoly<double>& a, const std::vector<double>& xi) {
  const double vol = to_double(cell_volume(p.domain, p.level));
  const Complex i(0.0, 1.0);
  Complex acc = 0.0;
  for (const auto& [exps, coeff] : a.terms()) {
    Complex term = coeff;
    // m = 0 reduces to the bare charfn factor of the cell
    for (std::size_t cidx = 0; cidx < exps.size(); ++cidx) {
      int m = exps[cidx];
      term *= std::pow(i / vol, m) * charfn_deriv(kind, vol, m, xi[cidx]);
    }
    acc += term;
  }
  return acc;
}

inline Complex mu_hat(NoiseKind kind, const Partition& p, const std::vector<double>& xi) {
  const double vol = to_double(cell_volume(p.domain, p.level));
  Complex acc = 1.0;
  for (double x : xi) acc *= charfn(kind, vol, x);
  return acc;
}

// S(a) = T(a)/mu_hat, computed cellwise as derivative ratios for stability.
inline Complex s_from_polynomial(NoiseKind kind, const Partition& p, const MultiPoly<double>& a,
                                 const std::vector<double>& xi) {
  const double vol = to_double(cell_volume(p.domain, p.level));
  const Complex i(0.0, 1.0);
  Complex acc = 0.0;
  for (const auto& [exps, coeff] : a.terms()) {
    Complex term = coeff;
    for (std::size_t cidx = 0; cidx < exps.size(); ++cidx) {
      int m = exps[cidx];
      if (m == 0) continue;
      term *= std::pow(i / vol, m) * charfn_deriv(kind, vol, m, xi[cidx]) /
              charfn(kind, vol, xi[cidx]);
    }
    acc += term;
  }
  return acc;
}

struct McEstimate {
  Complex value;
  double se = 0.0;  // combined standard error of both components
  long samples = 0;
};

// Monte Carlo estimate of T(a)(xi).
inline McEstimate t_transform_mc(NoiseKind kind, const Partition& p, const MultiPoly<double>& a,
                                 const std::vector<double>& xi, std::uint64_t seed,
                                 long n_samples) {
  const double vol = to_double(cell_volume(p.domain, p.level));
  const Complex i(0.0, 1.0);
  Complex sum = 0.0;
  double sum_re2 = 0.0, sum_im2 = 0.0;
  for (long rep = 0; rep < n_samples; ++rep) {
    Field<double> f = sample_field(p, kind, seed, static_cast<std::uint64_t>(rep));
    double pairing = 0.0;
    for (std::size_t c = 0; c < f.values.size(); ++c) pairing += vol * xi[c] * f.values[c];
    Complex v = std::exp(-i * pairing) * a.eval(std::vector<Complex>(f.values.begin(), f.values.end()));
    sum += v;
    sum_re2 += v.real() * v.real();
    sum_im2 += v.imag() * v.imag();
  }
  McEstimate out;
  out.samples = n_samples;
  out.value = sum / static_cast<double>(n_samples);
  double var_re = sum_re2 / n_samples - out.value.real() * out.value.real();
  double var_im = sum_im2 / n_samples - out.value.imag() * out.value.imag();
  out.se = std::sqrt(std::max(var_re + var_im, 0.0) / static_cast<double>(n_samples));
  return out;
}

// ---------------------------------------------------------------------------
// Models and the Wick exponential
// ---------------------------------------------------------------------------

// Reference noise plus chaos kernels alpha^2 (and optionally alpha^4);
// phi(xi) = mu_hat(xi) exp(Sa(xi)) at every scale.
struct ModelSpec {
  NoiseKind kind = NoiseKind::gauss;
  KernelFamily alpha2;            // order 2
  KernelFamily alpha4;            // order 4; entries empty when absent
  int subgrid = 1;                // sites per cell edge used to build kernels

  bool has_quartic() const { return !alpha4.entries.empty(); }
  const Partition& base() const { return alpha2.base; }
};

// Sa at the base or any coarser scale (kernels coarsen by block sums).
inline Complex s_transform_model(const ModelSpec& m, int level, const std::vector<double>& xi) {
  const Partition p = make_partition(m.base().domain, level);
  if (static_cast<std::int64_t>(xi.size()) != p.cell_count())
    throw std::invalid_argument("s_transform_model: xi size mismatch");
  std::vector<Complex> s(xi.size());
  for (std::size_t i = 0; i < xi.size(); ++i) s[i] = s_point(m.kind, xi[i]);
  const KernelFamily a2 = level == m.base().level ? m.alpha2 : m.alpha2.coarsened(level);
  const std::int64_t c = p.cell_count();
  Complex acc = 0.0;
  for (std::int64_t i = 0; i < c; ++i)
    for (std::int64_t j = 0; j < c; ++j)
      acc += a2.entries[static_cast<std::size_t>(i * c + j)] * s[static_cast<std::size_t>(i)] *
             s[static_cast<std::size_t>(j)];
  if (m.has_quartic()) {
    const KernelFamily a4 = level == m.base().level ? m.alpha4 : m.alpha4.coarsened(level);
    const auto& k4 = a4.entries;
    for (std::size_t flat = 0; flat < k4.size(); ++flat) {
      if (k4[flat] == 0.0) continue;
      Complex term = k4[flat];
      std::size_t rem = flat;
      for (int t = 0; t < 4; ++t) {
        term *= s[rem % static_cast<std::size_t>(c)];
        rem /= static_cast<std::size_t>(c);
      }
      acc += term;
    }
  }
  return acc;
}

// phi(xi) = mu_hat(xi) e^{Sa(xi)} at the requested scale.
inline Complex phi_model(const ModelSpec& m, int level, const std::vector<double>& xi) {
  const Partition p = make_partition(m.base().domain, level);
  return mu_hat(m.kind, p, xi) * std::exp(s_transform_model(m, level, xi));
}

// Wick exponential closure; construction probes Re(Sa) for boundedness.
inline std::function<Complex(int, const std::vector<double>&)> wick_exp(const ModelSpec& m) {
  RngStream rng(1717, 0);
  const std::size_t c = static_cast<std::size_t>(m.base().cell_count());
  for (int probe = 0; probe < 200; ++probe) {
    std::vector<double> xi(c);
    double scale = std::pow(10.0, -1.0 + 3.0 * rng.uniform());
    for (double& v : xi) v = scale * rng.normal();
    Complex sa = s_transform_model(m, m.base().level, xi);
    if (sa.real() > 50.0)
      throw std::runtime_error("wick_exp: Sa unbounded above on probe grid");
  }
  return [m](int level, const std::vector<double>& xi) { return phi_model(m, level, xi); };
}

// Injects a coarse dual field into a finer scale: (iota xi)_q = xi_{parent(q)}.
inline std::vector<double> inject_dual(const Domain& dom, int coarse_level, int fine_level,
                                       const std::vector<double>& xi_coarse) {
  Partition coarse = make_partition(dom, coarse_level);
  Partition fine = make_partition(dom, fine_level);
  std::vector<double> out(static_cast<std::size_t>(fine.cell_count()));
  for (std::int64_t i = 0; i < fine.cell_count(); ++i) {
    Cell q = cell_at(fine, i);
    out[static_cast<std::size_t>(i)] =
        xi_coarse[static_cast<std::size_t>(cell_index(coarse, ancestor(q, coarse_level)))];
  }
  return out;
}

}  // namespace wicklab
