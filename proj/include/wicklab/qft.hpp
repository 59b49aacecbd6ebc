#pragma once

// Constructive-QFT layer on the dyadic torus: discrete propagator, free-field
// and quartic chaos kernels, connected n-point functions, and the two
// positivity checks (reflection-positivity Gram matrices, complete
// monotonicity of the Laplace-domain factor).

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "wicklab/exact.hpp"
#include "wicklab/lattice.hpp"
#include "wicklab/noise.hpp"
#include "wicklab/poly.hpp"
#include "wicklab/rng.hpp"
#include "wicklab/wick.hpp"

namespace wicklab {

// ---------------------------------------------------------------------------
// Discrete Green matrix
// ---------------------------------------------------------------------------

struct GreenMatrix {
  Domain domain;
  int n_per_axis = 1;
  double mass = 1.0;
  Eigen::MatrixXd g;  // (mass^2 - lap_h)^{-1}, dense over N^d sites

  double h() const { return to_double(domain.side) / n_per_axis; }
  std::int64_t site_count() const { return g.rows(); }
};

namespace detail {

inline std::int64_t pow_int(std::int64_t base, int e) {
  std::int64_t out = 1;
  for (int i = 0; i < e; ++i) out *= base;
  return out;
}

inline std::vector<int> site_coords(std::int64_t idx, int dim, int n) {
  std::vector<int> c(static_cast<std::size_t>(dim));
  for (int a = dim - 1; a >= 0; --a) {
    c[static_cast<std::size_t>(a)] = static_cast<int>(idx % n);
    idx /= n;
  }
  return c;
}

inline std::int64_t site_index(const std::vector<int>& c, int n) {
  std::int64_t idx = 0;
  for (int x : c) idx = idx * n + x;
  return idx;
}

}  // namespace detail

// G = (mass^2 I - lap_h)^{-1} with the (2d+1)-point periodic stencil.
inline GreenMatrix discrete_green(const Domain& domain, int n_per_axis, double mass = 1.0) {
  validate_domain(domain);
  if (n_per_axis < 1) throw std::invalid_argument("discrete_green: need at least one site");
  const std::int64_t sites = detail::pow_int(n_per_axis, domain.dim);
  if (sites > 4096) throw std::invalid_argument("discrete_green: dense solver capped at 4096 sites");
  const double h = to_double(domain.side) / n_per_axis;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(sites, sites);
  for (std::int64_t i = 0; i < sites; ++i) {
    std::vector<int> c = detail::site_coords(i, domain.dim, n_per_axis);
    a(i, i) += mass * mass;
    for (int axis = 0; axis < domain.dim; ++axis) {
      for (int dir : {-1, 1}) {
        std::vector<int> nb = c;
        nb[static_cast<std::size_t>(axis)] =
            (nb[static_cast<std::size_t>(axis)] + dir + n_per_axis) % n_per_axis;
        a(i, detail::site_index(nb, n_per_axis)) -= 1.0 / (h * h);
        a(i, i) += 1.0 / (h * h);
      }
    }
  }
  GreenMatrix out{domain, n_per_axis, mass, {}};
  out.g = a.llt().solve(Eigen::MatrixXd::Identity(sites, sites));
  return out;
}

// ||(mass^2 - lap_h) G - I||_inf, recomputed from scratch.
inline double green_residual(const GreenMatrix& green) {
  const std::int64_t sites = green.site_count();
  const double h2 = green.h() * green.h();
  Eigen::MatrixXd r = -Eigen::MatrixXd::Identity(sites, sites);
  for (std::int64_t i = 0; i < sites; ++i) {
    std::vector<int> c = detail::site_coords(i, green.domain.dim, green.n_per_axis);
    r.row(i) += green.mass * green.mass * green.g.row(i);
    for (int axis = 0; axis < green.domain.dim; ++axis)
      for (int dir : {-1, 1}) {
        std::vector<int> nb = c;
        nb[static_cast<std::size_t>(axis)] =
            (nb[static_cast<std::size_t>(axis)] + dir + green.n_per_axis) % green.n_per_axis;
        r.row(i) +=
            (green.g.row(i) - green.g.row(detail::site_index(nb, green.n_per_axis))) / h2;
      }
  }
  return r.cwiseAbs().maxCoeff();
}

// Site -> cell indicator matrix M (sites x cells) for a partition refined
// r-fold per axis.
inline Eigen::MatrixXd cell_indicators(const Partition& p, int subgrid) {
  if (subgrid < 1) throw std::invalid_argument("cell_indicators: subgrid must be >= 1");
  const int n = static_cast<int>(p.cells_per_axis()) * subgrid;
  const std::int64_t sites = detail::pow_int(n, p.domain.dim);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(sites, p.cell_count());
  for (std::int64_t i = 0; i < sites; ++i) {
    std::vector<int> c = detail::site_coords(i, p.domain.dim, n);
    Cell cell{p.level, std::vector<std::int64_t>(c.size())};
    for (std::size_t a = 0; a < c.size(); ++a) cell.coords[a] = c[a] / subgrid;
    m(i, cell_index(p, cell)) = 1.0;
  }
  return m;
}

// ---------------------------------------------------------------------------
// Chaos kernels of the free field and the quartic interaction
// ---------------------------------------------------------------------------

// alpha_{p1 p2} = (1/2) <1_{p1}, G 1_{p2}> = (1/2) h^d (M^T G M)_{p1 p2}.
inline KernelFamily propagator_kernel(const GreenMatrix& green, const Partition& p, int subgrid) {
  Eigen::MatrixXd m = cell_indicators(p, subgrid);
  if (m.rows() != green.site_count())
    throw std::invalid_argument("propagator_kernel: green matrix resolution mismatch");
  const double hd = std::pow(green.h(), green.domain.dim);
  Eigen::MatrixXd alpha = 0.5 * hd * m.transpose() * green.g * m;
  KernelFamily out = KernelFamily::zero(2, p);
  const std::int64_t c = p.cell_count();
  for (std::int64_t i = 0; i < c; ++i)
    for (std::int64_t j = 0; j < c; ++j)
      out.entries[static_cast<std::size_t>(i * c + j)] = alpha(i, j);
  return out;
}

// alpha_{p1..p4} = -h^d sum_m prod_i (G 1_{p_i})(m); entries <= 0.
inline KernelFamily quartic_kernel(const GreenMatrix& green, const Partition& p, int subgrid) {
  Eigen::MatrixXd m = cell_indicators(p, subgrid);
  if (m.rows() != green.site_count())
    throw std::invalid_argument("quartic_kernel: green matrix resolution mismatch");
  const double hd = std::pow(green.h(), green.domain.dim);
  Eigen::MatrixXd u = green.g * m;  // sites x cells, columns are smeared indicators
  const std::int64_t c = p.cell_count();
  KernelFamily out = KernelFamily::zero(4, p);
  for (std::int64_t a = 0; a < c; ++a)
    for (std::int64_t b = a; b < c; ++b)
      for (std::int64_t e = b; e < c; ++e)
        for (std::int64_t f = e; f < c; ++f) {
          double acc = 0.0;
          for (std::int64_t s = 0; s < u.rows(); ++s)
            acc += u(s, a) * u(s, b) * u(s, e) * u(s, f);
          double val = -hd * acc;
          // fill all distinct permutations of (a,b,e,f)
          std::array<std::int64_t, 4> idx{a, b, e, f};
          std::sort(idx.begin(), idx.end());
          do {
            std::size_t flat = 0;
            for (std::int64_t x : idx)
              flat = flat * static_cast<std::size_t>(c) + static_cast<std::size_t>(x);
            out.entries[flat] = val;
          } while (std::next_permutation(idx.begin(), idx.end()));
        }
  return out;
}

// Free-field model: reference noise plus the propagator kernel.
inline ModelSpec build_free_field_model(NoiseKind kind, const Domain& domain, int level,
                                        int subgrid) {
  Partition p = make_partition(domain, level);
  GreenMatrix green = discrete_green(domain, static_cast<int>(p.cells_per_axis()) * subgrid);
  return ModelSpec{kind, propagator_kernel(green, p, subgrid), KernelFamily{4, p, {}}, subgrid};
}

// Quartic model: Gauss reference, propagator kernel, negative order-4 kernel.
inline ModelSpec build_quartic_model(const Domain& domain, int level, int subgrid) {
  Partition p = make_partition(domain, level);
  GreenMatrix green = discrete_green(domain, static_cast<int>(p.cells_per_axis()) * subgrid);
  return ModelSpec{NoiseKind::gauss, propagator_kernel(green, p, subgrid),
                   quartic_kernel(green, p, subgrid), subgrid};
}

// ---------------------------------------------------------------------------
// Quartic Sa check: tensor contraction vs direct site integral
// ---------------------------------------------------------------------------

struct QuarticCheckResult {
  double max_value = -std::numeric_limits<double>::infinity();  // max quartic Sa over probes
  double max_route_diff = 0.0;  // contraction vs -h^d sum (G xi-smear)^4
  double value_at_zero = 0.0;
};

inline QuarticCheckResult quartic_s_check(const ModelSpec& model, long n_samples,
                                          std::uint64_t seed) {
  if (!model.has_quartic()) throw std::invalid_argument("quartic_s_check: model has no alpha4");
  if (model.kind != NoiseKind::gauss)
    throw std::invalid_argument("quartic_s_check: quartic models use the gauss reference");
  const Partition& p = model.base();
  const std::int64_t c = p.cell_count();
  GreenMatrix green =
      discrete_green(p.domain, static_cast<int>(p.cells_per_axis()) * model.subgrid);
  Eigen::MatrixXd m = cell_indicators(p, model.subgrid);
  const double hd = std::pow(green.h(), green.domain.dim);

  QuarticCheckResult out;
  RngStream rng(seed, 0);
  for (long rep = 0; rep < n_samples; ++rep) {
    Eigen::VectorXd xi(c);
    for (std::int64_t i = 0; i < c; ++i) xi(i) = rng.normal();
    // route 1: full tensor contraction
    double contraction = 0.0;
    const auto& k4 = model.alpha4.entries;
    for (std::size_t flat = 0; flat < k4.size(); ++flat) {
      if (k4[flat] == 0.0) continue;
      double term = k4[flat];
      std::size_t rem = flat;
      for (int t = 0; t < 4; ++t) {
        term *= xi(static_cast<std::int64_t>(rem % static_cast<std::size_t>(c)));
        rem /= static_cast<std::size_t>(c);
      }
      contraction += term;
    }
    // route 2: -h^d sum_m u(m)^4 with u = G (sum_p xi_p 1_p)
    Eigen::VectorXd u = green.g * (m * xi);
    double direct = -hd * u.array().pow(4).sum();
    out.max_value = std::max(out.max_value, contraction);
    out.max_route_diff = std::max(out.max_route_diff, std::abs(contraction - direct));
  }
  std::vector<double> zero(static_cast<std::size_t>(c), 0.0);
  out.value_at_zero = s_transform_model(model, p.level, zero).real();
  return out;
}

// ---------------------------------------------------------------------------
// Connected cumulants
// ---------------------------------------------------------------------------

// Mixed derivative prod_i (i/|p_i|) d/dxi_{p_i} of log phi at xi = 0, for
// pairwise distinct cells. The reference factor log mu_hat is diagonal and
// drops out; each chaos kernel of order k contributes
// (k)_m s'(0)^m s(0)^(k-m) sum_free alpha[p_1..p_m, free...].
inline double connected_cumulant(const ModelSpec& model, const std::vector<long>& cells) {
  const std::size_t m = cells.size();
  if (m != 2 && m != 4)
    throw std::invalid_argument("connected_cumulant: need 2 or 4 distinct cells");
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      if (cells[i] == cells[j])
        throw std::invalid_argument("connected_cumulant: cells must be pairwise distinct");
  const Partition& p = model.base();
  const std::int64_t c = p.cell_count();
  for (long idx : cells)
    if (idx < 0 || idx >= c) throw std::invalid_argument("connected_cumulant: cell out of range");
  const double vol = to_double(cell_volume(p.domain, p.level));

  const Complex sp1 = s_point_deriv0(model.kind, 1);
  const Complex sp0 = s_point_deriv0(model.kind, 0);

  Complex d = 0.0;
  if (m == 2) {
    // order-2 kernel: (2)_2 = 2 assignments
    double sum2 = model.alpha2.entries[static_cast<std::size_t>(cells[0] * c + cells[1])];
    d += 2.0 * sp1 * sp1 * sum2;
    if (model.has_quartic()) {
      // order-4 kernel with two slots hit: (4)_2 = 12 arrangements
      double acc = 0.0;
      for (std::int64_t a = 0; a < c; ++a)
        for (std::int64_t b = 0; b < c; ++b) {
          std::array<long, 4> idx{cells[0], cells[1], static_cast<long>(a),
                                  static_cast<long>(b)};
          acc += model.alpha4.at(std::span<const long>(idx));
        }
      d += 12.0 * sp1 * sp1 * sp0 * sp0 * acc;
    }
  } else {
    if (model.has_quartic()) {
      std::array<long, 4> idx{cells[0], cells[1], cells[2], cells[3]};
      d += 24.0 * sp1 * sp1 * sp1 * sp1 * model.alpha4.at(std::span<const long>(idx));
    }
    // the order-2 kernel cannot absorb four derivatives at distinct cells
  }
  Complex pref = std::pow(Complex(0.0, 1.0), static_cast<int>(m)) /
                 std::pow(vol, static_cast<int>(m));
  Complex out = pref * d;
  if (std::abs(out.imag()) > 1e-12 * std::max(1.0, std::abs(out.real())))
    throw std::logic_error("connected_cumulant: nonreal cumulant");
  return out.real();
}

// ---------------------------------------------------------------------------
// Reflection positivity (Gaussian models)
// ---------------------------------------------------------------------------

struct RpGramResult {
  Eigen::MatrixXd gram;
  double min_eigenvalue = 0.0;
  long basis_size = 0;
};

namespace detail {

// E[prod x_i^{e_i}] for centered Gaussians with covariance cov, by the
// pairing recursion.
inline double gaussian_moment(std::vector<int>& e, const Eigen::MatrixXd& cov,
                              std::map<std::vector<int>, double>& memo) {
  long total = 0;
  for (int x : e) total += x;
  if (total == 0) return 1.0;
  if (total % 2 == 1) return 0.0;
  auto it = memo.find(e);
  if (it != memo.end()) return it->second;
  std::size_t a = 0;
  while (e[a] == 0) ++a;
  std::vector<int> rest = e;
  --rest[a];
  double acc = 0.0;
  for (std::size_t b = 0; b < e.size(); ++b) {
    if (rest[b] == 0) continue;
    std::vector<int> next = rest;
    --next[b];
    acc += rest[b] * cov(static_cast<long>(a), static_cast<long>(b)) *
           gaussian_moment(next, cov, memo);
  }
  memo.emplace(e, acc);
  return acc;
}

inline void enumerate_multisets(const std::vector<long>& items, int max_size,
                                std::vector<std::vector<long>>& out) {
  out.push_back({});
  std::vector<std::vector<long>> frontier = {{}};
  for (int s = 1; s <= max_size; ++s) {
    std::vector<std::vector<long>> next;
    for (const auto& base : frontier) {
      long start = base.empty() ? 0 : base.back();
      for (std::size_t i = static_cast<std::size_t>(start); i < items.size(); ++i) {
        auto grown = base;
        grown.push_back(static_cast<long>(i));
        out.push_back(grown);
        next.push_back(grown);
      }
    }
    frontier = std::move(next);
  }
}

}  // namespace detail

// Builds the Gram matrix E[b theta(b')] over monomials of degree <= D in
// positive-time cells of a Gauss-reference quadratic model, and returns its
// minimum eigenvalue. theta reflects the chosen axis about the mid-plane.
inline RpGramResult rp_gram(const ModelSpec& model, int degree, int time_axis) {
  if (model.kind != NoiseKind::gauss || model.has_quartic())
    throw std::invalid_argument("rp_gram: needs a Gauss reference with quadratic kernel only");
  if (degree < 0 || degree > 2) throw std::invalid_argument("rp_gram: degree must be in [0,2]");
  const Partition& p = model.base();
  if (time_axis < 0 || time_axis >= p.domain.dim)
    throw std::invalid_argument("rp_gram: bad time axis");
  const std::int64_t n = p.cells_per_axis();
  if (n % 2 != 0)
    throw std::invalid_argument(
        "rp_gram: partition must be symmetric under the time reflection (even cell count)");

  const std::int64_t c = p.cell_count();
  const double vol = to_double(cell_volume(p.domain, p.level));

  // model covariance C_ab = delta_ab/|a| + 2 alpha_ab / (|a||b|)
  Eigen::MatrixXd cov(c, c);
  for (std::int64_t a = 0; a < c; ++a)
    for (std::int64_t b = 0; b < c; ++b) {
      double v = 2.0 * model.alpha2.entries[static_cast<std::size_t>(a * c + b)] / (vol * vol);
      if (a == b) v += 1.0 / vol;
      cov(a, b) = v;
    }

  // positive-time cells: axis coordinate < n/2
  std::vector<long> positive;
  std::vector<long> reflected(static_cast<std::size_t>(c));
  for (std::int64_t i = 0; i < c; ++i) {
    Cell cell = cell_at(p, i);
    if (cell.coords[static_cast<std::size_t>(time_axis)] < n / 2) positive.push_back(i);
    Cell mirror = cell;
    mirror.coords[static_cast<std::size_t>(time_axis)] =
        n - 1 - mirror.coords[static_cast<std::size_t>(time_axis)];
    reflected[static_cast<std::size_t>(i)] = cell_index(p, mirror);
  }

  std::vector<std::vector<long>> basis;  // multisets of indices into `positive`
  detail::enumerate_multisets(positive, degree, basis);

  const long nb = static_cast<long>(basis.size());
  Eigen::MatrixXd gram(nb, nb);
  std::map<std::vector<int>, double> memo;
  for (long i = 0; i < nb; ++i)
    for (long j = 0; j < nb; ++j) {
      std::vector<int> expo(static_cast<std::size_t>(c), 0);
      for (long pos : basis[static_cast<std::size_t>(i)])
        ++expo[static_cast<std::size_t>(positive[static_cast<std::size_t>(pos)])];
      for (long pos : basis[static_cast<std::size_t>(j)])
        ++expo[static_cast<std::size_t>(
            reflected[static_cast<std::size_t>(positive[static_cast<std::size_t>(pos)])])];
      gram(i, j) = detail::gaussian_moment(expo, cov, memo);
    }

  RpGramResult out;
  out.gram = 0.5 * (gram + gram.transpose());
  out.basis_size = nb;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(out.gram);
  out.min_eigenvalue = eig.eigenvalues().minCoeff();
  return out;
}

// ---------------------------------------------------------------------------
// Complete monotonicity of the Laplace-domain factor
// ---------------------------------------------------------------------------

struct CmCheckResult {
  bool passed = true;
  double min_signed_value = 0.0;  // min over orders and grid of (-1)^|g| D^g / phi_Lb
  long orders_checked = 0;
};

namespace detail {

// d/dxi_q in the u-variables: u' = -u (poisson), u' = -u^2 (gamma).
inline MultiPoly<double> cm_derivative(const MultiPoly<double>& f, long q, int bump) {
  MultiPoly<double> out(f.nvars());
  for (const auto& [e, coeff] : f.terms()) {
    int eq = e[static_cast<std::size_t>(q)];
    if (eq == 0) continue;
    MultiPoly<double>::Exponents ne = e;
    ne[static_cast<std::size_t>(q)] += bump;
    out.add_term(std::move(ne), -static_cast<double>(eq) * coeff);
  }
  return out;
}

}  // namespace detail

// Checks (-1)^|gamma| D^gamma phi_Lb >= 0 on a positive xi-grid for all
// multi-indices with |gamma| <= max_order, where
// phi_Lb = exp(sum alpha_kl u_k u_l), u = e^(-xi) or 1/(1+xi).
inline CmCheckResult cm_check(const ModelSpec& model, int max_order, int grid_points,
                              std::uint64_t seed) {
  if (model.kind != NoiseKind::poisson && model.kind != NoiseKind::gamma)
    throw std::invalid_argument("cm_check: Poisson or Gamma reference required");
  if (model.has_quartic())
    throw std::invalid_argument("cm_check: quadratic models only");
  if (max_order < 1 || max_order > 3)
    throw std::invalid_argument("cm_check: order must be in [1,3]");
  const Partition& p = model.base();
  const std::int64_t c = p.cell_count();
  for (double v : model.alpha2.entries)
    if (v < 0)
      throw std::invalid_argument("cm_check: alpha2 must be entrywise nonnegative");
  const int bump = model.kind == NoiseKind::gamma ? 1 : 0;

  // A(u) = sum alpha_kl u_k u_l
  MultiPoly<double> a_poly(static_cast<int>(c));
  for (std::int64_t i = 0; i < c; ++i)
    for (std::int64_t j = 0; j < c; ++j) {
      double v = model.alpha2.entries[static_cast<std::size_t>(i * c + j)];
      if (v == 0.0) continue;
      MultiPoly<double>::Exponents e(static_cast<std::size_t>(c), 0);
      ++e[static_cast<std::size_t>(i)];
      ++e[static_cast<std::size_t>(j)];
      a_poly.add_term(std::move(e), v);
    }

  // positive xi grid
  RngStream rng(seed, 0);
  std::vector<std::vector<double>> grid;
  for (int g = 0; g < grid_points; ++g) {
    std::vector<double> xi(static_cast<std::size_t>(c));
    for (auto& v : xi) v = std::pow(10.0, -1.5 + 2.5 * rng.uniform());
    grid.push_back(std::move(xi));
  }

  CmCheckResult out;
  out.min_signed_value = std::numeric_limits<double>::infinity();

  // Q along nondecreasing derivative multisets; Q_{gamma+q} = D_q Q + Q D_q A.
  struct Item {
    std::vector<long> gamma;
    MultiPoly<double> q;
  };
  std::vector<Item> frontier;
  frontier.push_back({{}, MultiPoly<double>::constant(static_cast<int>(c), 1.0)});
  for (int order = 1; order <= max_order; ++order) {
    std::vector<Item> next;
    for (const auto& item : frontier) {
      long start = item.gamma.empty() ? 0 : item.gamma.back();
      for (long q = start; q < c; ++q) {
        Item grown;
        grown.gamma = item.gamma;
        grown.gamma.push_back(q);
        grown.q = detail::cm_derivative(item.q, q, bump) +
                  item.q * detail::cm_derivative(a_poly, q, bump);
        // evaluate the signed value on the grid
        const double sign = order % 2 == 0 ? 1.0 : -1.0;
        for (const auto& xi : grid) {
          std::vector<double> u(xi.size());
          for (std::size_t i = 0; i < xi.size(); ++i)
            u[i] = model.kind == NoiseKind::gamma ? 1.0 / (1.0 + xi[i]) : std::exp(-xi[i]);
          double val = sign * grown.q.eval(u);
          out.min_signed_value = std::min(out.min_signed_value, val);
          if (val < -1e-12) out.passed = false;
        }
        ++out.orders_checked;
        next.push_back(std::move(grown));
      }
    }
    frontier = std::move(next);
  }
  return out;
}

}  // namespace wicklab
