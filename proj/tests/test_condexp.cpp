#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>

#include "wicklab/condexp.hpp"
#include "wicklab/rng.hpp"

using namespace wicklab;

namespace {

const NoiseKind kAll[] = {NoiseKind::gauss, NoiseKind::poisson, NoiseKind::gamma};

Rat random_vol(RngStream& rng) {
  long num = 1 + static_cast<long>(rng.next_u32() % 12);
  long den = 1 + static_cast<long>(rng.next_u32() % 8);
  return make_rat(num, den);
}

// Independent third route for equal-volume Poisson monomials: the shifted
// recursion g_k(x) = x sum_l C(k_n-1,l) q^(l-k_n+1) g_{(...,l)}(x - 1/p),
// with all n+1 children of volume q = p/(n+1).
Poly1<Rat> poisson_recursion_oracle(std::vector<long> k, const Rat& q, const Rat& p,
                                    std::map<std::vector<long>, Poly1<Rat>>& memo) {
  while (!k.empty() && k.back() == 0) k.pop_back();
  if (k.empty()) return Poly1<Rat>::constant(Rat(1));
  auto it = memo.find(k);
  if (it != memo.end()) return it->second;
  const long kn = k.back();
  Poly1<Rat> acc;
  for (long l = 0; l <= kn - 1; ++l) {
    std::vector<long> rest = k;
    rest.back() = l;
    Poly1<Rat> g = poisson_recursion_oracle(rest, q, p, memo);
    Rat w = Rat(binomial(kn - 1, l)) * rat_pow(q, l - (kn - 1));
    acc += w * g.shifted(Rat(-Rat(1) / p));
  }
  Poly1<Rat> out = Poly1<Rat>::x() * acc;
  memo.emplace(std::move(k), out);
  return out;
}

// Same idea for Gauss: h_{k+e_n} = x h_k - (1/p) h_k' + k_n (1/q) h_{k-e_n}.
Poly1<Rat> gauss_recursion_oracle(std::vector<long> k, const Rat& q, const Rat& p,
                                  std::map<std::vector<long>, Poly1<Rat>>& memo) {
  while (!k.empty() && k.back() == 0) k.pop_back();
  if (k.empty()) return Poly1<Rat>::constant(Rat(1));
  auto it = memo.find(k);
  if (it != memo.end()) return it->second;
  std::vector<long> down = k;
  --down.back();
  Poly1<Rat> h1 = gauss_recursion_oracle(down, q, p, memo);
  Poly1<Rat> out = Poly1<Rat>::x() * h1 - Rat(Rat(1) / p) * h1.derivative();
  if (k.back() >= 2) {
    std::vector<long> down2 = down;
    --down2.back();
    out += Rat(Rat(k.back() - 1) / q) * gauss_recursion_oracle(down2, q, p, memo);
  }
  memo.emplace(std::move(k), out);
  return out;
}

}  // namespace

TEST_CASE("single factor: E[x_q | x_p] = x_p for every noise") {
  for (NoiseKind kind : kAll) {
    MonomialSpec spec{{1}, {make_rat(1, 3)}, Rat(2)};
    CHECK(cond_exp_closed(kind, spec) == Poly1<Rat>::x());
    CHECK(cond_exp_oracle(kind, spec) == Poly1<Rat>::x());
  }
}

TEST_CASE("spec anchors") {
  const Rat q = make_rat(1, 4), p = Rat(1);
  SUBCASE("poisson, k=2: x/q + x(x - 1/p)") {
    Poly1<Rat> expect{Rat(0), Rat(Rat(1) / q - Rat(1) / p), Rat(1)};
    CHECK(cond_exp_closed(NoiseKind::poisson, {{2}, {q}, p}) == expect);
    CHECK(cond_exp_oracle(NoiseKind::poisson, {{2}, {q}, p}) == expect);
  }
  SUBCASE("gauss, k=2: x^2 + 1/q - 1/p") {
    Poly1<Rat> expect{Rat(Rat(1) / q - Rat(1) / p), Rat(0), Rat(1)};
    CHECK(cond_exp_closed(NoiseKind::gauss, {{2}, {q}, p}) == expect);
    CHECK(cond_exp_oracle(NoiseKind::gauss, {{2}, {q}, p}) == expect);
  }
  SUBCASE("gamma, two factors: (p/(p+1)) x^2") {
    MonomialSpec spec{{1, 1}, {make_rat(1, 3), make_rat(1, 2)}, p};
    Poly1<Rat> expect = Poly1<Rat>::monomial(2, Rat(p / (p + 1)));
    CHECK(cond_exp_closed(NoiseKind::gamma, spec) == expect);
    CHECK(cond_exp_oracle(NoiseKind::gamma, spec) == expect);
  }
  SUBCASE("poisson, two factors: x(x - 1/p)") {
    MonomialSpec spec{{1, 1}, {make_rat(1, 3), make_rat(1, 2)}, p};
    Poly1<Rat> expect{Rat(0), Rat(-Rat(1) / p), Rat(1)};
    CHECK(cond_exp_closed(NoiseKind::poisson, spec) == expect);
    CHECK(cond_exp_oracle(NoiseKind::poisson, spec) == expect);
  }
  SUBCASE("gauss, two factors: x^2 - 1/p") {
    MonomialSpec spec{{1, 1}, {make_rat(1, 3), make_rat(1, 2)}, p};
    Poly1<Rat> expect{Rat(-Rat(1) / p), Rat(0), Rat(1)};
    CHECK(cond_exp_closed(NoiseKind::gauss, spec) == expect);
    CHECK(cond_exp_oracle(NoiseKind::gauss, spec) == expect);
  }
}

TEST_CASE("oracle equivalence over random volume configurations") {
  // For each noise, >= 50 random (volumes, exponents) with n <= 3 and
  // total degree <= 6; closed form and conditional-law oracle must agree
  // as exact polynomials.
  RngStream rng(5150, 0);
  for (NoiseKind kind : kAll) {
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
        Rat v = random_vol(rng);
        vols.push_back(v);
        sum += v;
      }
      Rat deficit = (rng.next_u32() % 3 == 0) ? Rat(0) : random_vol(rng);
      MonomialSpec spec{exps, vols, Rat(sum + deficit)};
      CAPTURE(noise_name(kind));
      CHECK(cond_exp_closed(kind, spec) == cond_exp_oracle(kind, spec));
      ++done;
    }
  }
}

TEST_CASE("equal-volume recursion oracles (third route)") {
  // Exponent vectors over n children of equal volume p/(n+1).
  const Rat p = make_rat(3, 2);
  std::vector<std::vector<long>> cases = {{1}, {2}, {3}, {1, 1}, {2, 1}, {2, 2}, {1, 1, 1}, {3, 2}};
  for (const auto& k : cases) {
    const long n = static_cast<long>(k.size());
    const Rat q = Rat(p / Rat(n + 1));
    MonomialSpec spec{k, std::vector<Rat>(k.size(), q), p};
    {
      std::map<std::vector<long>, Poly1<Rat>> memo;
      CHECK(cond_exp_closed(NoiseKind::poisson, spec) ==
            poisson_recursion_oracle(k, q, p, memo));
    }
    {
      std::map<std::vector<long>, Poly1<Rat>> memo;
      CHECK(cond_exp_closed(NoiseKind::gauss, spec) == gauss_recursion_oracle(k, q, p, memo));
    }
  }
}

TEST_CASE("tower property: two coarsening steps equal one") {
  const Rat q = make_rat(1, 5), m = make_rat(2, 3), p = Rat(2);
  for (NoiseKind kind : kAll) {
    for (long k = 1; k <= 4; ++k) {
      Poly1<Rat> inner = cond_exp_closed(kind, {{k}, {q}, m});
      Poly1<Rat> two_step = cond_exp_poly(kind, inner, m, p);
      Poly1<Rat> one_step = cond_exp_closed(kind, {{k}, {q}, p});
      CHECK(two_step == one_step);
    }
    SUBCASE("two cells inside the intermediate cell") {
      MonomialSpec fine{{2, 1}, {make_rat(1, 6), make_rat(1, 4)}, m};
      Poly1<Rat> inner = cond_exp_closed(kind, fine);
      Poly1<Rat> two_step = cond_exp_poly(kind, inner, m, p);
      Poly1<Rat> one_step =
          cond_exp_closed(kind, {{2, 1}, {make_rat(1, 6), make_rat(1, 4)}, p});
      CHECK(two_step == one_step);
    }
  }
}

TEST_CASE("degree preservation and leading behavior") {
  for (NoiseKind kind : kAll) {
    MonomialSpec spec{{2, 3}, {make_rat(1, 3), make_rat(1, 7)}, Rat(1)};
    Poly1<Rat> e = cond_exp_closed(kind, spec);
    CHECK(e.degree() == 5);
    if (kind != NoiseKind::gamma) CHECK(e.coeff(5) == Rat(1));  // monic normalizations
  }
}

TEST_CASE("argument validation") {
  CHECK_THROWS_AS(cond_exp_closed(NoiseKind::gauss, {{1}, {Rat(2)}, Rat(1)}),
                  std::invalid_argument);  // volumes exceed parent
  CHECK_THROWS_AS(cond_exp_closed(NoiseKind::gauss, {{-1}, {Rat(1)}, Rat(2)}),
                  std::invalid_argument);
  CHECK_THROWS_AS(cond_exp_closed(NoiseKind::gauss, {{9}, {Rat(1)}, Rat(2)}),
                  std::invalid_argument);  // degree budget
}

TEST_CASE("monte carlo martingale check (smoke)") {
  // a_Q = x_q against a_P = E[x_q | x_p] = x_p, and a_Q = x_q^2 against its
  // closed-form conditional expectation; distributional validation of the
  // closed pipeline against the sampler.
  const Rat p = Rat(1);
  const long n_children = 2;
  const Rat q = Rat(p / Rat(n_children));
  for (NoiseKind kind : kAll) {
    auto a_fine_x = Poly1<double>{0.0, 1.0};
    auto a_coarse_x = Poly1<double>{0.0, 1.0};
    auto res = martingale_mc(kind, p, n_children, a_fine_x, a_coarse_x, 321, 20000);
    CHECK(res.used_bins >= 1);
    CHECK(res.max_abs_z <= 5.0);

    Poly1<Rat> e2 = cond_exp_closed(kind, {{2}, {q}, p});
    auto a_fine = Poly1<double>{0.0, 0.0, 1.0};
    auto a_coarse = map_coeffs<double>(e2, to_double);
    auto res2 = martingale_mc(kind, p, n_children, a_fine, a_coarse, 322, 20000);
    CHECK(res2.max_abs_z <= 5.0);
  }
  SUBCASE("constant observable has exactly zero discrepancy") {
    auto c = Poly1<double>{3.25};
    auto res = martingale_mc(NoiseKind::gauss, p, 2, c, c, 5, 2000);
    CHECK(res.max_abs_z == 0.0);
  }
}
