#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "wicklab/combinat.hpp"

using namespace wicklab;

TEST_CASE("stirling numbers of the second kind") {
  CHECK(stirling2(0, 0) == 1);
  CHECK(stirling2(3, 2) == 3);
  CHECK(stirling2(4, 2) == 7);
  CHECK(stirling2(5, 3) == 25);
  for (long k = 0; k <= 20; ++k) CHECK(stirling2(k, k) == 1);
  CHECK(stirling2(4, 5) == 0);
  CHECK_THROWS_AS(stirling2(65, 1), std::invalid_argument);
}

TEST_CASE("signed stirling numbers of the first kind") {
  CHECK(stirling1_signed(2, 1) == -1);
  CHECK(stirling1_signed(4, 2) == 11);
  CHECK(stirling1_signed(3, 1) == 2);
  for (long k = 0; k <= 20; ++k) CHECK(stirling1_signed(k, k) == 1);
}

TEST_CASE("stirling inversion: sum_j {k,j} s(j,l) = delta_kl") {
  for (long k = 0; k <= 20; ++k)
    for (long l = 0; l <= 20; ++l) {
      Int acc(0);
      for (long j = 0; j <= k; ++j) acc += stirling2(k, j) * stirling1_signed(j, l);
      CHECK(acc == (k == l ? 1 : 0));
    }
}

TEST_CASE("stirling sum identity") {
  CHECK(stirling_identity_check(0));
  // k=3, l=2 by hand: lhs 2*3 = 6, rhs C(3,1)(-1){2,2} + C(3,2){3,2} = -3 + 9 = 6.
  for (long k = 0; k <= 15; ++k) CHECK(stirling_identity_check(k));
}

TEST_CASE("falling factorial polynomials") {
  CHECK(falling_factorial(0, Rat(3)) == Poly1<Rat>::constant(Rat(1)));
  // (x)_{2,a} = x(x - 1/a)
  Rat a = make_rat(1, 4);
  Poly1<Rat> f2 = falling_factorial(2, a);
  CHECK(f2 == Poly1<Rat>{Rat(0), -Rat(1) / a, Rat(1)});
  // (x)_{3,1} = x(x-1)(x-2) = x^3 - 3x^2 + 2x
  Poly1<Rat> f3 = falling_factorial(3, Rat(1));
  CHECK(f3 == Poly1<Rat>{Rat(0), Rat(2), Rat(-3), Rat(1)});
}

TEST_CASE("falling factorial / stirling bridge: (ax)_s = sum_l s(s,l) (ax)^l") {
  for (long s = 0; s <= 8; ++s) {
    for (const Rat& a : {make_rat(1, 3), make_rat(7, 2), Rat(1)}) {
      for (long xi = -3; xi <= 3; ++xi) {
        Rat x(xi);
        Rat lhs = rat_pow(a, s) * falling_factorial(s, a).eval(x);  // (ax)_s
        Rat rhs(0);
        for (long l = 0; l <= s; ++l) rhs += Rat(stirling1_signed(s, l)) * rat_pow(a * x, l);
        CHECK(lhs == rhs);
      }
    }
  }
}

TEST_CASE("variance hermite polynomials") {
  Rat v = make_rat(1, 4);
  CHECK(hermite_var(0, v) == Poly1<Rat>::constant(Rat(1)));
  CHECK(hermite_var(1, v) == Poly1<Rat>::x());
  CHECK(hermite_var(2, v) == Poly1<Rat>{-v, Rat(0), Rat(1)});
  CHECK(hermite_var(3, v) == Poly1<Rat>{Rat(0), Rat(-3) * v, Rat(0), Rat(1)});

  SUBCASE("three-term value recursion H_{n+1} = x H_n - v n H_{n-1}") {
    for (long n = 1; n <= 8; ++n) {
      Poly1<Rat> lhs = hermite_var(n + 1, v);
      Poly1<Rat> rhs = Poly1<Rat>::x() * hermite_var(n, v) -
                       Rat(v * Rat(n)) * hermite_var(n - 1, v);
      CHECK(lhs == rhs);
    }
  }

  SUBCASE("mean zero under N(0,v) by Gauss-Hermite style quadrature") {
    // E H_n(X) = 0 for n >= 1; 40-point midpoint quadrature over +-12 sigma
    // is far below the 1e-10 gate for these degrees.
    double vd = 0.25, sd = std::sqrt(vd);
    for (long n = 1; n <= 6; ++n) {
      Poly1<double> h = map_coeffs<double>(hermite_var(n, v), to_double);
      double acc = 0.0;
      int grid = 4000;
      for (int i = 0; i < grid; ++i) {
        double x = -12.0 * sd + 24.0 * sd * (i + 0.5) / grid;
        double w = std::exp(-x * x / (2 * vd)) / std::sqrt(2 * std::numbers::pi * vd);
        acc += h.eval(x) * w * (24.0 * sd / grid);
      }
      CHECK(std::abs(acc) <= 1e-10);
    }
  }
}

TEST_CASE("poisson generator entries") {
  GaussRatMatrix a1 = poisson_generator(1);
  CHECK(a1(0, 0) == GaussRat(Rat(0)));
  CHECK(a1(1, 1) == GaussRat(Rat(1)));
  CHECK(a1(1, 0) == GaussRat(Rat(0)));

  GaussRatMatrix a2 = poisson_generator(2);
  CHECK(a2(2, 1) == GaussRat(Rat(0), Rat(1)));  // i * C(2,0)
  CHECK(a2(2, 2) == GaussRat(Rat(2)));          // C(2,1)
  CHECK(a2(2, 0) == GaussRat(Rat(0)));
}

TEST_CASE("generator diagonalization A = U D U^-1, exact") {
  for (long n = 0; n <= 10; ++n) {
    GaussRatMatrix a = poisson_generator(n);
    GeneratorDiagonalization g = diagonalize_generator(n);
    GaussRatMatrix id = g.u * g.u_inv;
    GaussRatMatrix reconstructed = g.u * g.d * g.u_inv;
    for (long r = 0; r <= n; ++r)
      for (long c = 0; c <= n; ++c) {
        CHECK(id(r, c) == GaussRat(Rat(r == c ? 1 : 0)));
        CHECK(reconstructed(r, c) == a(r, c));
      }
    // spectrum is {0,...,n} by construction of D
    for (long r = 0; r <= n; ++r) CHECK(g.d(r, r) == GaussRat(Rat(r)));
  }
}

TEST_CASE("touchard polynomials collect stirling2 rows") {
  Poly1<Rat> t3 = touchard(3);
  CHECK(t3 == Poly1<Rat>{Rat(0), Rat(1), Rat(3), Rat(1)});
}
