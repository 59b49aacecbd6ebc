#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "wicklab/rmatrix.hpp"
#include "wicklab/rng.hpp"

using namespace wicklab;

namespace {

const NoiseKind kAll[] = {NoiseKind::gauss, NoiseKind::poisson, NoiseKind::gamma};

GaussRatMatrix exact_identity(long n) {
  GaussRatMatrix id = GaussRatMatrix::Zero(n, n);
  for (long i = 0; i < n; ++i) id(i, i) = GaussRat(Rat(1));
  return id;
}

bool matrices_equal(const GaussRatMatrix& a, const GaussRatMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (long i = 0; i < a.rows(); ++i)
    for (long j = 0; j < a.cols(); ++j)
      if (a(i, j) != b(i, j)) return false;
  return true;
}

Rat random_rat(RngStream& rng) {
  long num = 1 + static_cast<long>(rng.next_u32() % 40);
  long den = 1 + static_cast<long>(rng.next_u32() % 12);
  return make_rat(num, den);
}

}  // namespace

TEST_CASE("R^1(lambda) = diag(1, 1/lambda) for every noise") {
  RngStream rng(2024, 0);
  for (int rep = 0; rep < 10; ++rep) {
    Rat lam = random_rat(rng);
    for (NoiseKind kind : kAll) {
      GaussRatMatrix r = r_matrix(kind, 1, lam);
      CHECK(r(0, 0) == GaussRat(Rat(1)));
      CHECK(r(0, 1) == GaussRat(Rat(0)));
      CHECK(r(1, 0) == GaussRat(Rat(0)));
      CHECK(r(1, 1) == GaussRat(Rat(Rat(1) / lam)));
    }
  }
}

TEST_CASE("lower-triangular shape and identity row 0") {
  for (NoiseKind kind : kAll) {
    GaussRatMatrix r = r_matrix_pair(kind, 5, make_rat(1, 3), make_rat(7, 4));
    CHECK(r(0, 0) == GaussRat(Rat(1)));
    for (long j = 1; j <= 5; ++j) CHECK(r(0, j).is_zero());
    for (long i = 0; i <= 5; ++i)
      for (long j = i + 1; j <= 5; ++j) CHECK(r(i, j).is_zero());
  }
}

TEST_CASE("generic construction matches the closed forms") {
  const Rat mu = make_rat(2, 5), lam = make_rat(9, 4);
  for (NoiseKind kind : kAll) {
    GaussRatMatrix generic = r_matrix_pair(kind, 6, mu, lam);
    GaussRatMatrix closed = r_pair_closed(kind, 6, mu, lam);
    CHECK(matrices_equal(generic, closed));
  }
}

TEST_CASE("gamma R matrices are diagonal with rising-factorial ratios") {
  Rat lam = make_rat(3, 2);
  GaussRatMatrix r = r_matrix(NoiseKind::gamma, 4, lam);
  for (long j = 0; j <= 4; ++j) {
    CHECK(r(j, j) == GaussRat(Rat(Rat(factorial(j)) / rising_factorial(lam, j))));
    for (long l = 0; l < j; ++l) CHECK(r(j, l).is_zero());
  }
}

TEST_CASE("poisson entries carry i^(j-k) stirling sums") {
  // R(mu,lambda)_{kj} = i^(j-k) sum_l (mu/lambda)^l {k,l} s(l,j)
  Rat mu = make_rat(1, 2), lam = Rat(2);
  GaussRatMatrix r = r_matrix_pair(NoiseKind::poisson, 3, mu, lam);
  for (long k = 0; k <= 3; ++k)
    for (long j = 0; j <= k; ++j) {
      Rat acc(0);
      for (long l = 0; l <= k; ++l)
        acc += rat_pow(mu / lam, l) * Rat(stirling2(k, l) * stirling1_signed(l, j));
      CHECK(r(k, j) == i_pow(j - k) * GaussRat(acc));
    }
}

TEST_CASE("defining relation holds on the xi-grid") {
  const Rat mu = make_rat(1, 3), lam = make_rat(3, 2);
  for (NoiseKind kind : kAll) {
    GaussRatMatrix r = r_matrix_pair(kind, 6, mu, lam);
    CHECK(r_defining_residual(kind, r, mu, lam) <= 1e-10);
  }
}

TEST_CASE("R(lambda,lambda) is the identity") {
  for (NoiseKind kind : kAll) {
    GaussRatMatrix r = r_matrix_pair(kind, 4, make_rat(5, 7), make_rat(5, 7));
    CHECK(matrices_equal(r, exact_identity(5)));
  }
}

TEST_CASE("two-parameter semigroup law, exact, 20 random triples per noise") {
  RngStream rng(77, 1);
  for (NoiseKind kind : kAll) {
    for (int rep = 0; rep < 20; ++rep) {
      Rat l1 = random_rat(rng), l2 = random_rat(rng), l3 = random_rat(rng);
      GaussRatMatrix a = r_matrix_pair(kind, 4, l1, l2);
      GaussRatMatrix b = r_matrix_pair(kind, 4, l2, l3);
      GaussRatMatrix c = r_matrix_pair(kind, 4, l1, l3);
      CHECK(matrices_equal(a * b, c));
    }
  }
}

TEST_CASE("nesting: R^k is the leading block of R^(k+1)") {
  const Rat mu = make_rat(2, 3), lam = make_rat(8, 5);
  for (NoiseKind kind : kAll)
    for (long k = 0; k <= 7; ++k) {
      GaussRatMatrix small = r_matrix_pair(kind, k, mu, lam);
      GaussRatMatrix big = r_matrix_pair(kind, k + 1, mu, lam);
      CHECK(matrices_equal(small, big.topLeftCorner(k + 1, k + 1)));
    }
}

TEST_CASE("argument validation") {
  CHECK_THROWS_AS(r_matrix_pair(NoiseKind::gauss, 2, Rat(0), Rat(1)), std::invalid_argument);
  CHECK_THROWS_AS(r_matrix_pair(NoiseKind::gauss, -1, Rat(1), Rat(1)), std::invalid_argument);
}
