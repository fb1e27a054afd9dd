#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "sccuc/linalg.hpp"
#include "sccuc/scc_engine.hpp"

using namespace sccuc;

namespace {

CMatrix random_matrix(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  CMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = {u(rng), u(rng)};
  // diagonal lift keeps the matrix well conditioned
  for (std::size_t i = 0; i < n; ++i) a(i, i) += Complex(double(n), 0.5 * double(n));
  return a;
}

double max_abs_diff(const CMatrix& a, const CMatrix& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
  return m;
}

CMatrix permuted(const CMatrix& a, const std::vector<std::size_t>& perm) {
  CMatrix pa(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) pa(i, j) = a(perm[i], j);
  return pa;
}

}  // namespace

TEST_SUITE("linalg") {

TEST_CASE("identity factors trivially") {
  const auto f = lu_factor(CMatrix::identity(4));
  CHECK_FALSE(f.singular());
  CHECK(f.lower() == CMatrix::identity(4));
  CHECK(f.upper() == CMatrix::identity(4));
  CHECK(f.perm() == std::vector<std::size_t>{0, 1, 2, 3});
}

TEST_CASE("diagonal factors keep the diagonal in U") {
  CMatrix a(2, 2);
  a(0, 0) = {0.0, 2.0};
  a(1, 1) = 3.0;
  const auto f = lu_factor(a);
  CHECK(f.upper() == a);
}

TEST_CASE("random 10x10 reconstructs") {
  std::mt19937_64 rng(7);
  const CMatrix a = random_matrix(10, rng);
  const auto f = lu_factor(a);
  CHECK(max_abs_diff(permuted(a, f.perm()), f.lower() * f.upper()) <= 1e-10 * a.norm_inf());
}

TEST_CASE("solves") {
  const std::vector<Complex> b{{1.0, 2.0}, {-3.0, 0.5}};
  CHECK(solve(lu_factor(CMatrix::identity(2)), std::span<const Complex>(b)) == b);

  CMatrix d(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = 2.0;
  const std::vector<Complex> rhs{4.0, 6.0};
  const auto x = solve(lu_factor(d), std::span<const Complex>(rhs));
  CHECK(std::abs(x[0] - 2.0) < 1e-15);
  CHECK(std::abs(x[1] - 3.0) < 1e-15);

  const std::vector<Complex> wrong(3);
  CHECK_THROWS_AS(solve(lu_factor(d), std::span<const Complex>(wrong)), DimensionError);
}

TEST_CASE("unit injection gives a column of the inverse") {
  const NetworkCase c = testutil::load("net3");
  const std::vector<std::uint8_t> x{1};
  const CMatrix y = build_admittance(c, x);
  const CMatrix z = invert(y);
  const std::vector<Complex> e0{1.0, 0.0, 0.0};
  const auto col = solve(lu_factor(y), std::span<const Complex>(e0));
  for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(col[i] - z(i, 0)) <= 1e-12);
  CHECK(zy_residual(z, y) <= 1e-9);
}

TEST_CASE("inverse of a reactance") {
  CMatrix a(1, 1);
  a(0, 0) = {0.0, 0.2};
  const CMatrix inv = invert(a);
  CHECK(std::abs(inv(0, 0) - Complex(0.0, -5.0)) <= 1e-14);
  CHECK(invert(CMatrix::identity(3)) == CMatrix::identity(3));
}

TEST_CASE("singular matrices are flagged, not solved") {
  CMatrix a(2, 2);
  a(0, 0) = 1.0;
  a(0, 1) = 2.0;
  a(1, 0) = 2.0;
  a(1, 1) = 4.0;
  const auto f = lu_factor(a);
  CHECK(f.singular());
  const std::vector<Complex> b{1.0, 1.0};
  CHECK_THROWS_AS(solve(f, std::span<const Complex>(b)), SingularMatrixError);
  CHECK_THROWS_AS(invert(a), SingularMatrixError);
  CHECK_THROWS_AS(lu_factor(CMatrix(2, 3)), DimensionError);
}

TEST_CASE("random property sweep") {
  for (int seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
    const std::size_t n = 1 + rng() % 64;
    const CMatrix a = random_matrix(n, rng);
    const auto f = lu_factor(a);
    CAPTURE(seed);
    CHECK(max_abs_diff(permuted(a, f.perm()), f.lower() * f.upper()) <= 1e-10 * a.norm_inf());
    CHECK(max_abs_diff(a * invert(f), CMatrix::identity(n)) <= 1e-9);
  }
}

TEST_CASE("real matrices share the code path") {
  RMatrix a(2, 2);
  a(0, 0) = 0.0;
  a(0, 1) = 1.0;
  a(1, 0) = 2.0;
  a(1, 1) = 1.0;
  const auto f = lu_factor(a);
  CHECK(f.perm() == std::vector<std::size_t>{1, 0});
  const std::vector<double> b{1.0, 4.0};
  const auto x = solve(f, std::span<const double>(b));
  CHECK(x[0] == doctest::Approx(1.5));
  CHECK(x[1] == doctest::Approx(1.0));
}

}  // TEST_SUITE
