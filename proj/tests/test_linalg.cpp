#include <doctest.h>

#include <array>
#include <cmath>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "vsc/error.hpp"
#include "vsc/linalg.hpp"

using vsc::Exec;
using vsc::Matrix;
using vsc::Vector;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = u(rng);
  }
  return m;
}

Vector random_vector(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vector v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

oracle::Dense to_dense(const Matrix& m) {
  oracle::Dense d(m.rows(), std::vector<double>(m.cols()));
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) d[r][c] = m(r, c);
  }
  return d;
}

}  // namespace

TEST_CASE("matrix rejects non-finite and mis-sized data") {
  CHECK_THROWS_AS(Matrix(2, 2, {1, 2, 3}), vsc::DimensionError);
  CHECK_THROWS_AS(Matrix(1, 2, {1, std::nan("")}), vsc::DimensionError);
  CHECK_THROWS_AS(Vector({1.0, std::numeric_limits<double>::infinity()}), vsc::DimensionError);
}

TEST_CASE("gram examples") {
  CHECK(vsc::gram(Matrix::identity(2)) == Matrix::identity(2));
  CHECK(vsc::gram(Matrix{{1, 2}, {3, 4}}) == Matrix{{10, 14}, {14, 20}});
  CHECK(vsc::gram(Matrix{{1}, {1}, {1}}) == Matrix{{3}});
  CHECK_THROWS_AS(vsc::gram(Matrix()), vsc::DimensionError);
}

TEST_CASE("gram is bitwise symmetric and the kernels agree") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix x = random_matrix(1 + rng() % 60, 1 + rng() % 40, rng);
    const Matrix gs = vsc::gram(x, Exec::Serial);
    const Matrix gp = vsc::gram(x, Exec::Parallel);
    CHECK(gs == gp);
    for (std::size_t i = 0; i < gs.rows(); ++i) {
      for (std::size_t j = 0; j < gs.cols(); ++j) REQUIRE(gs(i, j) == gs(j, i));
    }
    const Vector y = random_vector(x.rows(), rng);
    CHECK(vsc::transpose_multiply(x, y, Exec::Serial) ==
          vsc::transpose_multiply(x, y, Exec::Parallel));
  }
}

TEST_CASE("spd_solve examples") {
  const Vector a = vsc::spd_solve(Matrix::identity(2), Vector{3, -1});
  CHECK(a[0] == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(a[1] == doctest::Approx(-1.0).epsilon(1e-15));

  const Vector b = vsc::spd_solve(Matrix{{2, 0}, {0, 4}}, Vector{2, 8});
  CHECK(b[0] == doctest::Approx(1.0));
  CHECK(b[1] == doctest::Approx(2.0));

  // Cramer: det 8, x = (2*3 - 2*1, 4*1 - 2*2) / 8.
  const Vector c = vsc::spd_solve(Matrix{{4, 2}, {2, 3}}, Vector{2, 1});
  CHECK(std::abs(c[0] - 0.5) < 1e-14);
  CHECK(std::abs(c[1]) < 1e-14);
}

TEST_CASE("spd_solve errors") {
  CHECK_THROWS_AS(vsc::spd_solve(Matrix(2, 3), Vector(2)), vsc::DimensionError);
  CHECK_THROWS_AS(vsc::spd_solve(Matrix::identity(2), Vector(3)), vsc::DimensionError);
  CHECK_THROWS_AS(vsc::spd_solve(Matrix{{1, 0.5}, {0.4, 1}}, Vector(2)), vsc::DimensionError);
  CHECK_THROWS_AS(vsc::spd_solve(Matrix{{1, 2}, {2, 1}}, Vector(2)), vsc::SingularityError);
  CHECK_THROWS_AS(vsc::spd_solve(Matrix{{0, 0}, {0, 1}}, Vector(2)), vsc::SingularityError);
}

TEST_CASE("spd_solve residual bound on random SPD systems") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng() % 12;
    Matrix a = vsc::gram(random_matrix(n + 3, n, rng));
    for (std::size_t i = 0; i < n; ++i) a(i, i) += 0.1;
    const Vector b = random_vector(n, rng);
    const Vector x = vsc::spd_solve(a, b);
    const Vector ax = vsc::multiply(a, x);
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) res = std::max(res, std::abs(ax[i] - b[i]));
    CHECK(res <= 1e-8 * (1.0 + vsc::norm_inf(b.span())));
  }
}

TEST_CASE("ridge_solve examples") {
  const Vector w1 = vsc::ridge_solve(Matrix::identity(2), Vector{1, -1}, 1.0);
  CHECK(w1[0] == doctest::Approx(0.5));
  CHECK(w1[1] == doctest::Approx(-0.5));
  const Vector w0 = vsc::ridge_solve(Matrix::identity(2), Vector{1, -1}, 0.0);
  CHECK(w0[0] == doctest::Approx(1.0));
  CHECK(w0[1] == doctest::Approx(-1.0));

  std::mt19937_64 rng(6);
  const Matrix x = random_matrix(6, 3, rng);
  const Vector y = random_vector(6, rng);
  const Vector w = vsc::ridge_solve(x, y, 0.5);
  const auto ref = oracle::ridge_by_elimination(to_dense(x), y.values(), 0.5);
  for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(w[i] - ref[i]) <= 1e-8);
}

TEST_CASE("ridge_solve errors") {
  // Rank-deficient design at lambda = 0.
  CHECK_THROWS_AS(vsc::ridge_solve(Matrix{{1, 1}, {2, 2}}, Vector{1, 2}, 0.0),
                  vsc::SingularityError);
  CHECK_THROWS_AS(vsc::ridge_solve(Matrix::identity(2), Vector{1}, 1.0), vsc::DimensionError);
  CHECK_THROWS_AS(vsc::ridge_solve(Matrix::identity(2), Vector{1, 1}, -1.0), vsc::ParameterError);
}

TEST_CASE("ridge_solve matches the elimination oracle and keeps its residual bound") {
  std::mt19937_64 rng(2024);
  vsc::reset_ridge_audit();
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t cols = 1 + rng() % 8;
    const std::size_t rows = 1 + rng() % 32;
    const double lambda = std::array{0.1, 1.0, 10.0}[rng() % 3];
    const Matrix x = random_matrix(rows, cols, rng);
    const Vector y = random_vector(rows, rng);
    const Vector w = vsc::ridge_solve(x, y, lambda);
    const auto ref = oracle::ridge_by_elimination(to_dense(x), y.values(), lambda);
    for (std::size_t i = 0; i < cols; ++i) REQUIRE(std::abs(w[i] - ref[i]) <= 1e-8);
  }
  const auto audit = vsc::ridge_audit();
  CHECK(audit.calls == 200);
  CHECK(audit.violations == 0);
  CHECK(audit.max_relative_residual <= vsc::kRidgeResidualBound);
}

TEST_CASE("ridge weights shrink as lambda grows") {
  std::mt19937_64 rng(77);
  const std::array lambdas{0.0, 0.01, 0.1, 1.0, 10.0, 100.0};
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t cols = 1 + rng() % 6;
    const Matrix x = random_matrix(cols + 4 + rng() % 10, cols, rng);
    const Vector y = random_vector(x.rows(), rng);
    double prev = std::numeric_limits<double>::infinity();
    for (double l : lambdas) {
      const double n = vsc::norm2(vsc::ridge_solve(x, y, l).span());
      CHECK(n <= prev + 1e-10);
      prev = n;
    }
  }
}
