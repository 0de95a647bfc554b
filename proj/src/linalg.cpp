#include "vsc/linalg.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>

#include "vsc/error.hpp"

namespace vsc {
namespace {

void require_finite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw DimensionError(std::string(what) + ": non-finite entry");
    }
  }
}

std::atomic<std::size_t> g_ridge_calls{0};
std::atomic<std::size_t> g_ridge_violations{0};
std::atomic<double> g_ridge_max_residual{0.0};

void record_ridge_residual(double rel) {
  g_ridge_calls.fetch_add(1, std::memory_order_relaxed);
  if (!(rel <= kRidgeResidualBound)) {
    g_ridge_violations.fetch_add(1, std::memory_order_relaxed);
  }
  double prev = g_ridge_max_residual.load(std::memory_order_relaxed);
  while (rel > prev && !g_ridge_max_residual.compare_exchange_weak(
                           prev, rel, std::memory_order_relaxed)) {
  }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw DimensionError("Matrix: data length " + std::to_string(data_.size()) +
                         " != " + std::to_string(rows_) + "x" +
                         std::to_string(cols_));
  }
  require_finite(data_, "Matrix");
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DimensionError("Matrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
  require_finite(data_, "Matrix");
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Vector::Vector(std::vector<double> data) : data_(std::move(data)) {
  require_finite(data_, "Vector");
}

Vector::Vector(std::initializer_list<double> values) : data_(values) {
  require_finite(data_, "Vector");
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double norm_inf(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

Vector multiply(const Matrix& a, const Vector& x) {
  if (a.cols() != x.size()) throw DimensionError("multiply: shape mismatch");
  Vector out(a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r) out[r] = dot(a.row(r), x.span());
  return out;
}

Matrix gram(const Matrix& x, Exec exec) {
  if (x.empty()) throw DimensionError("gram: empty matrix");
  const std::size_t n = x.rows();
  const std::size_t m = x.cols();
  Matrix g(m, m);

  if (exec == Exec::Serial) {
    for (std::size_t r = 0; r < n; ++r) {
      auto xr = x.row(r);
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i; j < m; ++j) g(i, j) += xr[i] * xr[j];
      }
    }
  } else {
    // Threads own blocks of output rows and stream X once per block; every
    // cell still accumulates in ascending sample order, as in the serial loop.
    constexpr std::size_t kBlock = 16;
    const auto n_blocks = static_cast<std::ptrdiff_t>((m + kBlock - 1) / kBlock);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t b = 0; b < n_blocks; ++b) {
      const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
      const std::size_t hi = std::min(m, lo + kBlock);
      for (std::size_t r = 0; r < n; ++r) {
        auto xr = x.row(r);
        for (std::size_t i = lo; i < hi; ++i) {
          const double xri = xr[i];
          auto gi = g.row(i);
          for (std::size_t j = i; j < m; ++j) gi[j] += xri * xr[j];
        }
      }
    }
  }

  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) g(j, i) = g(i, j);
  }
  return g;
}

Vector transpose_multiply(const Matrix& x, const Vector& y, Exec exec) {
  if (x.rows() != y.size()) {
    throw DimensionError("transpose_multiply: shape mismatch");
  }
  const std::size_t n = x.rows();
  const std::size_t m = x.cols();
  Vector out(m);
  if (exec == Exec::Serial) {
    for (std::size_t r = 0; r < n; ++r) {
      auto xr = x.row(r);
      for (std::size_t j = 0; j < m; ++j) out[j] += xr[j] * y[r];
    }
  } else {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t jj = 0; jj < static_cast<std::ptrdiff_t>(m); ++jj) {
      const auto j = static_cast<std::size_t>(jj);
      double s = 0.0;
      for (std::size_t r = 0; r < n; ++r) s += x(r, j) * y[r];
      out[j] = s;
    }
  }
  return out;
}

Vector spd_solve(const Matrix& a, const Vector& b) {
  const std::size_t n = a.rows();
  if (n == 0 || a.cols() != n) throw DimensionError("spd_solve: not square");
  if (b.size() != n) throw DimensionError("spd_solve: rhs length mismatch");

  const double scale = std::max(1.0, norm_inf(a.data()));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(a(i, j) - a(j, i)) > 1e-10 * scale) {
        throw DimensionError("spd_solve: matrix not symmetric");
      }
    }
  }

  // Lower-triangular L with A = L L^T, built column by column.
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double pivot = a(j, j);
    for (std::size_t p = 0; p < j; ++p) pivot -= l(j, p) * l(j, p);
    if (!(pivot > 1e-14 * scale)) {
      throw SingularityError("spd_solve: non-positive pivot at column " +
                             std::to_string(j));
    }
    const double ljj = std::sqrt(pivot);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t p = 0; p < j; ++p) s -= l(i, p) * l(j, p);
      l(i, j) = s / ljj;
    }
  }

  std::vector<double> z(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t p = 0; p < i; ++p) s -= l(i, p) * z[p];
    z[i] = s / l(i, i);
  }
  std::vector<double> x(n);
  for (std::size_t ii = n; ii-- > 0;) {
    double s = z[ii];
    for (std::size_t p = ii + 1; p < n; ++p) s -= l(p, ii) * x[p];
    x[ii] = s / l(ii, ii);
  }
  return Vector(std::move(x));
}

Vector ridge_solve(const Matrix& x, const Vector& y, double lambda) {
  if (x.rows() != y.size()) throw DimensionError("ridge_solve: X.rows != y.len");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw ParameterError("ridge_solve: lambda must be a finite value >= 0");
  }
  Matrix a = gram(x);
  for (std::size_t i = 0; i < a.rows(); ++i) a(i, i) += lambda;
  const Vector rhs = transpose_multiply(x, y);
  Vector w = spd_solve(a, rhs);

  const Vector aw = multiply(a, w);
  double res = 0.0;
  for (std::size_t i = 0; i < aw.size(); ++i) {
    res = std::max(res, std::abs(aw[i] - rhs[i]));
  }
  record_ridge_residual(res / (1.0 + norm_inf(rhs.span())));
  return w;
}

RidgeAudit ridge_audit() {
  return {g_ridge_calls.load(), g_ridge_violations.load(),
          g_ridge_max_residual.load()};
}

void reset_ridge_audit() {
  g_ridge_calls.store(0);
  g_ridge_violations.store(0);
  g_ridge_max_residual.store(0.0);
}

}  // namespace vsc
