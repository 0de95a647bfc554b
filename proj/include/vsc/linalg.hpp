#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace vsc {

/// Selects between the OpenMP kernel and the single-threaded reference loop.
/// Both variants accumulate every output element in the same order, so their
/// results are bitwise identical.
enum class Exec { Serial, Parallel };

/// Dense row-major matrix of finite doubles.
class Matrix {
 public:
  Matrix() = default;
  /// Zero-filled rows x cols matrix.
  Matrix(std::size_t rows, std::size_t cols);
  /// Takes ownership of row-major data. Throws DimensionError when the length
  /// does not match or an entry is NaN/Inf.
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

  double operator()(std::size_t r, std::size_t c) const noexcept {
    return data_[r * cols_ + c];
  }
  double& operator()(std::size_t r, std::size_t c) noexcept {
    return data_[r * cols_ + c];
  }

  std::span<const double> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<double> row(std::size_t r) noexcept {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<const double> data() const noexcept { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Dense vector of finite doubles.
class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t n) : data_(n, 0.0) {}
  /// Throws DimensionError on a NaN/Inf entry.
  explicit Vector(std::vector<double> data);
  Vector(std::initializer_list<double> values);

  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double operator[](std::size_t i) const noexcept { return data_[i]; }
  double& operator[](std::size_t i) noexcept { return data_[i]; }

  std::span<const double> span() const noexcept { return data_; }
  const std::vector<double>& values() const noexcept { return data_; }

  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }

  friend bool operator==(const Vector&, const Vector&) = default;

 private:
  std::vector<double> data_;
};

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double norm_inf(std::span<const double> a);

/// A * x.
Vector multiply(const Matrix& a, const Vector& x);

/// X^T X. Only the upper triangle is accumulated and then mirrored, so the
/// result is exactly symmetric.
Matrix gram(const Matrix& x, Exec exec = Exec::Parallel);

/// X^T y.
Vector transpose_multiply(const Matrix& x, const Vector& y,
                          Exec exec = Exec::Parallel);

/// Solves A x = b for symmetric positive definite A by Cholesky factorization.
/// Throws DimensionError for shape problems or asymmetry beyond 1e-10
/// (relative to the largest entry), SingularityError on a non-positive pivot.
Vector spd_solve(const Matrix& a, const Vector& b);

/// Solves (X^T X + lambda I) w = X^T y, I being cols x cols.
Vector ridge_solve(const Matrix& x, const Vector& y, double lambda);

/// Running statistics over every ridge_solve call in the process: the
/// relative residual |(X^T X + lambda I) w - X^T y|_inf / (1 + |X^T y|_inf).
/// Thread safe.
struct RidgeAudit {
  std::size_t calls = 0;
  std::size_t violations = 0;  // relative residual above kRidgeResidualBound
  double max_relative_residual = 0.0;
};

inline constexpr double kRidgeResidualBound = 1e-8;

RidgeAudit ridge_audit();
void reset_ridge_audit();

}  // namespace vsc
