#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vsc/data.hpp"
#include "vsc/dataset.hpp"
#include "vsc/error.hpp"
#include "vsc/model.hpp"

namespace vsc {

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t total() const noexcept { return tp + fp + fn + tn; }
};

/// Counts with +1 as the positive class.
ConfusionCounts confusion(std::span<const double> truth, std::span<const Label> predicted);

/// Harmonic mean of precision and recall. Any 0/0 on the way yields 0.
double f1_score(const ConfusionCounts& c);

enum class ScaleMode { PerFold, Global, None };

std::string_view to_string(ScaleMode m) noexcept;
ScaleMode parse_scale_mode(std::string_view name);

/// Fitting failure inside a cross-validation fold. The original exception is
/// nested (std::throw_with_nested).
class FoldError : public Error {
 public:
  FoldError(std::size_t fold, const std::string& what)
      : Error("fold " + std::to_string(fold) + ": " + what), fold_(fold) {}
  std::size_t fold() const noexcept { return fold_; }

 private:
  std::size_t fold_;
};

struct CvResult {
  std::string classifier_id;
  std::string dataset_id;
  std::uint64_t dataset_hash = 0;
  ModelSpec spec;
  std::size_t n_folds = 0;
  std::uint64_t fold_seed = 0;   // seed of the FoldPlan
  std::uint64_t model_seed = 0;  // master seed for per-fold model seeds
  ScaleMode scale_mode = ScaleMode::PerFold;
  std::vector<double> fold_f1;
  double mean_f1 = 0.0;
  double std_f1 = 0.0;  // sample standard deviation (n - 1)

  /// Recomputes mean_f1 and std_f1 from fold_f1.
  void summarize();
};

struct CvOptions {
  ScaleMode scale_mode = ScaleMode::PerFold;
  std::uint64_t model_seed = 0;
  /// Folds evaluated concurrently. Results do not depend on it.
  std::size_t jobs = 1;
};

/// Seed handed to the factory for `fold`.
std::uint64_t fold_model_seed(std::uint64_t model_seed, std::size_t fold);

/// For every fold: scale, fit on the training split, F1 on the test split.
/// Only fold_f1/mean/std, n_folds, model_seed and scale_mode are filled in;
/// identification fields are left to the caller.
CvResult run_cv(const Dataset& data, const ClassifierFactory& factory,
                const FoldPlan& folds, const CvOptions& options);

struct TTestResult {
  double t_stat = 0.0;
  std::size_t dof = 0;
  double p_value = 1.0;
  bool significant = false;
};

inline constexpr double kSignificanceLevel = 0.05;

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double regularized_incomplete_beta(double x, double a, double b);

/// P(|T| >= |t|) for Student's t with `dof` degrees of freedom.
double student_t_two_tailed_p(double t, double dof);

/// Paired two-tailed t-test on a - b. All-zero differences give t = 0, p = 1.
/// Throws ParameterError for unequal lengths or fewer than 2 pairs.
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b,
                          double alpha = kSignificanceLevel);

struct ComparisonCell {
  int direction = 0;  // sign(mean_row - mean_col)
  TTestResult test;
};

/// All-pairs comparison of results evaluated on the same folds.
struct Comparison {
  std::vector<std::string> ids;
  std::vector<double> mean_f1;
  std::vector<std::vector<ComparisonCell>> cells;  // cells[row][col]
};

/// Throws ParameterError unless every result shares dataset hash, fold seed
/// and fold count.
Comparison compare(std::span<const CvResult> results, double alpha = kSignificanceLevel);

/// Competition ranking by descending score. Neighbours in sorted order closer
/// than tie_eps share a rank (chained), and the next distinct entry skips
/// ahead. Input order breaks exact ties in the output ordering only.
std::vector<std::pair<std::string, int>> rankings(
    std::span<const std::pair<std::string, double>> scores, double tie_eps = 0.001);

struct SweepKey {
  std::size_t k = 0;
  double lambda = 0.0;
  friend bool operator==(const SweepKey&, const SweepKey&) = default;
};

struct SweepEntry {
  SweepKey key;
  CvResult result;
};

struct SweepGrid {
  std::vector<SweepEntry> entries;  // k-major, lambda-minor
  std::optional<std::size_t> reference;

  const SweepEntry* find(const SweepKey& key) const;
  /// mean_f1 / reference mean_f1. Throws ParameterError without a reference
  /// or when the reference mean is 0.
  double normalized(std::size_t i) const;
};

struct SweepOptions {
  std::vector<std::size_t> k_list{25, 50, 100, 250, 500};
  std::vector<double> lambda_list{0.1, 1.0, 10.0};
  std::optional<SweepKey> reference = SweepKey{100, 1.0};
  CvOptions cv;
};

/// run_cv for every (k, lambda) with one shared FoldPlan. `base` supplies the
/// model id, epsilon and neighbours; k and lambda come from the grid.
SweepGrid sweep(const Dataset& data, const ModelSpec& base, const FoldPlan& folds,
                const SweepOptions& options);

struct ConfidenceGrid {
  std::vector<double> xs;
  std::vector<double> ys;
  std::vector<double> values;  // row-major, one row per y

  double at(std::size_t iy, std::size_t ix) const { return values[iy * xs.size() + ix]; }
};

/// confidence() on a regular lattice over [x_lo, x_hi] x [y_lo, y_hi].
ConfidenceGrid confidence_grid(const Pair& pair, std::pair<double, double> x_range,
                               std::pair<double, double> y_range, std::size_t nx,
                               std::size_t ny, double epsilon = 0.01);

}  // namespace vsc
