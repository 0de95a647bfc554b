#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vsc/dataset.hpp"
#include "vsc/linalg.hpp"
#include "vsc/rng.hpp"

namespace vsc {

// ---------------------------------------------------------------------------
// Ingestion
// ---------------------------------------------------------------------------

/// Parses a Keel `.dat` file. Input attributes must be `real` or `integer`;
/// the single output attribute is mapped to +1 when it equals
/// `positive_class` (default: the first class the header lists, or the first
/// value seen in the data for a numeric output) and to -1 otherwise.
/// Throws UnsupportedFeatureError for nominal inputs and ParseError (with the
/// line number) for malformed headers, rows and missing values.
Dataset parse_keel(std::string_view text,
                   std::optional<std::string> positive_class = std::nullopt);

/// Parses a CSV file with a header row. Every column other than
/// `label_column` must be numeric. Labels equal to `positive_label` become
/// +1, all others -1; without `positive_label` the first label in the file is
/// the positive class.
Dataset parse_csv(std::string_view text, std::string_view label_column,
                  std::optional<std::string> positive_label = std::nullopt);

/// Header of feature names plus the label column; values printed with 17
/// significant digits so that parse_csv reproduces them bit for bit.
std::string write_csv(const Dataset& data);

/// Whole file as a string. Throws Error naming the path on failure.
std::string read_text_file(const std::string& path);

/// parse_keel for `.dat` files, parse_csv otherwise.
Dataset load_dataset(const std::string& path, std::string_view label_column,
                     std::optional<std::string> positive_label);

// ---------------------------------------------------------------------------
// Standard scaling
// ---------------------------------------------------------------------------

/// Per-feature centering and scaling to unit population variance.
struct Scaler {
  std::vector<double> means;
  std::vector<double> scales;  // all > 0

  Matrix transform(const Matrix& x) const;
  Matrix inverse_transform(const Matrix& x) const;
};

/// Columns whose standard deviation is below 1e-12 get scale 1.
Scaler fit_scaler(const Matrix& x);

// ---------------------------------------------------------------------------
// Stratified folds
// ---------------------------------------------------------------------------

struct FoldPlan {
  std::size_t n_folds = 0;
  std::vector<std::size_t> assignments;  // fold index per sample
  /// Set when some class has fewer members than folds, so not every fold
  /// can contain every class.
  bool degraded = false;

  std::vector<std::size_t> test_indices(std::size_t fold) const;
  std::vector<std::size_t> train_indices(std::size_t fold) const;
};

/// Shuffles each class independently and deals it round-robin over the folds,
/// continuing the deal where the previous class stopped. Throws ParameterError
/// if n_folds < 2 or n_folds > N.
FoldPlan stratified_folds(const Vector& y, std::size_t n_folds, Rng& rng);

// ---------------------------------------------------------------------------
// Synthetic data
// ---------------------------------------------------------------------------

/// Two unit-covariance Gaussians centred at +(a,...,a) (label +1) and
/// -(a,...,a) (label -1), a = 2/sqrt(dim). Labels alternate starting at +1.
Dataset gen_twonorm(std::size_t n_samples, std::size_t dim, Rng& rng);

/// Label +1 ~ N(0, 4I), label -1 ~ N((a,...,a), I), a = 2/sqrt(dim).
Dataset gen_ringnorm(std::size_t n_samples, std::size_t dim, Rng& rng);

/// Four isotropic Gaussian blobs of standard deviation `noise` centred at
/// (+-1, +-1), labelled by the sign of x*y. Blobs are filled in rotation, so
/// their sizes differ by at most one.
Dataset gen_xor_blobs(std::size_t n_samples, double noise, Rng& rng);

}  // namespace vsc
