#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vsc/dataset.hpp"
#include "vsc/linalg.hpp"
#include "vsc/rng.hpp"

namespace vsc {

using Point = std::span<const double>;

/// Predicted class, always -1 or +1.
using Label = int;

inline constexpr double kDegeneracyTolerance = 1e-9;
inline constexpr int kMaxDegenerateDraws = 100;

/// One positive and one negative example.
struct Pair {
  std::vector<double> plus;
  std::vector<double> minus;
};

/// Max-margin separator of a pair: the plane through the pair midpoint,
/// perpendicular to plus - minus, normalized so both endpoints sit at signed
/// distance +-half_dist.
struct Hyperplane {
  std::vector<double> normal;  // unit length
  double bias = 0.0;           // <normal, center>
  std::vector<double> center;
  std::vector<double> half;    // (plus - minus) / 2
  double half_sq = 0.0;        // <half, half>
  double half_dist = 0.0;      // sqrt(half_sq)
  Pair pair;

  std::size_t dim() const noexcept { return normal.size(); }

  /// <normal, x> - bias.
  double signed_value(Point x) const;
};

/// Throws DegeneracyError when the endpoints are closer than
/// kDegeneracyTolerance, DimensionError on a dimension mismatch.
Hyperplane make_hyperplane(const Pair& p);

/// Locality weight of a hyperplane at x, in (0, 1):
///
///   sigmoid( d/(|x+ - x|^2 + eps) + d/(|x- - x|^2 + eps) - 2d/(d^2 + eps) )
///
/// with d the half distance of the pair. Distances to the endpoints are taken
/// through the center (x+ = c + half, x- = c - half), which makes the value at
/// the center exactly 1/2.
double confidence(const Hyperplane& h, Point x, double epsilon);

enum class PairMode { FromData, UniformBox };

struct VscConfig {
  std::size_t k = 100;
  double lambda = 1.0;
  double epsilon = 0.01;
  bool confidence_enabled = true;
  PairMode pair_mode = PairMode::FromData;
  std::uint64_t seed = 0;

  /// Throws ParameterError unless k >= 1, lambda > 0 and epsilon > 0.
  void validate() const;
};

struct FeatureRange {
  double min = 0.0;
  double max = 0.0;
};

/// Per-column [min, max] of x.
std::vector<FeatureRange> feature_ranges(const Matrix& x);

/// k pairs, each taking one uniformly drawn positive and one uniformly drawn
/// negative sample (with replacement). Coincident draws are retried.
std::vector<Pair> sample_pairs(const Dataset& data, std::size_t k, Rng& rng);

/// k pairs with both endpoints drawn uniformly in the box; labels unused.
std::vector<Pair> sample_pairs_uniform(std::span<const FeatureRange> ranges,
                                       std::size_t k, Rng& rng);

/// (1, f_1(x), ..., f_k(x)) with f_j = tanh(signed_value_j(x)) * C_j(x).
/// C_j is replaced by 1 when confidence is disabled.
Vector feature_map(std::span<const Hyperplane> hs, Point x,
                   const VscConfig& cfg);

/// feature_map applied to every row of x, giving an N x (k+1) matrix.
Matrix feature_matrix(std::span<const Hyperplane> hs, const Matrix& x,
                      const VscConfig& cfg, Exec exec = Exec::Parallel);

/// Fitted binary classifier.
class Classifier {
 public:
  virtual ~Classifier() = default;

  virtual Label predict(Point x) const = 0;

  /// predict() on every row.
  virtual std::vector<Label> predict_all(const Matrix& x) const;
};

class VscModel final : public Classifier {
 public:
  VscModel(std::vector<Hyperplane> hyperplanes, Vector weights, VscConfig config,
           std::size_t dim);

  const std::vector<Hyperplane>& hyperplanes() const noexcept { return hyperplanes_; }
  const Vector& weights() const noexcept { return weights_; }
  const VscConfig& config() const noexcept { return config_; }
  std::size_t dim() const noexcept { return dim_; }

  /// w0 + sum_j w_j f_j(x).
  double decision_value(Point x) const;

  /// sign(decision_value(x)), with sign(0) = +1.
  Label predict(Point x) const override;
  std::vector<Label> predict_all(const Matrix& x) const override;

 private:
  std::vector<Hyperplane> hyperplanes_;
  Vector weights_;
  VscConfig config_;
  std::size_t dim_;
};

VscModel fit_vsc(const Dataset& data, const VscConfig& cfg);

/// Random tanh hidden layer with a ridge readout.
class ElmModel final : public Classifier {
 public:
  ElmModel(Matrix input_weights, Vector readout, std::size_t dim);

  double decision_value(Point x) const;
  Label predict(Point x) const override;

  const Matrix& input_weights() const noexcept { return input_weights_; }
  const Vector& readout() const noexcept { return readout_; }

 private:
  Matrix input_weights_;  // hidden x (dim + 1), column 0 is the bias weight
  Vector readout_;        // hidden + 1, index 0 is the bias
  std::size_t dim_;
};

/// Input weights uniform in [-1, 1].
ElmModel fit_elm(const Dataset& data, std::size_t hidden, double lambda, Rng& rng);

/// Majority vote of the nearest training points by Euclidean distance.
/// Distance ties go to the lower training index, vote ties to +1.
class KnnModel final : public Classifier {
 public:
  KnnModel(Matrix train_x, Vector train_y, std::size_t neighbors);

  Label predict(Point x) const override;

 private:
  Matrix train_x_;
  Vector train_y_;
  std::size_t neighbors_;
};

KnnModel fit_knn(const Dataset& data, std::size_t neighbors);

/// Model identifiers accepted by the command line and stored in records.
enum class ModelId { Vsc, VscNoConfidence, VscUniform, Elm, Knn };

std::string_view to_string(ModelId id) noexcept;
/// Throws ParameterError on an unknown name.
ModelId parse_model_id(std::string_view name);

/// Hyperparameters for one model. `k` doubles as the ELM hidden size.
struct ModelSpec {
  ModelId id = ModelId::Vsc;
  std::size_t k = 100;
  double lambda = 1.0;
  double epsilon = 0.01;
  std::size_t neighbors = 5;
};

/// Builds a fitted classifier from training data and a per-fit seed.
using ClassifierFactory =
    std::function<std::unique_ptr<Classifier>(const Dataset&, std::uint64_t)>;

ClassifierFactory make_factory(const ModelSpec& spec);

}  // namespace vsc
