#include "vsc/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "vsc/error.hpp"

namespace vsc {
namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double squared_distance(Point a, Point b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

bool degenerate(const Pair& p) {
  return !(squared_distance(p.plus, p.minus) >
           kDegeneracyTolerance * kDegeneracyTolerance);
}

void check_dim(std::size_t expected, std::size_t got, const char* where) {
  if (expected != got) {
    throw DimensionError(std::string(where) + ": expected dimension " +
                         std::to_string(expected) + ", got " +
                         std::to_string(got));
  }
}

// Writes (1, f_1, ..., f_k) into out; shared by the single-point and the
// whole-matrix paths so both produce identical bits.
void write_features(std::span<const Hyperplane> hs, Point x,
                    const VscConfig& cfg, std::span<double> out) {
  out[0] = 1.0;
  for (std::size_t j = 0; j < hs.size(); ++j) {
    const Hyperplane& h = hs[j];
    const double activation = std::tanh(h.signed_value(x));
    const double weight =
        cfg.confidence_enabled ? confidence(h, x, cfg.epsilon) : 1.0;
    out[j + 1] = activation * weight;
  }
}

Label sign_label(double v) { return v >= 0.0 ? 1 : -1; }

}  // namespace

double Hyperplane::signed_value(Point x) const {
  check_dim(dim(), x.size(), "Hyperplane::signed_value");
  return dot(normal, x) - bias;
}

Hyperplane make_hyperplane(const Pair& p) {
  check_dim(p.plus.size(), p.minus.size(), "make_hyperplane");
  if (p.plus.empty()) throw DimensionError("make_hyperplane: empty points");
  if (degenerate(p)) throw DegeneracyError("make_hyperplane: coincident pair");

  const std::size_t n = p.plus.size();
  Hyperplane h;
  h.pair = p;
  h.center.resize(n);
  h.half.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    h.center[i] = (p.plus[i] + p.minus[i]) / 2.0;
    h.half[i] = (p.plus[i] - p.minus[i]) / 2.0;
  }
  h.half_sq = dot(h.half, h.half);
  h.half_dist = std::sqrt(h.half_sq);
  h.normal.resize(n);
  for (std::size_t i = 0; i < n; ++i) h.normal[i] = h.half[i] / h.half_dist;
  h.bias = dot(h.normal, h.center);
  return h;
}

double confidence(const Hyperplane& h, Point x, double epsilon) {
  check_dim(h.dim(), x.size(), "confidence");
  double to_plus = 0.0;
  double to_minus = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double u = x[i] - h.center[i];
    const double a = h.half[i] - u;
    const double b = h.half[i] + u;
    to_plus += a * a;
    to_minus += b * b;
  }
  const double d = h.half_dist;
  const double z = d / (to_plus + epsilon) + d / (to_minus + epsilon) -
                   2.0 * d / (h.half_sq + epsilon);
  return sigmoid(z);
}

void VscConfig::validate() const {
  if (k < 1) throw ParameterError("VscConfig: k must be >= 1");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw ParameterError("VscConfig: lambda must be > 0");
  }
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw ParameterError("VscConfig: epsilon must be > 0");
  }
}

std::vector<FeatureRange> feature_ranges(const Matrix& x) {
  if (x.rows() == 0) throw DimensionError("feature_ranges: no rows");
  std::vector<FeatureRange> out(x.cols());
  for (std::size_t j = 0; j < x.cols(); ++j) out[j] = {x(0, j), x(0, j)};
  for (std::size_t r = 1; r < x.rows(); ++r) {
    for (std::size_t j = 0; j < x.cols(); ++j) {
      out[j].min = std::min(out[j].min, x(r, j));
      out[j].max = std::max(out[j].max, x(r, j));
    }
  }
  return out;
}

std::vector<Pair> sample_pairs(const Dataset& data, std::size_t k, Rng& rng) {
  std::vector<std::size_t> pos;
  std::vector<std::size_t> neg;
  for (std::size_t i = 0; i < data.size(); ++i) {
    (data.y[i] > 0.0 ? pos : neg).push_back(i);
  }
  if (pos.empty() || neg.empty()) {
    throw ClassMissingError(std::string("sample_pairs: no ") +
                            (pos.empty() ? "positive" : "negative") +
                            " samples");
  }
  std::uniform_int_distribution<std::size_t> pick_pos(0, pos.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_neg(0, neg.size() - 1);

  std::vector<Pair> pairs;
  pairs.reserve(k);
  while (pairs.size() < k) {
    int attempts = 0;
    for (;;) {
      auto p = data.x.row(pos[pick_pos(rng)]);
      auto m = data.x.row(neg[pick_neg(rng)]);
      Pair pair{{p.begin(), p.end()}, {m.begin(), m.end()}};
      if (!degenerate(pair)) {
        pairs.push_back(std::move(pair));
        break;
      }
      if (++attempts >= kMaxDegenerateDraws) {
        throw DegeneracyError("sample_pairs: " +
                              std::to_string(kMaxDegenerateDraws) +
                              " consecutive coincident draws");
      }
    }
  }
  return pairs;
}

std::vector<Pair> sample_pairs_uniform(std::span<const FeatureRange> ranges,
                                       std::size_t k, Rng& rng) {
  for (const auto& r : ranges) {
    if (!(r.max >= r.min)) throw ParameterError("sample_pairs_uniform: max < min");
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw = [&] {
    std::vector<double> v(ranges.size());
    for (std::size_t j = 0; j < ranges.size(); ++j) {
      v[j] = ranges[j].min + (ranges[j].max - ranges[j].min) * unit(rng);
    }
    return v;
  };

  std::vector<Pair> pairs;
  pairs.reserve(k);
  while (pairs.size() < k) {
    int attempts = 0;
    for (;;) {
      Pair pair;
      pair.plus = draw();
      pair.minus = draw();
      if (!degenerate(pair)) {
        pairs.push_back(std::move(pair));
        break;
      }
      if (++attempts >= kMaxDegenerateDraws) {
        throw DegeneracyError("sample_pairs_uniform: " +
                              std::to_string(kMaxDegenerateDraws) +
                              " consecutive coincident draws");
      }
    }
  }
  return pairs;
}

Vector feature_map(std::span<const Hyperplane> hs, Point x,
                   const VscConfig& cfg) {
  for (const auto& h : hs) check_dim(h.dim(), x.size(), "feature_map");
  std::vector<double> out(hs.size() + 1);
  write_features(hs, x, cfg, out);
  return Vector(std::move(out));
}

Matrix feature_matrix(std::span<const Hyperplane> hs, const Matrix& x,
                      const VscConfig& cfg, Exec exec) {
  for (const auto& h : hs) check_dim(h.dim(), x.cols(), "feature_matrix");
  Matrix out(x.rows(), hs.size() + 1);
  const auto n = static_cast<std::ptrdiff_t>(x.rows());
  if (exec == Exec::Serial) {
    for (std::ptrdiff_t r = 0; r < n; ++r) {
      write_features(hs, x.row(r), cfg, out.row(r));
    }
  } else {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t r = 0; r < n; ++r) {
      write_features(hs, x.row(r), cfg, out.row(r));
    }
  }
  return out;
}

std::vector<Label> Classifier::predict_all(const Matrix& x) const {
  std::vector<Label> out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) out[r] = predict(x.row(r));
  return out;
}

VscModel::VscModel(std::vector<Hyperplane> hyperplanes, Vector weights,
                   VscConfig config, std::size_t dim)
    : hyperplanes_(std::move(hyperplanes)),
      weights_(std::move(weights)),
      config_(config),
      dim_(dim) {
  if (weights_.size() != hyperplanes_.size() + 1) {
    throw DimensionError("VscModel: weights must have k+1 entries");
  }
  for (const auto& h : hyperplanes_) check_dim(dim_, h.dim(), "VscModel");
}

double VscModel::decision_value(Point x) const {
  check_dim(dim_, x.size(), "VscModel::decision_value");
  std::vector<double> f(hyperplanes_.size() + 1);
  write_features(hyperplanes_, x, config_, f);
  return dot(weights_.span(), f);
}

Label VscModel::predict(Point x) const { return sign_label(decision_value(x)); }

std::vector<Label> VscModel::predict_all(const Matrix& x) const {
  check_dim(dim_, x.cols(), "VscModel::predict_all");
  const Matrix f = feature_matrix(hyperplanes_, x, config_);
  std::vector<Label> out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    out[r] = sign_label(dot(weights_.span(), f.row(r)));
  }
  return out;
}

VscModel fit_vsc(const Dataset& data, const VscConfig& cfg) {
  cfg.validate();
  data.validate();
  if (data.dim() < 1) throw DimensionError("fit_vsc: no features");
  if (data.size() < 2) throw DimensionError("fit_vsc: need at least 2 samples");

  Rng rng(cfg.seed);
  std::vector<Pair> pairs;
  if (cfg.pair_mode == PairMode::FromData) {
    pairs = sample_pairs(data, cfg.k, rng);
  } else {
    const auto ranges = feature_ranges(data.x);
    pairs = sample_pairs_uniform(ranges, cfg.k, rng);
  }

  std::vector<Hyperplane> hs;
  hs.reserve(pairs.size());
  for (const auto& p : pairs) hs.push_back(make_hyperplane(p));

  const Matrix features = feature_matrix(hs, data.x, cfg);
  Vector w = ridge_solve(features, data.y, cfg.lambda);
  return VscModel(std::move(hs), std::move(w), cfg, data.dim());
}

ElmModel::ElmModel(Matrix input_weights, Vector readout, std::size_t dim)
    : input_weights_(std::move(input_weights)),
      readout_(std::move(readout)),
      dim_(dim) {
  if (readout_.size() != input_weights_.rows() + 1) {
    throw DimensionError("ElmModel: readout must have hidden+1 entries");
  }
}

namespace {

void elm_hidden(const Matrix& w, Point x, std::span<double> out) {
  out[0] = 1.0;
  for (std::size_t j = 0; j < w.rows(); ++j) {
    auto wj = w.row(j);
    double s = wj[0];
    for (std::size_t i = 0; i < x.size(); ++i) s += wj[i + 1] * x[i];
    out[j + 1] = std::tanh(s);
  }
}

}  // namespace

double ElmModel::decision_value(Point x) const {
  check_dim(dim_, x.size(), "ElmModel::decision_value");
  std::vector<double> h(input_weights_.rows() + 1);
  elm_hidden(input_weights_, x, h);
  return dot(readout_.span(), h);
}

Label ElmModel::predict(Point x) const { return sign_label(decision_value(x)); }

ElmModel fit_elm(const Dataset& data, std::size_t hidden, double lambda,
                 Rng& rng) {
  data.validate();
  if (data.size() < 2) throw DimensionError("fit_elm: need at least 2 samples");
  if (!(lambda > 0.0)) throw ParameterError("fit_elm: lambda must be > 0");

  const std::size_t n = data.dim();
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<double> w(hidden * (n + 1));
  for (double& v : w) v = unit(rng);
  Matrix weights(hidden, n + 1, std::move(w));

  Matrix h(data.size(), hidden + 1);
  for (std::size_t r = 0; r < data.size(); ++r) {
    elm_hidden(weights, data.x.row(r), h.row(r));
  }
  Vector readout = ridge_solve(h, data.y, lambda);
  return ElmModel(std::move(weights), std::move(readout), n);
}

KnnModel::KnnModel(Matrix train_x, Vector train_y, std::size_t neighbors)
    : train_x_(std::move(train_x)),
      train_y_(std::move(train_y)),
      neighbors_(neighbors) {
  if (neighbors_ < 1 || neighbors_ > train_x_.rows()) {
    throw ParameterError("KnnModel: neighbors must be in [1, N]");
  }
}

Label KnnModel::predict(Point x) const {
  check_dim(train_x_.cols(), x.size(), "KnnModel::predict");
  const std::size_t n = train_x_.rows();
  std::vector<std::pair<double, std::size_t>> dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    dist[i] = {squared_distance(train_x_.row(i), x), i};
  }
  std::partial_sort(dist.begin(), dist.begin() + neighbors_, dist.end());
  double vote = 0.0;
  for (std::size_t i = 0; i < neighbors_; ++i) vote += train_y_[dist[i].second];
  return sign_label(vote);
}

KnnModel fit_knn(const Dataset& data, std::size_t neighbors) {
  data.validate();
  if (neighbors < 1 || neighbors > data.size()) {
    throw ParameterError("fit_knn: neighbors=" + std::to_string(neighbors) +
                         " outside [1, " + std::to_string(data.size()) + "]");
  }
  return KnnModel(data.x, data.y, neighbors);
}

std::string_view to_string(ModelId id) noexcept {
  switch (id) {
    case ModelId::Vsc: return "vsc";
    case ModelId::VscNoConfidence: return "vsc-noconf";
    case ModelId::VscUniform: return "vsc-uniform";
    case ModelId::Elm: return "elm";
    case ModelId::Knn: return "knn";
  }
  return "?";
}

ModelId parse_model_id(std::string_view name) {
  for (ModelId id : {ModelId::Vsc, ModelId::VscNoConfidence, ModelId::VscUniform,
                     ModelId::Elm, ModelId::Knn}) {
    if (to_string(id) == name) return id;
  }
  throw ParameterError("unknown model '" + std::string(name) +
                       "' (expected vsc, vsc-noconf, vsc-uniform, elm, knn)");
}

ClassifierFactory make_factory(const ModelSpec& spec) {
  if (spec.id == ModelId::Knn) {
    return [spec](const Dataset& d, std::uint64_t) -> std::unique_ptr<Classifier> {
      return std::make_unique<KnnModel>(fit_knn(d, spec.neighbors));
    };
  }
  if (spec.id == ModelId::Elm) {
    return [spec](const Dataset& d, std::uint64_t seed) -> std::unique_ptr<Classifier> {
      Rng rng(seed);
      return std::make_unique<ElmModel>(fit_elm(d, spec.k, spec.lambda, rng));
    };
  }
  VscConfig base;
  base.k = spec.k;
  base.lambda = spec.lambda;
  base.epsilon = spec.epsilon;
  base.confidence_enabled = spec.id != ModelId::VscNoConfidence;
  base.pair_mode =
      spec.id == ModelId::VscUniform ? PairMode::UniformBox : PairMode::FromData;
  base.validate();
  return [base](const Dataset& d, std::uint64_t seed) -> std::unique_ptr<Classifier> {
    VscConfig cfg = base;
    cfg.seed = seed;
    return std::make_unique<VscModel>(fit_vsc(d, cfg));
  };
}

}  // namespace vsc
