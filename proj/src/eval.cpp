#include "vsc/eval.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>

namespace vsc {

ConfusionCounts confusion(std::span<const double> truth, std::span<const Label> predicted) {
  if (truth.size() != predicted.size()) throw DimensionError("confusion: length mismatch");
  ConfusionCounts c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool t = truth[i] > 0.0;
    const bool p = predicted[i] > 0;
    if (t && p) ++c.tp;
    else if (!t && p) ++c.fp;
    else if (t && !p) ++c.fn;
    else ++c.tn;
  }
  return c;
}

double f1_score(const ConfusionCounts& c) {
  if (c.tp + c.fp == 0 || c.tp + c.fn == 0) return 0.0;
  const double precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  const double recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * (precision * recall) / (precision + recall);
}

std::string_view to_string(ScaleMode m) noexcept {
  switch (m) {
    case ScaleMode::PerFold: return "per-fold";
    case ScaleMode::Global: return "global";
    case ScaleMode::None: return "none";
  }
  return "?";
}

ScaleMode parse_scale_mode(std::string_view name) {
  for (ScaleMode m : {ScaleMode::PerFold, ScaleMode::Global, ScaleMode::None}) {
    if (to_string(m) == name) return m;
  }
  throw ParameterError("unknown scale mode '" + std::string(name) +
                       "' (expected per-fold, global, none)");
}

void CvResult::summarize() {
  const auto n = static_cast<double>(fold_f1.size());
  if (fold_f1.empty()) {
    mean_f1 = std_f1 = 0.0;
    return;
  }
  mean_f1 = std::accumulate(fold_f1.begin(), fold_f1.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : fold_f1) ss += (v - mean_f1) * (v - mean_f1);
  std_f1 = fold_f1.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
}

std::uint64_t fold_model_seed(std::uint64_t model_seed, std::size_t fold) {
  return derive_seed(model_seed, fold);
}

CvResult run_cv(const Dataset& data, const ClassifierFactory& factory,
                const FoldPlan& folds, const CvOptions& options) {
  data.validate();
  if (folds.assignments.size() != data.size()) {
    throw ParameterError("run_cv: fold plan covers " + std::to_string(folds.assignments.size()) +
                         " samples, dataset has " + std::to_string(data.size()));
  }
  for (std::size_t a : folds.assignments) {
    if (a >= folds.n_folds) throw ParameterError("run_cv: fold index out of range");
  }

  Dataset scaled_all;
  const Dataset* source = &data;
  if (options.scale_mode == ScaleMode::Global) {
    scaled_all = data;
    scaled_all.x = fit_scaler(data.x).transform(data.x);
    source = &scaled_all;
  }

  const auto n_folds = static_cast<std::ptrdiff_t>(folds.n_folds);
  std::vector<double> scores(folds.n_folds, 0.0);
  std::vector<std::exception_ptr> failures(folds.n_folds);

  auto run_fold = [&](std::size_t f) {
    try {
      const auto train_idx = folds.train_indices(f);
      const auto test_idx = folds.test_indices(f);
      Dataset train = source->subset(train_idx);
      Dataset test = source->subset(test_idx);
      if (options.scale_mode == ScaleMode::PerFold) {
        const Scaler s = fit_scaler(train.x);
        train.x = s.transform(train.x);
        test.x = s.transform(test.x);
      }
      const auto model = factory(train, fold_model_seed(options.model_seed, f));
      const auto predicted = model->predict_all(test.x);
      scores[f] = f1_score(confusion(test.y.span(), predicted));
    } catch (...) {
      failures[f] = std::current_exception();
    }
  };

  const int threads = static_cast<int>(std::max<std::size_t>(1, options.jobs));
  if (threads > 1) {
#pragma omp parallel for num_threads(threads) schedule(dynamic, 1)
    for (std::ptrdiff_t f = 0; f < n_folds; ++f) run_fold(static_cast<std::size_t>(f));
  } else {
    for (std::ptrdiff_t f = 0; f < n_folds; ++f) run_fold(static_cast<std::size_t>(f));
  }

  for (std::size_t f = 0; f < failures.size(); ++f) {
    if (!failures[f]) continue;
    try {
      std::rethrow_exception(failures[f]);
    } catch (const std::exception& e) {
      std::throw_with_nested(FoldError(f, e.what()));
    }
  }

  CvResult r;
  r.n_folds = folds.n_folds;
  r.model_seed = options.model_seed;
  r.scale_mode = options.scale_mode;
  r.fold_f1 = std::move(scores);
  r.summarize();
  return r;
}

namespace {

// Continued fraction for the incomplete beta function (modified Lentz).
double beta_continued_fraction(double x, double a, double b) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double regularized_incomplete_beta(double x, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw ParameterError("incomplete beta: a, b must be > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw ParameterError("incomplete beta: x outside [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(x, a, b) / a;
  return 1.0 - front * beta_continued_fraction(1.0 - x, b, a) / b;
}

double student_t_two_tailed_p(double t, double dof) {
  if (!(dof > 0.0)) throw ParameterError("student t: dof must be > 0");
  if (std::isnan(t)) throw ParameterError("student t: t is NaN");
  if (std::isinf(t)) return 0.0;
  const double x = dof / (dof + t * t);
  return std::clamp(regularized_incomplete_beta(x, dof / 2.0, 0.5), 0.0, 1.0);
}

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b, double alpha) {
  if (a.size() != b.size()) throw ParameterError("paired_t_test: length mismatch");
  if (a.size() < 2) throw ParameterError("paired_t_test: need at least 2 pairs");
  const std::size_t n = a.size();
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = a[i] - b[i];
  const double mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double v : d) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));

  TTestResult r;
  r.dof = n - 1;
  if (sd == 0.0) {
    if (mean == 0.0) {
      r.t_stat = 0.0;
      r.p_value = 1.0;
    } else {
      r.t_stat = std::copysign(std::numeric_limits<double>::infinity(), mean);
      r.p_value = 0.0;
    }
  } else {
    r.t_stat = mean / (sd / std::sqrt(static_cast<double>(n)));
    r.p_value = student_t_two_tailed_p(r.t_stat, static_cast<double>(r.dof));
  }
  r.significant = r.p_value < alpha;
  return r;
}

Comparison compare(std::span<const CvResult> results, double alpha) {
  if (results.empty()) throw ParameterError("compare: no results");
  const auto& first = results.front();
  for (const auto& r : results) {
    if (r.dataset_hash != first.dataset_hash || r.fold_seed != first.fold_seed ||
        r.n_folds != first.n_folds || r.fold_f1.size() != first.fold_f1.size()) {
      throw ParameterError("compare: '" + r.classifier_id + "' was not evaluated on the same "
                           "dataset and folds as '" + first.classifier_id + "'");
    }
  }
  Comparison c;
  const std::size_t m = results.size();
  for (const auto& r : results) {
    c.ids.push_back(r.classifier_id);
    c.mean_f1.push_back(r.mean_f1);
  }
  c.cells.assign(m, std::vector<ComparisonCell>(m));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      auto& cell = c.cells[i][j];
      cell.direction = (c.mean_f1[i] > c.mean_f1[j]) - (c.mean_f1[i] < c.mean_f1[j]);
      cell.test = paired_t_test(results[i].fold_f1, results[j].fold_f1, alpha);
    }
  }
  return c;
}

std::vector<std::pair<std::string, int>> rankings(
    std::span<const std::pair<std::string, double>> scores, double tie_eps) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a].second > scores[b].second;
  });
  std::vector<std::pair<std::string, int>> out;
  out.reserve(scores.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const auto& cur = scores[order[pos]];
    int rank = static_cast<int>(pos) + 1;
    if (pos > 0 && std::abs(scores[order[pos - 1]].second - cur.second) < tie_eps) {
      rank = out.back().second;
    }
    out.emplace_back(cur.first, rank);
  }
  return out;
}

const SweepEntry* SweepGrid::find(const SweepKey& key) const {
  for (const auto& e : entries) {
    if (e.key == key) return &e;
  }
  return nullptr;
}

double SweepGrid::normalized(std::size_t i) const {
  if (!reference) throw ParameterError("sweep: no reference entry");
  const double ref = entries[*reference].result.mean_f1;
  if (ref == 0.0) throw ParameterError("sweep: reference mean F1 is zero");
  return entries[i].result.mean_f1 / ref;
}

SweepGrid sweep(const Dataset& data, const ModelSpec& base, const FoldPlan& folds,
                const SweepOptions& options) {
  if (options.k_list.empty() || options.lambda_list.empty()) {
    throw ParameterError("sweep: empty grid");
  }
  SweepGrid grid;
  for (std::size_t k : options.k_list) {
    for (double lambda : options.lambda_list) grid.entries.push_back({{k, lambda}, {}});
  }
  if (options.reference) {
    for (std::size_t i = 0; i < grid.entries.size(); ++i) {
      if (grid.entries[i].key == *options.reference) grid.reference = i;
    }
    if (!grid.reference) throw ParameterError("sweep: reference point is not on the grid");
  }

  // Build every factory up front so parameter errors surface before any work.
  std::vector<ClassifierFactory> factories;
  for (const auto& e : grid.entries) {
    ModelSpec spec = base;
    spec.k = e.key.k;
    spec.lambda = e.key.lambda;
    factories.push_back(make_factory(spec));
  }

  CvOptions inner = options.cv;
  inner.jobs = 1;
  const auto n = static_cast<std::ptrdiff_t>(grid.entries.size());
  std::vector<std::exception_ptr> failures(grid.entries.size());
  auto run_point = [&](std::size_t i) {
    try {
      auto& e = grid.entries[i];
      e.result = run_cv(data, factories[i], folds, inner);
      e.result.spec = base;
      e.result.spec.k = e.key.k;
      e.result.spec.lambda = e.key.lambda;
    } catch (...) {
      failures[i] = std::current_exception();
    }
  };
  const int threads = static_cast<int>(std::max<std::size_t>(1, options.cv.jobs));
  if (threads > 1) {
#pragma omp parallel for num_threads(threads) schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < n; ++i) run_point(static_cast<std::size_t>(i));
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) run_point(static_cast<std::size_t>(i));
  }
  for (auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  return grid;
}

ConfidenceGrid confidence_grid(const Pair& pair, std::pair<double, double> x_range,
                               std::pair<double, double> y_range, std::size_t nx,
                               std::size_t ny, double epsilon) {
  if (pair.plus.size() != 2 || pair.minus.size() != 2) {
    throw DimensionError("confidence_grid: pair must be two-dimensional");
  }
  if (nx < 2 || ny < 2) throw ParameterError("confidence_grid: resolution must be >= 2");
  if (!(epsilon > 0.0)) throw ParameterError("confidence_grid: epsilon must be > 0");
  const Hyperplane h = make_hyperplane(pair);

  auto lattice = [](std::pair<double, double> range, std::size_t n) {
    std::vector<double> v(n);
    const double span = range.second - range.first;
    for (std::size_t i = 0; i < n; ++i) {
      v[i] = range.first + span * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return v;
  };
  ConfidenceGrid g;
  g.xs = lattice(x_range, nx);
  g.ys = lattice(y_range, ny);
  g.values.resize(nx * ny);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t iy = 0; iy < static_cast<std::ptrdiff_t>(ny); ++iy) {
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const double p[2] = {g.xs[ix], g.ys[static_cast<std::size_t>(iy)]};
      g.values[static_cast<std::size_t>(iy) * nx + ix] = confidence(h, p, epsilon);
    }
  }
  return g;
}

}  // namespace vsc
