#include "vsc/cli.hpp"

#include <omp.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <json.hpp>
#include <unistd.h>

#include "vsc/data.hpp"
#include "vsc/error.hpp"
#include "vsc/eval.hpp"
#include "vsc/records.hpp"

namespace vsc {
namespace {

constexpr std::uint64_t kFallbackSeed = 42;

/// Rejected flag combination; reported as a usage error.
class UsageError : public Error {
 public:
  using Error::Error;
};

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("VSC_SEED"); env && *env) {
    char* end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (errno != 0 || *end != '\0' || env[0] == '-') {
      throw UsageError(std::string("VSC_SEED is not an unsigned integer: '") + env + "'");
    }
    return v;
  }
  return kFallbackSeed;
}

// Writes to a sibling temp file and renames it over `path`, so a failed run
// never leaves a partial file behind.
void write_atomically(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write '" + path + "'");
    f << contents;
    f.flush();
    if (!f) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error("cannot write '" + path + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error("cannot move output into place at '" + path + "'");
  }
}

template <typename T>
std::vector<T> parse_list(const std::string& text, const char* what) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::istringstream is(item);
    T v{};
    if (!(is >> v) || !(is >> std::ws).eof()) {
      throw UsageError(std::string("bad ") + what + " entry '" + item + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw UsageError(std::string("empty ") + what);
  return out;
}

std::pair<double, double> parse_xy(const std::string& text, const char* what) {
  const auto v = parse_list<double>(text, what);
  if (v.size() != 2) throw UsageError(std::string(what) + " needs two comma-separated numbers");
  return {v[0], v[1]};
}

SweepKey parse_reference(const std::string& text) {
  SweepKey key;
  bool has_k = false;
  bool has_lambda = false;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("--normalize-ref expects k=<int>,lambda=<real>");
    const auto name = item.substr(0, eq);
    const auto value = item.substr(eq + 1);
    if (name == "k") {
      key.k = parse_list<std::size_t>(value, "k")[0];
      has_k = true;
    } else if (name == "lambda") {
      key.lambda = parse_list<double>(value, "lambda")[0];
      has_lambda = true;
    } else {
      throw UsageError("--normalize-ref: unknown key '" + name + "'");
    }
  }
  if (!has_k || !has_lambda) throw UsageError("--normalize-ref expects k=<int>,lambda=<real>");
  return key;
}

std::string fixed(double v, int digits = 4) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

struct DataFlags {
  std::string path;
  std::string label_column = "class";
  std::string positive;
};

void add_data_flags(CLI::App& cmd, DataFlags& f) {
  cmd.add_option("--data", f.path, "Dataset file (.dat = Keel, otherwise CSV)")->required();
  cmd.add_option("--label-column", f.label_column, "CSV label column")->capture_default_str();
  cmd.add_option("--positive", f.positive,
                 "Positive class value (default: first class declared or seen)");
}

Dataset load(const DataFlags& f) {
  if (!std::filesystem::exists(f.path)) throw Error("data file not found: '" + f.path + "'");
  std::optional<std::string> positive;
  if (!f.positive.empty()) positive = f.positive;
  return load_dataset(f.path, f.label_column, positive);
}

struct RunFlags {
  std::string model = "vsc";
  std::size_t k = 100;
  double lambda = 1.0;
  double epsilon = 0.01;
  std::size_t neighbors = 5;
  std::size_t folds = 10;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> fold_seed;
  std::string scale = "per-fold";
  std::size_t jobs = 1;
  std::string format = "table";
  std::string out;
};

void add_run_flags(CLI::App& cmd, RunFlags& f, bool grid) {
  cmd.add_option("--model", f.model, "vsc | vsc-noconf | vsc-uniform | elm | knn")
      ->capture_default_str();
  if (!grid) {
    cmd.add_option("--k", f.k, "Hyperplanes (hidden units for elm)")->capture_default_str();
    cmd.add_option("--lambda", f.lambda, "Ridge regularization")->capture_default_str();
  }
  cmd.add_option("--epsilon", f.epsilon, "Confidence denominator stabilizer")
      ->capture_default_str();
  cmd.add_option("--neighbors", f.neighbors, "k for the knn model")->capture_default_str();
  cmd.add_option("--folds", f.folds, "Cross-validation folds")->capture_default_str();
  cmd.add_option("--seed", f.seed, "Master seed (default: $VSC_SEED, else 42)");
  cmd.add_option("--fold-seed", f.fold_seed, "Seed of the fold split (default: --seed)");
  cmd.add_option("--scale", f.scale, "per-fold | global | none")->capture_default_str();
  cmd.add_option("--jobs", f.jobs, "Worker threads")->capture_default_str();
  cmd.add_option("--format", f.format, "table | csv | json-lines")->capture_default_str();
  cmd.add_option("--out", f.out, "Write result records to this file");
}

void validate_format(const std::string& format) {
  if (format != "table" && format != "csv" && format != "json-lines") {
    throw UsageError("--format must be table, csv or json-lines");
  }
}

ModelSpec build_spec(const RunFlags& f) {
  ModelSpec spec;
  try {
    spec.id = parse_model_id(f.model);
  } catch (const ParameterError& e) {
    throw UsageError(e.what());
  }
  spec.k = f.k;
  spec.lambda = f.lambda;
  spec.epsilon = f.epsilon;
  spec.neighbors = f.neighbors;
  if (spec.k < 1 && spec.id != ModelId::Knn) throw UsageError("--k must be >= 1");
  if (!(spec.lambda > 0.0)) throw UsageError("--lambda must be > 0");
  if (!(spec.epsilon > 0.0)) throw UsageError("--epsilon must be > 0");
  if (spec.neighbors < 1) throw UsageError("--neighbors must be >= 1");
  return spec;
}

void validate_run(const RunFlags& f) {
  validate_format(f.format);
  if (f.folds < 2) throw UsageError("--folds must be >= 2");
  if (f.jobs < 1) throw UsageError("--jobs must be >= 1");
  try {
    parse_scale_mode(f.scale);
  } catch (const ParameterError& e) {
    throw UsageError(e.what());
  }
}

std::string render_records(const std::vector<ResultRecord>& recs, const std::string& format) {
  std::string s;
  if (format == "csv") {
    s = csv_header() + "\n";
    for (const auto& r : recs) s += to_csv_row(r) + "\n";
  } else {
    for (const auto& r : recs) s += to_json_line(r) + "\n";
  }
  return s;
}

void emit_records(const std::vector<ResultRecord>& recs, const RunFlags& f, std::ostream& out,
                  const std::string& table) {
  if (f.format == "table") {
    out << table;
  } else {
    out << render_records(recs, f.format);
  }
  if (!f.out.empty()) {
    write_atomically(f.out, render_records(recs, f.format == "csv" ? "csv" : "json-lines"));
  }
}

struct PreparedRun {
  Dataset data;
  FoldPlan plan;
  std::uint64_t seed = 0;
  std::uint64_t fold_seed = 0;
  ScaleMode scale = ScaleMode::PerFold;
};

PreparedRun prepare(const DataFlags& df, const RunFlags& rf) {
  PreparedRun p;
  p.seed = resolve_seed(rf.seed);
  p.fold_seed = rf.fold_seed.value_or(p.seed);
  p.scale = parse_scale_mode(rf.scale);
  p.data = load(df);
  if (rf.folds > p.data.size()) {
    throw UsageError("--folds " + std::to_string(rf.folds) + " exceeds the " +
                     std::to_string(p.data.size()) + " samples in '" + df.path + "'");
  }
  Rng fold_rng(p.fold_seed);
  p.plan = stratified_folds(p.data.y, rf.folds, fold_rng);
  return p;
}

void label_result(CvResult& r, const PreparedRun& p, const ModelSpec& spec) {
  r.classifier_id = std::string(to_string(spec.id));
  r.dataset_id = p.data.source;
  r.dataset_hash = p.data.content_hash();
  r.spec = spec;
  r.fold_seed = p.fold_seed;
}

int cmd_gen(const std::string& name, std::size_t n, std::size_t dim, double noise,
            std::optional<std::uint64_t> seed_flag, const std::string& out_path,
            std::ostream& out) {
  if (n < 2) throw UsageError("--n must be >= 2");
  const std::uint64_t seed = resolve_seed(seed_flag);
  Rng rng(seed);
  Dataset d;
  if (name == "twonorm") {
    d = gen_twonorm(n, dim, rng);
  } else if (name == "ringnorm") {
    d = gen_ringnorm(n, dim, rng);
  } else if (name == "xor_blobs") {
    if (!(noise > 0.0)) throw UsageError("--noise must be > 0");
    d = gen_xor_blobs(n, noise, rng);
  } else {
    throw UsageError("unknown generator '" + name + "' (expected twonorm, ringnorm, xor_blobs)");
  }
  if (dim < 1) throw UsageError("--dim must be >= 1");
  const std::string csv = write_csv(d);
  std::ostringstream summary;
  summary << "N=" << d.size() << " n=" << d.dim() << " positive=" << d.count_positive()
          << " negative=" << d.count_negative() << " seed=" << seed << "\n";
  if (out_path.empty()) {
    out << csv;
    std::cerr << summary.str();
  } else {
    write_atomically(out_path, csv);
    out << "wrote " << out_path << ": " << summary.str();
  }
  return 0;
}

std::string cv_table(const CvResult& r) {
  std::ostringstream os;
  os << "dataset  " << r.dataset_id << " [" << hash_hex(r.dataset_hash) << "]\n"
     << "model    " << r.classifier_id;
  if (r.spec.id == ModelId::Knn) {
    os << " (neighbors=" << r.spec.neighbors << ")";
  } else {
    os << " (k=" << r.spec.k << ", lambda=" << r.spec.lambda;
    if (r.spec.id != ModelId::Elm) os << ", epsilon=" << r.spec.epsilon;
    os << ")";
  }
  os << "\nfolds    " << r.n_folds << " (fold seed " << r.fold_seed << ", model seed "
     << r.model_seed << ", scale " << to_string(r.scale_mode) << ")\n\n"
     << "fold  f1\n";
  for (std::size_t i = 0; i < r.fold_f1.size(); ++i) {
    os << std::setw(4) << i + 1 << "  " << fixed(r.fold_f1[i]) << "\n";
  }
  os << "mean  " << fixed(r.mean_f1) << "\nstd   " << fixed(r.std_f1) << "\n";
  return os.str();
}

int cmd_cv(const DataFlags& df, const RunFlags& rf, std::ostream& out) {
  validate_run(rf);
  omp_set_num_threads(static_cast<int>(rf.jobs));
  const ModelSpec spec = build_spec(rf);
  const PreparedRun p = prepare(df, rf);
  CvOptions opts{p.scale, p.seed, rf.jobs};
  CvResult r = run_cv(p.data, make_factory(spec), p.plan, opts);
  label_result(r, p, spec);
  ResultRecord rec;
  rec.result = r;
  emit_records({rec}, rf, out, cv_table(r));
  return 0;
}

int cmd_sweep(const DataFlags& df, RunFlags rf, const std::string& k_list,
              const std::string& lambda_list, const std::string& ref_text,
              const std::string& against, std::ostream& out) {
  validate_run(rf);
  omp_set_num_threads(static_cast<int>(rf.jobs));
  const ModelSpec base = build_spec(rf);
  SweepOptions so;
  so.k_list = parse_list<std::size_t>(k_list, "--k-list");
  so.lambda_list = parse_list<double>(lambda_list, "--lambda-list");
  for (auto k : so.k_list) {
    if (k < 1) throw UsageError("--k-list entries must be >= 1");
  }
  for (auto l : so.lambda_list) {
    if (!(l > 0.0)) throw UsageError("--lambda-list entries must be > 0");
  }
  const SweepKey ref = parse_reference(ref_text);
  so.reference = against.empty() ? std::optional<SweepKey>(ref) : std::nullopt;
  if (so.reference &&
      (std::find(so.k_list.begin(), so.k_list.end(), ref.k) == so.k_list.end() ||
       std::find(so.lambda_list.begin(), so.lambda_list.end(), ref.lambda) ==
           so.lambda_list.end())) {
    throw UsageError("--normalize-ref point is not on the grid");
  }

  std::vector<ResultRecord> external;
  if (!against.empty()) external = read_records(against);

  const PreparedRun p = prepare(df, rf);
  so.cv = CvOptions{p.scale, p.seed, rf.jobs};
  const SweepGrid grid = sweep(p.data, base, p.plan, so);

  std::vector<ResultRecord> recs;
  for (std::size_t i = 0; i < grid.entries.size(); ++i) {
    ResultRecord rec;
    rec.kind = "sweep";
    rec.result = grid.entries[i].result;
    label_result(rec.result, p, rec.result.spec);
    if (against.empty()) {
      rec.normalized_f1 = grid.normalized(i);
      rec.normalized_by = "k=" + std::to_string(ref.k) + ",lambda=" + format_real(ref.lambda);
      rec.is_reference = grid.reference == i;
    } else {
      const ResultRecord* match = nullptr;
      for (const auto& e : external) {
        if (e.result.spec.k == rec.result.spec.k) {
          match = &e;
          break;
        }
      }
      if (!match && external.size() == 1) match = &external.front();
      if (!match) {
        throw Error("'" + against + "' has no record with k=" + std::to_string(rec.result.spec.k));
      }
      if (match->result.dataset_hash != rec.result.dataset_hash) {
        throw Error("'" + against + "' was produced on a different dataset");
      }
      if (match->result.mean_f1 == 0.0) throw Error("baseline mean F1 is zero");
      rec.normalized_f1 = rec.result.mean_f1 / match->result.mean_f1;
      rec.normalized_by = against;
    }
    recs.push_back(std::move(rec));
  }

  std::ostringstream table;
  table << "dataset  " << p.data.source << "\nmodel    " << to_string(base.id)
        << "\nnormalized mean F1 (raw in brackets), normalized by "
        << recs.front().normalized_by << "\n\n" << std::setw(10) << "k \\ lambda";
  for (double l : so.lambda_list) table << std::setw(20) << l;
  table << "\n";
  std::size_t idx = 0;
  for (std::size_t k : so.k_list) {
    table << std::setw(10) << k;
    for (std::size_t li = 0; li < so.lambda_list.size(); ++li, ++idx) {
      table << std::setw(20)
            << (fixed(*recs[idx].normalized_f1) + " (" + fixed(recs[idx].result.mean_f1) + ")");
    }
    table << "\n";
  }
  emit_records(recs, rf, out, table.str());
  return 0;
}

int cmd_compare(const std::vector<std::string>& files, const std::string& reference,
                double tie_eps, double alpha, const std::string& format,
                const std::string& out_path, std::ostream& out) {
  validate_format(format);
  std::vector<CvResult> results;
  for (const auto& f : files) {
    if (!std::filesystem::exists(f)) throw Error("record file not found: '" + f + "'");
    for (auto& rec : read_records(f)) results.push_back(std::move(rec.result));
  }
  if (results.size() < 2) throw UsageError("compare needs at least two result records");
  // Disambiguate repeated model ids (vsc, vsc#2, ...).
  std::map<std::string, int> seen;
  for (auto& r : results) {
    const int n = ++seen[r.classifier_id];
    if (n > 1) r.classifier_id += "#" + std::to_string(n);
  }
  std::size_t ref = 0;
  if (!reference.empty()) {
    auto it = std::find_if(results.begin(), results.end(),
                           [&](const CvResult& r) { return r.classifier_id == reference; });
    if (it == results.end()) throw UsageError("--reference '" + reference + "' not among the records");
    ref = static_cast<std::size_t>(it - results.begin());
  }
  Comparison cmp;
  try {
    cmp = compare(results, alpha);
  } catch (const ParameterError& e) {
    throw Error(std::string(e.what()) + "; refusing to compare unpaired runs");
  }
  std::vector<std::pair<std::string, double>> scores;
  for (std::size_t i = 0; i < cmp.ids.size(); ++i) scores.emplace_back(cmp.ids[i], cmp.mean_f1[i]);
  const auto ranks = rankings(scores, tie_eps);
  auto rank_of = [&](const std::string& id) {
    for (const auto& [name, r] : ranks) {
      if (name == id) return r;
    }
    return 0;
  };

  // Marks follow the results table convention: a competitor significantly
  // worse than the reference gets "▼", significantly better gets "△".
  auto mark = [&](std::size_t i, bool ascii) -> std::string {
    if (i == ref) return "";
    const auto& cell = cmp.cells[i][ref];
    if (!cell.test.significant || cell.direction == 0) return "";
    if (ascii) return cell.direction < 0 ? "worse" : "better";
    return cell.direction < 0 ? "▼" : "△";
  };

  std::ostringstream os;
  if (format == "table") {
    os << "reference  " << cmp.ids[ref] << "  (paired two-tailed t-test, alpha=" << alpha
       << ")\n\n"
       << std::left << std::setw(16) << "model" << std::right << std::setw(9) << "mean_f1"
       << "  " << std::setw(4) << "mark" << std::setw(10) << "t" << std::setw(10) << "p"
       << std::setw(6) << "rank" << "\n";
    for (std::size_t i = 0; i < cmp.ids.size(); ++i) {
      const auto& t = cmp.cells[i][ref].test;
      os << std::left << std::setw(16) << cmp.ids[i] << std::right << std::setw(9)
         << fixed(cmp.mean_f1[i]) << "  ";
      const auto m = mark(i, false);
      os << m << std::string(m.empty() ? 4 : 3, ' ');
      if (i == ref) {
        os << std::setw(10) << "-" << std::setw(10) << "-";
      } else {
        os << std::setw(10) << fixed(t.t_stat) << std::setw(10) << fixed(t.p_value);
      }
      os << std::setw(6) << rank_of(cmp.ids[i]) << "\n";
    }
  } else {
    if (format == "csv") {
      os << "reference,model,mean_f1,direction,t_stat,dof,p_value,significant,mark,rank\n";
    }
    for (std::size_t i = 0; i < cmp.ids.size(); ++i) {
      const auto& cell = cmp.cells[i][ref];
      if (format == "csv") {
        os << cmp.ids[ref] << "," << cmp.ids[i] << "," << format_real(cmp.mean_f1[i]) << ","
           << cell.direction << "," << format_real(cell.test.t_stat) << "," << cell.test.dof
           << "," << format_real(cell.test.p_value) << ","
           << (cell.test.significant ? "true" : "false") << "," << mark(i, true) << ","
           << rank_of(cmp.ids[i]) << "\n";
      } else {
        nlohmann::ordered_json j;
        j["schema_version"] = kRecordSchemaVersion;
        j["kind"] = "compare";
        j["reference"] = cmp.ids[ref];
        j["model"] = cmp.ids[i];
        j["mean_f1"] = cmp.mean_f1[i];
        j["direction"] = cell.direction;
        j["t_stat"] = std::isfinite(cell.test.t_stat) ? nlohmann::ordered_json(cell.test.t_stat)
                                                      : nlohmann::ordered_json(nullptr);
        j["dof"] = cell.test.dof;
        j["p_value"] = cell.test.p_value;
        j["significant"] = cell.test.significant;
        j["mark"] = mark(i, true);
        j["rank"] = rank_of(cmp.ids[i]);
        os << j.dump() << "\n";
      }
    }
  }
  out << os.str();
  if (!out_path.empty()) write_atomically(out_path, os.str());
  return 0;
}

int cmd_heatmap(const std::string& plus, const std::string& minus, const std::string& xr,
                const std::string& yr, std::size_t resolution, double epsilon,
                const std::string& out_path, std::ostream& out) {
  if (resolution < 2) throw UsageError("--resolution must be >= 2");
  if (!(epsilon > 0.0)) throw UsageError("--epsilon must be > 0");
  const auto p = parse_xy(plus, "--plus");
  const auto m = parse_xy(minus, "--minus");
  const auto x_range = parse_xy(xr, "--x-range");
  const auto y_range = parse_xy(yr, "--y-range");
  if (!(x_range.second > x_range.first) || !(y_range.second > y_range.first)) {
    throw UsageError("ranges must be increasing");
  }
  const Pair pair{{p.first, p.second}, {m.first, m.second}};
  const auto g = confidence_grid(pair, x_range, y_range, resolution, resolution, epsilon);
  std::string csv;
  csv.reserve(g.values.size() * 20);
  for (std::size_t iy = 0; iy < g.ys.size(); ++iy) {
    for (std::size_t ix = 0; ix < g.xs.size(); ++ix) {
      if (ix) csv += ',';
      csv += format_real(g.at(iy, ix));
    }
    csv += '\n';
  }
  if (out_path.empty()) {
    out << csv;
  } else {
    write_atomically(out_path, csv);
    out << "wrote " << out_path << ": " << g.ys.size() << " rows x " << g.xs.size()
        << " columns\n";
  }
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Very Simple Classifier: pair-feature classifier and benchmark harness", "vsc"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a synthetic dataset as CSV");
  std::string gen_name;
  std::string gen_name_flag;
  std::size_t gen_n = 2000;
  std::size_t gen_dim = 20;
  double gen_noise = 0.2;
  std::optional<std::uint64_t> gen_seed;
  std::string gen_out;
  gen->add_option("name", gen_name, "twonorm | ringnorm | xor_blobs");
  gen->add_option("--dataset", gen_name_flag, "twonorm | ringnorm | xor_blobs");
  gen->add_option("--n", gen_n, "Samples")->capture_default_str();
  gen->add_option("--dim", gen_dim, "Features (twonorm, ringnorm)")->capture_default_str();
  gen->add_option("--noise", gen_noise, "Blob standard deviation (xor_blobs)")
      ->capture_default_str();
  gen->add_option("--seed", gen_seed, "Seed (default: $VSC_SEED, else 42)");
  gen->add_option("--out", gen_out, "Output CSV path (default: stdout)");

  // cv
  auto* cv = app.add_subcommand("cv", "Stratified k-fold cross-validation of one model");
  DataFlags cv_data;
  RunFlags cv_run;
  add_data_flags(*cv, cv_data);
  add_run_flags(*cv, cv_run, false);

  // sweep
  auto* sw = app.add_subcommand("sweep", "Cross-validate a (k, lambda) grid");
  DataFlags sw_data;
  RunFlags sw_run;
  std::string k_list = "25,50,100,250,500";
  std::string lambda_list = "0.1,1,10";
  std::string norm_ref = "k=100,lambda=1";
  std::string norm_against;
  add_data_flags(*sw, sw_data);
  add_run_flags(*sw, sw_run, true);
  sw->add_option("--k-list", k_list, "Comma-separated k values")->capture_default_str();
  sw->add_option("--lambda-list", lambda_list, "Comma-separated lambda values")
      ->capture_default_str();
  sw->add_option("--normalize-ref", norm_ref, "Grid point used as the normalizer")
      ->capture_default_str();
  sw->add_option("--normalize-against", norm_against,
                 "Normalize by records of another run, matched on k");

  // compare
  auto* cmp = app.add_subcommand("compare", "Significance marks and ranks across result records");
  std::vector<std::string> cmp_files;
  std::string cmp_ref;
  double tie_eps = 0.001;
  double alpha = kSignificanceLevel;
  std::string cmp_format = "table";
  std::string cmp_out;
  cmp->add_option("records", cmp_files, "json-lines result files")->required();
  cmp->add_option("--reference", cmp_ref, "Reference model id (default: first record)");
  cmp->add_option("--tie-eps", tie_eps, "Rank tie threshold")->capture_default_str();
  cmp->add_option("--alpha", alpha, "Significance level")->capture_default_str();
  cmp->add_option("--format", cmp_format, "table | csv | json-lines")->capture_default_str();
  cmp->add_option("--out", cmp_out, "Also write the report to this file");

  // heatmap
  auto* hm = app.add_subcommand("heatmap", "Confidence measure of one pair on a 2-D lattice");
  std::string hm_plus = "-5,0";
  std::string hm_minus = "5,0";
  std::string hm_x = "-10,10";
  std::string hm_y = "-10,10";
  std::size_t hm_res = 201;
  double hm_eps = 0.01;
  std::string hm_out;
  hm->add_option("--plus", hm_plus, "Positive endpoint x,y (use --plus=-5,0 for negatives)")
      ->capture_default_str();
  hm->add_option("--minus", hm_minus, "Negative endpoint x,y")->capture_default_str();
  hm->add_option("--x-range", hm_x, "lo,hi")->capture_default_str();
  hm->add_option("--y-range", hm_y, "lo,hi")->capture_default_str();
  hm->add_option("--resolution", hm_res, "Lattice points per axis")->capture_default_str();
  hm->add_option("--epsilon", hm_eps, "Denominator stabilizer")->capture_default_str();
  hm->add_option("--out", hm_out, "Output CSV path (default: stdout)");

  std::vector<std::string> argv_store;
  argv_store.reserve(args.size() + 1);
  argv_store.emplace_back("vsc");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    err << "error: " << msg << "\n";
    return 2;
  }

  try {
    if (*gen) {
      if (!gen_name.empty() && !gen_name_flag.empty() && gen_name != gen_name_flag) {
        throw UsageError("generator given twice with different names");
      }
      const std::string name = gen_name.empty() ? gen_name_flag : gen_name;
      if (name.empty()) throw UsageError("gen: missing generator name");
      return cmd_gen(name, gen_n, gen_dim, gen_noise, gen_seed, gen_out, out);
    }
    if (*cv) return cmd_cv(cv_data, cv_run, out);
    if (*sw) {
      return cmd_sweep(sw_data, sw_run, k_list, lambda_list, norm_ref, norm_against, out);
    }
    if (*cmp) return cmd_compare(cmp_files, cmp_ref, tie_eps, alpha, cmp_format, cmp_out, out);
    if (*hm) return cmd_heatmap(hm_plus, hm_minus, hm_x, hm_y, hm_res, hm_eps, hm_out, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    err << "error: " << msg << "\n";
    return 1;
  }
  return 2;
}

}  // namespace vsc
