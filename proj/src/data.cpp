#include "vsc/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "vsc/error.hpp"

namespace vsc {
namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::optional<double> parse_double(std::string_view cell) {
  cell = trim(cell);
  if (cell.empty()) return std::nullopt;
  if (cell.front() == '+') cell.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      if (start < text.size()) lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    auto comma = s.find(',', start);
    auto item = trim(s.substr(start, comma == std::string_view::npos
                                         ? std::string_view::npos
                                         : comma - start));
    if (item.size() >= 2 && (item.front() == '\'' || item.front() == '"') &&
        item.back() == item.front()) {
      item = item.substr(1, item.size() - 2);
    }
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

struct KeelAttribute {
  std::string name;
  bool nominal = false;
  std::vector<std::string> classes;
};

KeelAttribute parse_keel_attribute(std::string_view rest, std::size_t line_no) {
  rest = trim(rest);
  std::size_t end = 0;
  std::string name;
  if (!rest.empty() && (rest.front() == '\'' || rest.front() == '"')) {
    const char quote = rest.front();
    end = rest.find(quote, 1);
    if (end == std::string_view::npos) throw ParseError("unterminated attribute name", line_no);
    name = std::string(rest.substr(1, end - 1));
    ++end;
  } else {
    end = rest.find_first_of(" \t{");
    name = std::string(rest.substr(0, end));
  }
  if (name.empty()) throw ParseError("attribute without a name", line_no);

  KeelAttribute attr;
  attr.name = name;
  std::string_view type = end == std::string_view::npos ? std::string_view{}
                                                         : trim(rest.substr(end));
  if (!type.empty() && type.front() == '{') {
    auto close = type.find('}');
    if (close == std::string_view::npos) throw ParseError("unterminated class list", line_no);
    attr.nominal = true;
    attr.classes = split_list(type.substr(1, close - 1));
    if (attr.classes.empty()) throw ParseError("empty class list", line_no);
    return attr;
  }
  const auto kw = lower(type.substr(0, type.find_first_of(" \t[")));
  if (kw != "real" && kw != "integer" && kw != "numeric") {
    throw ParseError("unknown attribute type '" + std::string(type) + "'", line_no);
  }
  return attr;
}

// Minimal RFC-4180 field splitter for one record. Quoted fields may contain
// commas and doubled quotes; embedded newlines are not supported.
std::vector<std::string> split_csv_record(std::string_view line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"' && trim(cur).empty() && !was_quoted) {
      cur.clear();
      quoted = true;
      was_quoted = true;
    } else if (c == ',') {
      fields.push_back(was_quoted ? cur : std::string(trim(cur)));
      cur.clear();
      was_quoted = false;
    } else if (c != '\r') {
      cur += c;
    }
  }
  if (quoted) throw ParseError("unterminated quoted field", line_no);
  fields.push_back(was_quoted ? cur : std::string(trim(cur)));
  return fields;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos && trim(s) == s) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Dataset parse_keel(std::string_view text, std::optional<std::string> positive_class) {
  std::vector<KeelAttribute> attrs;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::string relation;
  bool in_data = false;

  std::vector<std::string> raw_labels;
  std::vector<double> values;
  std::vector<std::size_t> input_cols;
  std::size_t output_col = 0;

  auto resolve_columns = [&](std::size_t line_no) {
    if (attrs.empty()) throw ParseError("@data before any @attribute", line_no);
    auto index_of = [&](const std::string& name) {
      for (std::size_t i = 0; i < attrs.size(); ++i) {
        if (attrs[i].name == name) return i;
      }
      throw ParseError("undeclared attribute '" + name + "'", line_no);
    };
    if (outputs.empty()) outputs.push_back(attrs.back().name);
    if (outputs.size() != 1) {
      throw ParseError("expected exactly one output attribute", line_no);
    }
    output_col = index_of(outputs.front());
    if (inputs.empty()) {
      for (const auto& a : attrs) {
        if (a.name != outputs.front()) inputs.push_back(a.name);
      }
    }
    if (inputs.empty()) throw ParseError("no input attributes", line_no);
    for (const auto& name : inputs) {
      const auto c = index_of(name);
      if (c == output_col) throw ParseError("attribute is both input and output", line_no);
      if (attrs[c].nominal) {
        throw UnsupportedFeatureError("line " + std::to_string(line_no) +
                                      ": nominal input attribute '" + name +
                                      "' is not supported");
      }
      input_cols.push_back(c);
    }
  };

  const auto lines = split_lines(text);
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const std::size_t line_no = li + 1;
    const auto line = trim(lines[li]);
    if (line.empty() || line.front() == '%') continue;

    if (!in_data) {
      if (line.front() != '@') throw ParseError("expected a header directive", line_no);
      const auto sp = line.find_first_of(" \t");
      const auto directive = lower(line.substr(0, sp));
      const auto rest = sp == std::string_view::npos ? std::string_view{}
                                                     : trim(line.substr(sp));
      if (directive == "@relation") {
        relation = std::string(rest);
      } else if (directive == "@attribute") {
        attrs.push_back(parse_keel_attribute(rest, line_no));
      } else if (directive == "@inputs" || directive == "@input") {
        inputs = split_list(rest);
      } else if (directive == "@outputs" || directive == "@output") {
        outputs = split_list(rest);
      } else if (directive == "@data") {
        resolve_columns(line_no);
        in_data = true;
      } else {
        throw ParseError("unknown directive '" + directive + "'", line_no);
      }
      continue;
    }

    const auto cells = split_list(line);
    // split_list drops empty items, so compare against a raw comma count too.
    const auto n_commas = static_cast<std::size_t>(std::count(line.begin(), line.end(), ','));
    if (cells.size() != attrs.size() || n_commas + 1 != attrs.size()) {
      throw ParseError("expected " + std::to_string(attrs.size()) + " values, got " +
                           std::to_string(n_commas + 1),
                       line_no);
    }
    for (std::size_t c : input_cols) {
      if (cells[c] == "?" || cells[c] == "<null>") {
        throw ParseError("missing value in attribute '" + attrs[c].name + "'", line_no, c + 1);
      }
      auto v = parse_double(cells[c]);
      if (!v) {
        throw ParseError("non-numeric value '" + cells[c] + "' for attribute '" +
                             attrs[c].name + "'",
                         line_no, c + 1);
      }
      values.push_back(*v);
    }
    const auto& label = cells[output_col];
    if (label == "?" || label == "<null>") {
      throw ParseError("missing class value", line_no, output_col + 1);
    }
    const auto& out_attr = attrs[output_col];
    if (out_attr.nominal &&
        std::find(out_attr.classes.begin(), out_attr.classes.end(), label) ==
            out_attr.classes.end()) {
      throw ParseError("class '" + label + "' not declared", line_no, output_col + 1);
    }
    raw_labels.push_back(label);
  }
  if (!in_data) throw ParseError("missing @data section", lines.size());

  const auto& out_attr = attrs[output_col];
  std::vector<std::string> classes = out_attr.classes;
  if (!out_attr.nominal) {
    for (const auto& l : raw_labels) {
      if (std::find(classes.begin(), classes.end(), l) == classes.end()) classes.push_back(l);
    }
  }

  Dataset d;
  if (positive_class) {
    d.positive_class_name = *positive_class;
  } else if (!classes.empty()) {
    d.positive_class_name = classes.front();
  }
  d.negative_class_name = "rest";
  for (const auto& c : classes) {
    if (c != d.positive_class_name) {
      d.negative_class_name = c;
      break;
    }
  }
  std::vector<double> y;
  y.reserve(raw_labels.size());
  for (const auto& l : raw_labels) y.push_back(l == d.positive_class_name ? 1.0 : -1.0);

  d.x = Matrix(raw_labels.size(), input_cols.size(), std::move(values));
  d.y = Vector(std::move(y));
  for (std::size_t c : input_cols) d.feature_names.push_back(attrs[c].name);
  d.label_name = out_attr.name;
  d.source = relation.empty() ? "keel" : relation;
  return d;
}

Dataset parse_csv(std::string_view text, std::string_view label_column,
                  std::optional<std::string> positive_label) {
  const auto lines = split_lines(text);
  std::size_t li = 0;
  while (li < lines.size() && trim(lines[li]).empty()) ++li;
  if (li == lines.size()) throw ParseError("missing header row", 1);

  const auto header = split_csv_record(lines[li], li + 1);
  const auto label_it = std::find(header.begin(), header.end(), label_column);
  if (label_it == header.end()) {
    throw ParseError("label column '" + std::string(label_column) + "' not in header", li + 1);
  }
  const auto label_col = static_cast<std::size_t>(label_it - header.begin());

  Dataset d;
  d.label_name = std::string(label_column);
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c != label_col) d.feature_names.push_back(header[c]);
  }

  std::vector<double> values;
  std::vector<std::string> labels;
  for (++li; li < lines.size(); ++li) {
    if (trim(lines[li]).empty()) continue;
    const auto cells = split_csv_record(lines[li], li + 1);
    if (cells.size() != header.size()) {
      throw ParseError("expected " + std::to_string(header.size()) + " fields, got " +
                           std::to_string(cells.size()),
                       li + 1);
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c == label_col) continue;
      auto v = parse_double(cells[c]);
      if (!v) {
        throw ParseError("non-numeric value '" + cells[c] + "' in column '" + header[c] + "'",
                         li + 1, c + 1);
      }
      values.push_back(*v);
    }
    labels.push_back(cells[label_col]);
  }

  if (positive_label) {
    d.positive_class_name = *positive_label;
  } else if (!labels.empty()) {
    d.positive_class_name = labels.front();
  }
  for (const auto& l : labels) {
    if (l != d.positive_class_name) {
      d.negative_class_name = l;
      break;
    }
  }
  std::vector<double> y;
  y.reserve(labels.size());
  for (const auto& l : labels) y.push_back(l == d.positive_class_name ? 1.0 : -1.0);
  d.x = Matrix(labels.size(), header.size() - 1, std::move(values));
  d.y = Vector(std::move(y));
  d.source = "csv";
  return d;
}

std::string write_csv(const Dataset& data) {
  data.validate();
  std::string out;
  for (std::size_t j = 0; j < data.dim(); ++j) {
    out += csv_escape(j < data.feature_names.size() ? data.feature_names[j]
                                                    : "x" + std::to_string(j + 1));
    out += ',';
  }
  out += csv_escape(data.label_name);
  out += '\n';
  const auto pos = csv_escape(data.positive_class_name);
  const auto neg = csv_escape(data.negative_class_name);
  for (std::size_t r = 0; r < data.size(); ++r) {
    for (double v : data.x.row(r)) {
      out += format_double(v);
      out += ',';
    }
    out += data.y[r] > 0.0 ? pos : neg;
    out += '\n';
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Dataset load_dataset(const std::string& path, std::string_view label_column,
                     std::optional<std::string> positive_label) {
  const auto text = read_text_file(path);
  const bool keel = path.size() >= 4 && lower(path.substr(path.size() - 4)) == ".dat";
  Dataset d = keel ? parse_keel(text, std::move(positive_label))
                   : parse_csv(text, label_column, std::move(positive_label));
  d.source = path;
  return d;
}

Matrix Scaler::transform(const Matrix& x) const {
  if (x.cols() != means.size()) throw DimensionError("Scaler::transform: width mismatch");
  Matrix out(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t j = 0; j < x.cols(); ++j) out(r, j) = (x(r, j) - means[j]) / scales[j];
  }
  return out;
}

Matrix Scaler::inverse_transform(const Matrix& x) const {
  if (x.cols() != means.size()) throw DimensionError("Scaler::inverse_transform: width mismatch");
  Matrix out(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t j = 0; j < x.cols(); ++j) out(r, j) = x(r, j) * scales[j] + means[j];
  }
  return out;
}

Scaler fit_scaler(const Matrix& x) {
  if (x.rows() == 0) throw DimensionError("fit_scaler: no rows");
  const auto n = static_cast<double>(x.rows());
  Scaler s;
  s.means.assign(x.cols(), 0.0);
  s.scales.assign(x.cols(), 0.0);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t j = 0; j < x.cols(); ++j) s.means[j] += x(r, j);
  }
  for (double& m : s.means) m /= n;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t j = 0; j < x.cols(); ++j) {
      const double d = x(r, j) - s.means[j];
      s.scales[j] += d * d;
    }
  }
  for (double& sc : s.scales) {
    sc = std::sqrt(sc / n);
    if (sc < 1e-12) sc = 1.0;
  }
  return s;
}

std::vector<std::size_t> FoldPlan::test_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldPlan::train_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] != fold) out.push_back(i);
  }
  return out;
}

FoldPlan stratified_folds(const Vector& y, std::size_t n_folds, Rng& rng) {
  if (n_folds < 2) throw ParameterError("stratified_folds: need at least 2 folds");
  if (n_folds > y.size()) {
    throw ParameterError("stratified_folds: " + std::to_string(n_folds) +
                         " folds for " + std::to_string(y.size()) + " samples");
  }
  std::vector<std::size_t> pos;
  std::vector<std::size_t> neg;
  for (std::size_t i = 0; i < y.size(); ++i) (y[i] > 0.0 ? pos : neg).push_back(i);

  FoldPlan plan;
  plan.n_folds = n_folds;
  plan.assignments.assign(y.size(), 0);
  std::size_t next = 0;
  for (auto* cls : {&pos, &neg}) {
    std::shuffle(cls->begin(), cls->end(), rng);
    if (!cls->empty() && cls->size() < n_folds) plan.degraded = true;
    for (std::size_t idx : *cls) {
      plan.assignments[idx] = next;
      next = (next + 1) % n_folds;
    }
  }
  return plan;
}

namespace {

Dataset make_generated(std::size_t n, std::size_t dim, std::vector<double> x,
                       std::vector<double> y, std::string source) {
  Dataset d;
  d.x = Matrix(n, dim, std::move(x));
  d.y = Vector(std::move(y));
  for (std::size_t j = 0; j < dim; ++j) d.feature_names.push_back("x" + std::to_string(j + 1));
  d.source = std::move(source);
  return d;
}

}  // namespace

Dataset gen_twonorm(std::size_t n_samples, std::size_t dim, Rng& rng) {
  if (dim == 0) throw ParameterError("gen_twonorm: dim must be >= 1");
  const double a = 2.0 / std::sqrt(static_cast<double>(dim));
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<double> x;
  std::vector<double> y;
  x.reserve(n_samples * dim);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double label = i % 2 == 0 ? 1.0 : -1.0;
    for (std::size_t j = 0; j < dim; ++j) x.push_back(label * a + noise(rng));
    y.push_back(label);
  }
  return make_generated(n_samples, dim, std::move(x), std::move(y),
                        "twonorm(n=" + std::to_string(n_samples) +
                            ",dim=" + std::to_string(dim) + ")");
}

Dataset gen_ringnorm(std::size_t n_samples, std::size_t dim, Rng& rng) {
  if (dim == 0) throw ParameterError("gen_ringnorm: dim must be >= 1");
  const double a = 2.0 / std::sqrt(static_cast<double>(dim));
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<double> x;
  std::vector<double> y;
  x.reserve(n_samples * dim);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const bool positive = i % 2 == 0;
    for (std::size_t j = 0; j < dim; ++j) {
      x.push_back(positive ? 2.0 * noise(rng) : a + noise(rng));
    }
    y.push_back(positive ? 1.0 : -1.0);
  }
  return make_generated(n_samples, dim, std::move(x), std::move(y),
                        "ringnorm(n=" + std::to_string(n_samples) +
                            ",dim=" + std::to_string(dim) + ")");
}

Dataset gen_xor_blobs(std::size_t n_samples, double noise, Rng& rng) {
  if (!(noise > 0.0)) throw ParameterError("gen_xor_blobs: noise must be > 0");
  // Rotation keeps labels alternating +, -, +, -.
  constexpr double centers[4][2] = {{1, 1}, {1, -1}, {-1, -1}, {-1, 1}};
  std::normal_distribution<double> jitter(0.0, noise);
  std::vector<double> x;
  std::vector<double> y;
  x.reserve(n_samples * 2);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const auto& c = centers[i % 4];
    x.push_back(c[0] + jitter(rng));
    x.push_back(c[1] + jitter(rng));
    y.push_back(c[0] * c[1] > 0 ? 1.0 : -1.0);
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", noise);
  return make_generated(n_samples, 2, std::move(x), std::move(y),
                        "xor_blobs(n=" + std::to_string(n_samples) + ",noise=" + buf + ")");
}

}  // namespace vsc
