#include "vsc/records.hpp"

#include <cinttypes>
#include <cstdio>

#include <json.hpp>

#include "vsc/data.hpp"
#include "vsc/error.hpp"

namespace vsc {
namespace {

using ordered_json = nlohmann::ordered_json;

// nlohmann prints the shortest round-trip form; records use 17 digits.
void write_json(const ordered_json& j, std::string& out) {
  switch (j.type()) {
    case ordered_json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += ordered_json(it.key()).dump();
        out += ':';
        write_json(it.value(), out);
      }
      out += '}';
      break;
    }
    case ordered_json::value_t::array: {
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ',';
        write_json(j[i], out);
      }
      out += ']';
      break;
    }
    case ordered_json::value_t::number_float:
      out += format_real(j.get<double>());
      break;
    default:
      out += j.dump();
  }
}

std::uint64_t parse_hash(const std::string& s, std::size_t line_no) {
  std::uint64_t v = 0;
  if (s.size() != 16 || std::sscanf(s.c_str(), "%16" SCNx64, &v) != 1) {
    throw ParseError("bad dataset_hash '" + s + "'", line_no);
  }
  return v;
}

}  // namespace

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

std::string to_json_line(const ResultRecord& rec) {
  const CvResult& r = rec.result;
  ordered_json j;
  j["schema_version"] = kRecordSchemaVersion;
  j["kind"] = rec.kind;
  j["dataset"] = r.dataset_id;
  j["dataset_hash"] = hash_hex(r.dataset_hash);
  j["model"] = r.classifier_id;
  j["k"] = r.spec.k;
  j["lambda"] = r.spec.lambda;
  j["epsilon"] = r.spec.epsilon;
  j["neighbors"] = r.spec.neighbors;
  j["folds"] = r.n_folds;
  j["seed"] = r.model_seed;
  j["fold_seed"] = r.fold_seed;
  j["scale"] = std::string(to_string(r.scale_mode));
  j["fold_f1"] = r.fold_f1;
  j["mean_f1"] = r.mean_f1;
  j["std_f1"] = r.std_f1;
  if (rec.normalized_f1) {
    j["normalized_f1"] = *rec.normalized_f1;
    j["normalized_by"] = rec.normalized_by;
    j["is_reference"] = rec.is_reference;
  }
  std::string out;
  write_json(j, out);
  return out;
}

ResultRecord parse_json_line(std::string_view line, std::size_t line_no) {
  ordered_json j;
  try {
    j = ordered_json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
  }
  try {
    const int version = j.at("schema_version").get<int>();
    if (version != kRecordSchemaVersion) {
      throw ParseError("unsupported schema_version " + std::to_string(version), line_no);
    }
    ResultRecord rec;
    CvResult& r = rec.result;
    rec.kind = j.at("kind").get<std::string>();
    r.dataset_id = j.at("dataset").get<std::string>();
    r.dataset_hash = parse_hash(j.at("dataset_hash").get<std::string>(), line_no);
    r.classifier_id = j.at("model").get<std::string>();
    r.spec.id = parse_model_id(r.classifier_id);
    r.spec.k = j.at("k").get<std::size_t>();
    r.spec.lambda = j.at("lambda").get<double>();
    r.spec.epsilon = j.at("epsilon").get<double>();
    r.spec.neighbors = j.at("neighbors").get<std::size_t>();
    r.n_folds = j.at("folds").get<std::size_t>();
    r.model_seed = j.at("seed").get<std::uint64_t>();
    r.fold_seed = j.at("fold_seed").get<std::uint64_t>();
    r.scale_mode = parse_scale_mode(j.at("scale").get<std::string>());
    r.fold_f1 = j.at("fold_f1").get<std::vector<double>>();
    r.mean_f1 = j.at("mean_f1").get<double>();
    r.std_f1 = j.at("std_f1").get<double>();
    if (j.contains("normalized_f1")) {
      rec.normalized_f1 = j.at("normalized_f1").get<double>();
      rec.normalized_by = j.value("normalized_by", std::string{});
      rec.is_reference = j.value("is_reference", false);
    }
    return rec;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad record: ") + e.what(), line_no);
  } catch (const ParameterError& e) {
    throw ParseError(std::string("bad record: ") + e.what(), line_no);
  }
}

std::vector<ResultRecord> read_records(const std::string& path) {
  const std::string text = read_text_file(path);
  std::vector<ResultRecord> out;
  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string::npos) nl = text.size();
    ++line_no;
    std::string_view line(text.data() + start, nl - start);
    if (line.find_first_not_of(" \t\r") != std::string_view::npos) {
      try {
        out.push_back(parse_json_line(line, line_no));
      } catch (const ParseError& e) {
        throw Error(path + ": " + e.what());
      }
    }
    start = nl + 1;
  }
  return out;
}

std::string csv_header() {
  return "schema_version,kind,dataset,dataset_hash,model,k,lambda,epsilon,neighbors,folds,"
         "seed,fold_seed,scale,mean_f1,std_f1,normalized_f1,fold_f1";
}

std::string to_csv_row(const ResultRecord& rec) {
  const CvResult& r = rec.result;
  auto quote = [](const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
      if (c == '"') out += '"';
      out += c;
    }
    return out + "\"";
  };
  std::string folds;
  for (std::size_t i = 0; i < r.fold_f1.size(); ++i) {
    if (i) folds += ';';
    folds += format_real(r.fold_f1[i]);
  }
  std::string row = std::to_string(kRecordSchemaVersion) + "," + rec.kind + "," +
                    quote(r.dataset_id) + "," + hash_hex(r.dataset_hash) + "," +
                    r.classifier_id + "," + std::to_string(r.spec.k) + "," +
                    format_real(r.spec.lambda) + "," + format_real(r.spec.epsilon) + "," +
                    std::to_string(r.spec.neighbors) + "," + std::to_string(r.n_folds) + "," +
                    std::to_string(r.model_seed) + "," + std::to_string(r.fold_seed) + "," +
                    std::string(to_string(r.scale_mode)) + "," + format_real(r.mean_f1) + "," +
                    format_real(r.std_f1) + ",";
  if (rec.normalized_f1) row += format_real(*rec.normalized_f1);
  row += "," + folds;
  return row;
}

}  // namespace vsc
