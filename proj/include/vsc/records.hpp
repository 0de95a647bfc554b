#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vsc/eval.hpp"

namespace vsc {

inline constexpr int kRecordSchemaVersion = 1;

/// One line of a result file. `kind` is "cv" or "sweep"; sweep records also
/// carry the normalized score and the reference it was normalized against.
struct ResultRecord {
  std::string kind = "cv";
  CvResult result;
  std::optional<double> normalized_f1;
  std::string normalized_by;  // "k=100,lambda=1" or a run file path
  bool is_reference = false;
};

/// Single-line JSON object with a fixed field order; doubles are printed with
/// 17 significant digits.
std::string to_json_line(const ResultRecord& rec);

/// Inverse of to_json_line. Throws ParseError on malformed input or an
/// unsupported schema_version.
ResultRecord parse_json_line(std::string_view line, std::size_t line_no = 1);

/// Reads every non-blank line of a json-lines file.
std::vector<ResultRecord> read_records(const std::string& path);

std::string csv_header();
std::string to_csv_row(const ResultRecord& rec);

/// "%.17g".
std::string format_real(double v);

/// 16 lowercase hex digits.
std::string hash_hex(std::uint64_t h);

}  // namespace vsc
