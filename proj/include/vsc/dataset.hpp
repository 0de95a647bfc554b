#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vsc/linalg.hpp"

namespace vsc {

/// N labelled samples: rows of `x` with labels in {-1, +1}.
struct Dataset {
  Matrix x;
  Vector y;
  std::vector<std::string> feature_names;
  std::string label_name = "class";
  std::string positive_class_name = "positive";
  std::string negative_class_name = "negative";
  std::string source;

  std::size_t size() const noexcept { return x.rows(); }
  std::size_t dim() const noexcept { return x.cols(); }

  std::size_t count_positive() const noexcept;
  std::size_t count_negative() const noexcept { return size() - count_positive(); }

  /// Throws DimensionError if labels are not +-1 or the shapes disagree.
  void validate() const;

  /// Rows `indices` in the given order; metadata copied.
  Dataset subset(std::span<const std::size_t> indices) const;

  /// FNV-1a over shape, feature bytes and labels. Used to check that result
  /// records were produced on the same data.
  std::uint64_t content_hash() const noexcept;
};

/// Features and labels equal bitwise, names equal. `source` is ignored.
bool same_contents(const Dataset& a, const Dataset& b);

}  // namespace vsc
