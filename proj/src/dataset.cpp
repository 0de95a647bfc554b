#include "vsc/dataset.hpp"

#include <bit>
#include <cstring>

#include "vsc/error.hpp"

namespace vsc {

std::size_t Dataset::count_positive() const noexcept {
  std::size_t n = 0;
  for (double v : y) n += v > 0.0;
  return n;
}

void Dataset::validate() const {
  if (x.rows() != y.size()) {
    throw DimensionError("Dataset: " + std::to_string(x.rows()) + " rows but " +
                         std::to_string(y.size()) + " labels");
  }
  if (!feature_names.empty() && feature_names.size() != x.cols()) {
    throw DimensionError("Dataset: feature name count != column count");
  }
  for (double v : y) {
    if (v != 1.0 && v != -1.0) throw DimensionError("Dataset: label not +-1");
  }
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  std::vector<double> xs;
  std::vector<double> ys;
  xs.reserve(indices.size() * dim());
  ys.reserve(indices.size());
  for (std::size_t idx : indices) {
    if (idx >= size()) throw DimensionError("Dataset::subset: index out of range");
    auto r = x.row(idx);
    xs.insert(xs.end(), r.begin(), r.end());
    ys.push_back(y[idx]);
  }
  Dataset out = *this;
  out.x = Matrix(indices.size(), dim(), std::move(xs));
  out.y = Vector(std::move(ys));
  return out;
}

std::uint64_t Dataset::content_hash() const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](std::uint64_t word) {
    for (int b = 0; b < 8; ++b) {
      h ^= (word >> (8 * b)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  };
  feed(x.rows());
  feed(x.cols());
  for (double v : x.data()) feed(std::bit_cast<std::uint64_t>(v));
  for (double v : y) feed(std::bit_cast<std::uint64_t>(v));
  return h;
}

bool same_contents(const Dataset& a, const Dataset& b) {
  if (a.x.rows() != b.x.rows() || a.x.cols() != b.x.cols()) return false;
  if (std::memcmp(a.x.data().data(), b.x.data().data(),
                  a.x.data().size() * sizeof(double)) != 0) {
    return false;
  }
  return a.y == b.y && a.feature_names == b.feature_names &&
         a.positive_class_name == b.positive_class_name;
}

}  // namespace vsc
