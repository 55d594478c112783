#include <cmath>
#include <unordered_map>

#include "mvsis/data.hpp"
#include "mvsis/error.hpp"

namespace mvsis {

Matrix geometric_network(std::span<const Point2> positions) {
  const auto n = static_cast<Index>(positions.size());
  if (n < 2) throw Error("data-pipeline.geometric_network", ErrorKind::invalid_argument, "need at least two nodes");
  for (Index i = 0; i < n; ++i) {
    const auto& p = positions[static_cast<std::size_t>(i)];
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw Error("data-pipeline.geometric_network", ErrorKind::invalid_argument,
                  "position of node " + std::to_string(i) + " is not finite");
    }
  }
  Matrix a = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const auto& p = positions[static_cast<std::size_t>(i)];
      const auto& q = positions[static_cast<std::size_t>(j)];
      const double dx = p.x - q.x;
      const double dy = p.y - q.y;
      a(i, j) = a(j, i) = std::exp(-(dx * dx + dy * dy));
    }
  }
  return a;
}

Matrix county_network(const BorderList& borders, std::span<const std::string> units) {
  std::unordered_map<std::string, Index> index;
  for (std::size_t i = 0; i < units.size(); ++i) {
    if (!index.emplace(units[i], static_cast<Index>(i)).second) {
      throw Error("data-pipeline.county_network", ErrorKind::invalid_argument, "duplicate unit id '" + units[i] + "'");
    }
  }
  const auto lookup = [&](const std::string& id) {
    const auto it = index.find(id);
    if (it == index.end()) {
      throw Error("data-pipeline.county_network", ErrorKind::invalid_argument, "unknown unit id '" + id + "'");
    }
    return it->second;
  };
  const auto n = static_cast<Index>(units.size());
  Matrix a = Matrix::Identity(n, n);
  for (const auto& [u, v] : borders) {
    const Index i = lookup(u);
    const Index j = lookup(v);
    a(i, j) = a(j, i) = 1.0;
  }
  return a;
}

}  // namespace mvsis
