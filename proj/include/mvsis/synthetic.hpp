#pragma once

// County-style synthetic panels: groups of grid-shaped counties, each group
// an island driven by a homogeneous multi-program model with h = 1.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "mvsis/data.hpp"

namespace mvsis {

struct SyntheticGroup {
  std::string label;
  Index rows = 3;
  Index cols = 3;
  /// Lumped rates per program.
  std::vector<double> beta;
  std::vector<double> delta;
};

struct SyntheticPanelConfig {
  std::vector<SyntheticGroup> groups;
  std::vector<int> years;
  std::vector<std::string> programs{"1", "2"};
  std::int64_t eligible = 1000000;
  std::uint64_t seed = 1;
};

struct SyntheticPanel {
  PanelDataset dataset;
  BorderList borders;
  std::map<std::string, std::string> partition;
};

/// Unit ids are "<label>-<r>-<c>"; borders join 4-neighbours inside a group.
SyntheticPanel make_synthetic_panel(const SyntheticPanelConfig& config);

/// Default bi-program panel: groups KY, ID and TN sharing one set of rates
/// over 2009..2014.
SyntheticPanelConfig default_synthetic_config();

/// Writes panel.csv (rounded enrolled counts), the exact panel.json,
/// borders.csv and partition.csv. Loading panel.csv recomputes eligible
/// counts from the largest yearly total, so only panel.json reproduces the
/// generating fractions.
void write_synthetic_panel(const SyntheticPanel& panel, const std::filesystem::path& directory);

}  // namespace mvsis
