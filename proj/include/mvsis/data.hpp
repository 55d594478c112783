#pragma once

// Network construction, enrollment panel ingestion and measurement noise.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mvsis/model.hpp"
#include "mvsis/types.hpp"

namespace mvsis {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// a_ij = exp(-||z_i - z_j||^2) for i != j, zero diagonal.
Matrix geometric_network(std::span<const Point2> positions);

using BorderList = std::vector<std::pair<std::string, std::string>>;

/// 0/1 adjacency with a_ij = 1 when i and j share a border (either order) or i == j.
Matrix county_network(const BorderList& borders, std::span<const std::string> units);

/// Enrollment panel: per year, the fraction of eligible farms in each program.
class PanelDataset {
 public:
  PanelDataset() = default;
  /// fractions[y] is units x programs. Validates the dataset invariants.
  PanelDataset(std::vector<std::string> unit_ids, std::vector<int> years, std::vector<std::string> programs,
               std::vector<Matrix> fractions, std::vector<std::int64_t> eligible_counts, Matrix adjacency);

  Index units() const { return static_cast<Index>(unit_ids_.size()); }
  Index programs() const { return static_cast<Index>(programs_.size()); }
  Index year_count() const { return static_cast<Index>(years_.size()); }
  bool empty() const { return unit_ids_.empty(); }

  const std::vector<std::string>& unit_ids() const { return unit_ids_; }
  const std::vector<int>& years() const { return years_; }
  const std::vector<std::string>& program_labels() const { return programs_; }
  const std::vector<Matrix>& fractions() const { return fractions_; }
  const std::vector<std::int64_t>& eligible_counts() const { return eligible_; }
  const Matrix& adjacency() const { return adjacency_; }

  Index index_of(const std::string& unit) const;

  /// Same data with the adjacency rebuilt from a border list.
  PanelDataset with_borders(const BorderList& borders) const;
  /// Units in `ids` (kept in dataset order) with the induced adjacency, so
  /// borders leaving the subset are dropped.
  PanelDataset subset(std::span<const std::string> ids) const;
  /// Years as consecutive time steps; h is unknown.
  Trajectory as_trajectory() const;

  friend bool operator==(const PanelDataset& a, const PanelDataset& b);

 private:
  std::vector<std::string> unit_ids_;
  std::vector<int> years_;
  std::vector<std::string> programs_;
  std::vector<Matrix> fractions_;
  std::vector<std::int64_t> eligible_;
  Matrix adjacency_;
};

struct PanelLoadOptions {
  /// Program labels in virus order.
  std::vector<std::string> program_labels{"1", "2"};
  /// Units to exclude. An entry ending in '*' drops every id with that prefix.
  std::vector<std::string> drop;
};

/// Reads `unit_id,year,program,enrolled_count` rows. The eligible count of a
/// unit is its largest yearly total over all programs; units never enrolled
/// in any program are removed. Missing rows count as zero enrollment. The
/// adjacency starts as the identity; attach borders with with_borders().
PanelDataset load_panel(std::istream& in, const PanelLoadOptions& options = {});
PanelDataset load_panel(const std::filesystem::path& path, const PanelLoadOptions& options = {});

BorderList load_borders(std::istream& in);
BorderList load_borders(const std::filesystem::path& path);
std::vector<Point2> load_positions(std::istream& in);
std::vector<Point2> load_positions(const std::filesystem::path& path);
/// `unit_id,group` rows.
std::map<std::string, std::string> load_partition(const std::filesystem::path& path);
std::map<std::string, std::string> load_partition(std::istream& in);

/// Adds i.i.d. N(0, sigma^2) draws to every entry (deterministic in `seed`),
/// then clamps every state back into D. Records sigma in the result.
Trajectory inject_noise(const Trajectory& traj, double sigma, std::uint64_t seed);

}  // namespace mvsis
