#pragma once

// File formats: comma-separated tables with a mandatory header row, and JSON
// documents for models, reports and estimates.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mvsis/data.hpp"
#include "mvsis/identification.hpp"
#include "mvsis/model.hpp"
#include "mvsis/spectral.hpp"

namespace mvsis::io {

using Json = nlohmann::ordered_json;

/// A parsed CSV table. Field access by column name.
class CsvTable {
 public:
  static CsvTable parse(std::istream& in, std::string_view source = "<stream>");
  static CsvTable read(const std::filesystem::path& path);

  const std::vector<std::string>& header() const { return header_; }
  std::size_t rows() const { return rows_.size(); }
  /// Throws ErrorKind::parse if a required column is missing.
  std::size_t column(std::string_view name) const;
  const std::string& at(std::size_t row, std::size_t col) const { return rows_[row][col]; }

  double number(std::size_t row, std::size_t col) const;
  long long integer(std::size_t row, std::size_t col) const;
  /// "<source>:<line>" for error messages.
  std::string where(std::size_t row) const;

 private:
  std::string source_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<std::size_t> lines_;
};

/// Shortest text that parses back to the same double.
std::string format_double(double value);

std::string read_text(const std::filesystem::path& path);
/// Writes atomically enough for our purposes: truncate then write.
void write_text(const std::filesystem::path& path, std::string_view text);

// --- trajectories and states ------------------------------------------------

/// `t,node,virus,value`, ordered by t, node, virus.
void write_trajectory(std::ostream& out, const Trajectory& traj);
Trajectory read_trajectory(std::istream& in);
Trajectory read_trajectory(const std::filesystem::path& path);

/// `node,virus,value`.
void write_state(std::ostream& out, const EpidemicState& x);
EpidemicState read_state(std::istream& in);
EpidemicState read_state(const std::filesystem::path& path);

/// `t,node,red,green,blue` for every state of a two-virus trajectory.
void write_colors(std::ostream& out, const Trajectory& traj);

/// Sparse `row,col,weight` triplets; unspecified entries are zero.
Matrix read_adjacency(std::istream& in, Index nodes);
Matrix read_adjacency(const std::filesystem::path& path, Index nodes);

// --- structured documents ---------------------------------------------------

Json to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);
Json to_json(const Vector& v);
Vector vector_from_json(const Json& j);

/// {"n", "m", "h", "strict", "layers": [{"beta": matrix} | {"beta": vector, "adjacency": matrix}, "delta": vector]}
Json model_to_json(const MultiVirusModel& model);
MultiVirusModel model_from_json(const Json& j);

Json to_json(const AssumptionReport& report);
Json to_json(const StabilityReport& report);
Json to_json(const EndemicEstimate& estimate);
Json to_json(const EstimationResult& result);
EstimationResult estimation_from_json(const Json& j);

Json panel_to_json(const PanelDataset& panel);
PanelDataset panel_from_json(const Json& j);

}  // namespace mvsis::io
