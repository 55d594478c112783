#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "mvsis/data.hpp"
#include "mvsis/error.hpp"
#include "mvsis/io.hpp"

namespace mvsis {

namespace {

[[noreturn]] void fail(const std::string& op, ErrorKind kind, const std::string& message) {
  throw Error("data-pipeline." + op, kind, message);
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("open", ErrorKind::io, "cannot open " + path.string());
  return in;
}

bool dropped(const std::string& id, const std::vector<std::string>& drop) {
  for (const auto& d : drop) {
    if (!d.empty() && d.back() == '*') {
      if (id.starts_with(std::string_view(d).substr(0, d.size() - 1))) return true;
    } else if (id == d) {
      return true;
    }
  }
  return false;
}

}  // namespace

PanelDataset::PanelDataset(std::vector<std::string> unit_ids, std::vector<int> years,
                           std::vector<std::string> programs, std::vector<Matrix> fractions,
                           std::vector<std::int64_t> eligible_counts, Matrix adjacency)
    : unit_ids_(std::move(unit_ids)),
      years_(std::move(years)),
      programs_(std::move(programs)),
      fractions_(std::move(fractions)),
      eligible_(std::move(eligible_counts)),
      adjacency_(std::move(adjacency)) {
  const Index n = units();
  const Index m = this->programs();
  if (fractions_.size() != years_.size()) {
    fail("PanelDataset", ErrorKind::dimension_mismatch, "one fraction matrix per year is required");
  }
  if (static_cast<Index>(eligible_.size()) != n) {
    fail("PanelDataset", ErrorKind::dimension_mismatch, "one eligible count per unit is required");
  }
  if (adjacency_.rows() != n || adjacency_.cols() != n) {
    fail("PanelDataset", ErrorKind::dimension_mismatch, "adjacency must be units x units");
  }
  if (!std::is_sorted(years_.begin(), years_.end()) ||
      std::adjacent_find(years_.begin(), years_.end()) != years_.end()) {
    fail("PanelDataset", ErrorKind::invalid_argument, "years must be strictly increasing");
  }
  std::unordered_set<std::string> seen;
  for (const auto& id : unit_ids_) {
    if (!seen.insert(id).second) fail("PanelDataset", ErrorKind::invalid_argument, "duplicate unit id '" + id + "'");
  }
  for (Index i = 0; i < n; ++i) {
    if (eligible_[static_cast<std::size_t>(i)] <= 0) {
      fail("PanelDataset", ErrorKind::invalid_argument, "unit '" + unit_ids_[i] + "' has no eligible farms");
    }
    if (adjacency_(i, i) != 1.0) {
      fail("PanelDataset", ErrorKind::invalid_argument, "adjacency must have a unit diagonal");
    }
    for (Index j = 0; j < n; ++j) {
      const double a = adjacency_(i, j);
      if ((a != 0.0 && a != 1.0) || a != adjacency_(j, i)) {
        fail("PanelDataset", ErrorKind::invalid_argument, "adjacency must be symmetric with 0/1 entries");
      }
    }
  }
  Vector total = Vector::Zero(n);
  for (std::size_t y = 0; y < fractions_.size(); ++y) {
    const Matrix& f = fractions_[y];
    if (f.rows() != n || f.cols() != m) {
      fail("PanelDataset", ErrorKind::dimension_mismatch, "fractions must be units x programs each year");
    }
    if (n > 0 && (!f.allFinite() || f.minCoeff() < 0.0 || f.rowwise().sum().maxCoeff() > 1.0 + kDomainTolerance)) {
      fail("PanelDataset", ErrorKind::domain_violation,
           "fractions of year " + std::to_string(years_[y]) + " leave the domain");
    }
    if (n > 0) total += f.rowwise().sum();
  }
  for (Index i = 0; i < n; ++i) {
    if (!years_.empty() && total(i) == 0.0) {
      fail("PanelDataset", ErrorKind::invalid_argument, "unit '" + unit_ids_[i] + "' is never enrolled");
    }
  }
}

Index PanelDataset::index_of(const std::string& unit) const {
  const auto it = std::find(unit_ids_.begin(), unit_ids_.end(), unit);
  if (it == unit_ids_.end()) fail("PanelDataset", ErrorKind::invalid_argument, "unknown unit id '" + unit + "'");
  return static_cast<Index>(it - unit_ids_.begin());
}

PanelDataset PanelDataset::with_borders(const BorderList& borders) const {
  return PanelDataset(unit_ids_, years_, programs_, fractions_, eligible_, county_network(borders, unit_ids_));
}

PanelDataset PanelDataset::subset(std::span<const std::string> ids) const {
  std::set<Index> picked;
  for (const auto& id : ids) picked.insert(index_of(id));
  const std::vector<Index> rows(picked.begin(), picked.end());
  const auto k = static_cast<Index>(rows.size());
  std::vector<std::string> unit_ids;
  std::vector<std::int64_t> eligible;
  Matrix adjacency(k, k);
  for (Index a = 0; a < k; ++a) {
    unit_ids.push_back(unit_ids_[static_cast<std::size_t>(rows[a])]);
    eligible.push_back(eligible_[static_cast<std::size_t>(rows[a])]);
    for (Index b = 0; b < k; ++b) adjacency(a, b) = adjacency_(rows[a], rows[b]);
  }
  std::vector<Matrix> fractions;
  for (const auto& f : fractions_) fractions.emplace_back(f(rows, Eigen::all));
  return PanelDataset(std::move(unit_ids), years_, programs_, std::move(fractions), std::move(eligible),
                      std::move(adjacency));
}

Trajectory PanelDataset::as_trajectory() const {
  if (empty() || years_.empty()) fail("as_trajectory", ErrorKind::precondition, "panel has no data");
  std::vector<EpidemicState> states;
  states.reserve(fractions_.size());
  for (const auto& f : fractions_) states.emplace_back(f);
  return Trajectory(std::move(states));
}

bool operator==(const PanelDataset& a, const PanelDataset& b) {
  if (a.unit_ids_ != b.unit_ids_ || a.years_ != b.years_ || a.programs_ != b.programs_ ||
      a.eligible_ != b.eligible_ || a.fractions_.size() != b.fractions_.size()) {
    return false;
  }
  if (a.adjacency_.rows() != b.adjacency_.rows() || a.adjacency_ != b.adjacency_) return false;
  for (std::size_t y = 0; y < a.fractions_.size(); ++y) {
    if (a.fractions_[y].rows() != b.fractions_[y].rows() || a.fractions_[y] != b.fractions_[y]) return false;
  }
  return true;
}

PanelDataset load_panel(std::istream& in, const PanelLoadOptions& options) {
  const auto table = io::CsvTable::parse(in, "panel");
  const std::vector<std::string>& labels = options.program_labels;
  if (labels.empty()) fail("load_panel", ErrorKind::invalid_argument, "no program labels given");
  if (table.header().empty() || table.rows() == 0) {
    return PanelDataset({}, {}, labels, {}, {}, Matrix(0, 0));
  }
  const auto cu = table.column("unit_id"), cy = table.column("year"), cp = table.column("program"),
             cc = table.column("enrolled_count");
  const auto m = static_cast<Index>(labels.size());

  std::vector<std::string> units;
  std::unordered_map<std::string, std::size_t> unit_index;
  std::set<int> year_set;
  struct Row {
    std::size_t unit;
    int year;
    Index program;
    long long count;
  };
  std::vector<Row> rows;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    const std::string& id = table.at(r, cu);
    if (id.empty()) fail("load_panel", ErrorKind::parse, table.where(r) + ": empty unit id");
    const long long year = table.integer(r, cy);
    const auto label = std::find(labels.begin(), labels.end(), table.at(r, cp));
    if (label == labels.end()) {
      fail("load_panel", ErrorKind::parse, table.where(r) + ": unknown program label '" + table.at(r, cp) + "'");
    }
    const long long count = table.integer(r, cc);
    if (count < 0) fail("load_panel", ErrorKind::invalid_argument, table.where(r) + ": negative enrolled count");
    if (dropped(id, options.drop)) continue;
    auto [it, inserted] = unit_index.emplace(id, units.size());
    if (inserted) units.push_back(id);
    year_set.insert(static_cast<int>(year));
    rows.push_back({it->second, static_cast<int>(year), static_cast<Index>(label - labels.begin()), count});
  }

  const std::vector<int> years(year_set.begin(), year_set.end());
  std::unordered_map<int, std::size_t> year_index;
  for (std::size_t y = 0; y < years.size(); ++y) year_index[years[y]] = y;

  const auto n = static_cast<Index>(units.size());
  std::vector<Matrix> counts(years.size(), Matrix::Constant(n, m, -1.0));
  for (const auto& row : rows) {
    double& slot = counts[year_index[row.year]](static_cast<Index>(row.unit), row.program);
    if (slot >= 0.0) {
      fail("load_panel", ErrorKind::parse,
           "duplicate row for unit '" + units[row.unit] + "' year " + std::to_string(row.year) + " program '" +
               labels[static_cast<std::size_t>(row.program)] + "'");
    }
    slot = static_cast<double>(row.count);
  }
  for (auto& c : counts) c = c.cwiseMax(0.0);

  std::vector<std::int64_t> eligible(units.size(), 0);
  for (const auto& c : counts) {
    for (Index i = 0; i < n; ++i) {
      eligible[static_cast<std::size_t>(i)] =
          std::max(eligible[static_cast<std::size_t>(i)], static_cast<std::int64_t>(c.row(i).sum()));
    }
  }

  std::vector<Index> kept;
  std::vector<std::string> kept_ids;
  std::vector<std::int64_t> kept_eligible;
  for (Index i = 0; i < n; ++i) {
    if (eligible[static_cast<std::size_t>(i)] > 0) {
      kept.push_back(i);
      kept_ids.push_back(units[static_cast<std::size_t>(i)]);
      kept_eligible.push_back(eligible[static_cast<std::size_t>(i)]);
    }
  }
  const auto kn = static_cast<Index>(kept.size());
  std::vector<Matrix> fractions;
  for (std::size_t y = 0; y < counts.size(); ++y) {
    Matrix f(kn, m);
    for (Index a = 0; a < kn; ++a) {
      const double e = static_cast<double>(kept_eligible[static_cast<std::size_t>(a)]);
      for (Index k = 0; k < m; ++k) f(a, k) = counts[y](kept[static_cast<std::size_t>(a)], k) / e;
      if (f.row(a).sum() > 1.0 + kDomainTolerance) {
        fail("load_panel", ErrorKind::domain_violation,
             "fractions of unit '" + kept_ids[static_cast<std::size_t>(a)] + "' exceed 1 in year " +
                 std::to_string(years[y]));
      }
    }
    fractions.push_back(std::move(f));
  }
  if (kn == 0) return PanelDataset({}, {}, labels, {}, {}, Matrix(0, 0));
  return PanelDataset(std::move(kept_ids), years, labels, std::move(fractions), std::move(kept_eligible),
                      Matrix::Identity(kn, kn));
}

PanelDataset load_panel(const std::filesystem::path& path, const PanelLoadOptions& options) {
  auto in = open_input(path);
  return load_panel(in, options);
}

BorderList load_borders(std::istream& in) {
  const auto table = io::CsvTable::parse(in, "borders");
  BorderList borders;
  if (table.rows() == 0) return borders;
  const auto ca = table.column("unit_id_a"), cb = table.column("unit_id_b");
  for (std::size_t r = 0; r < table.rows(); ++r) borders.emplace_back(table.at(r, ca), table.at(r, cb));
  return borders;
}

BorderList load_borders(const std::filesystem::path& path) {
  auto in = open_input(path);
  return load_borders(in);
}

std::vector<Point2> load_positions(std::istream& in) {
  const auto table = io::CsvTable::parse(in, "positions");
  if (table.rows() == 0) return {};
  const auto cn = table.column("node"), cx = table.column("x"), cy = table.column("y");
  std::vector<Point2> points(table.rows(), Point2{std::nan(""), std::nan("")});
  std::vector<bool> filled(table.rows(), false);
  for (std::size_t r = 0; r < table.rows(); ++r) {
    const long long node = table.integer(r, cn);
    if (node < 0 || node >= static_cast<long long>(table.rows()) || filled[static_cast<std::size_t>(node)]) {
      fail("load_positions", ErrorKind::parse, table.where(r) + ": node ids must be 0..n-1, each once");
    }
    filled[static_cast<std::size_t>(node)] = true;
    points[static_cast<std::size_t>(node)] = {table.number(r, cx), table.number(r, cy)};
  }
  return points;
}

std::vector<Point2> load_positions(const std::filesystem::path& path) {
  auto in = open_input(path);
  return load_positions(in);
}

std::map<std::string, std::string> load_partition(std::istream& in) {
  const auto table = io::CsvTable::parse(in, "partition");
  std::map<std::string, std::string> groups;
  if (table.rows() == 0) return groups;
  const auto cu = table.column("unit_id"), cg = table.column("group");
  for (std::size_t r = 0; r < table.rows(); ++r) {
    if (!groups.emplace(table.at(r, cu), table.at(r, cg)).second) {
      fail("load_partition", ErrorKind::parse, table.where(r) + ": unit assigned twice");
    }
  }
  return groups;
}

std::map<std::string, std::string> load_partition(const std::filesystem::path& path) {
  auto in = open_input(path);
  return load_partition(in);
}

}  // namespace mvsis
