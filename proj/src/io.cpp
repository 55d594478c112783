#include "mvsis/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mvsis/error.hpp"

namespace mvsis::io {

namespace {

[[noreturn]] void fail(const std::string& op, ErrorKind kind, const std::string& message) {
  throw Error("data-pipeline." + op, kind, message);
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        current.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        current.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back(trim(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.emplace_back(trim(current));
  return fields;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("open", ErrorKind::io, "cannot open " + path.string());
  return in;
}

}  // namespace

// --- CSV ---------------------------------------------------------------------

CsvTable CsvTable::parse(std::istream& in, std::string_view source) {
  CsvTable table;
  table.source_ = std::string(source);
  std::string line;
  std::size_t line_number = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_number;
    std::string_view view = line;
    if (line_number == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
    if (trim(view).empty()) continue;
    auto fields = split_fields(view);
    if (!have_header) {
      table.header_ = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != table.header_.size()) {
      fail("csv", ErrorKind::parse,
           table.source_ + ":" + std::to_string(line_number) + ": expected " +
               std::to_string(table.header_.size()) + " fields, found " + std::to_string(fields.size()));
    }
    table.rows_.push_back(std::move(fields));
    table.lines_.push_back(line_number);
  }
  return table;
}

CsvTable CsvTable::read(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse(in, path.string());
}

std::size_t CsvTable::column(std::string_view name) const {
  const auto it = std::find(header_.begin(), header_.end(), name);
  if (it == header_.end()) fail("csv", ErrorKind::parse, source_ + ": missing column '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - header_.begin());
}

std::string CsvTable::where(std::size_t row) const { return source_ + ":" + std::to_string(lines_[row]); }

double CsvTable::number(std::size_t row, std::size_t col) const {
  const std::string& text = rows_[row][col];
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
    fail("csv", ErrorKind::parse, where(row) + ": '" + text + "' is not a finite number");
  }
  return value;
}

long long CsvTable::integer(std::size_t row, std::size_t col) const {
  const std::string& text = rows_[row][col];
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    fail("csv", ErrorKind::parse, where(row) + ": '" + text + "' is not an integer");
  }
  return value;
}

std::string format_double(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, ptr);
}

std::string read_text(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail("write", ErrorKind::io, "cannot write " + path.string());
  out << text;
}

// --- trajectories ------------------------------------------------------------

void write_trajectory(std::ostream& out, const Trajectory& traj) {
  out << "t,node,virus,value\n";
  for (std::size_t t = 0; t < traj.size(); ++t) {
    const auto& x = traj[t];
    for (Index i = 0; i < x.nodes(); ++i) {
      for (Index k = 0; k < x.viruses(); ++k) {
        out << t << ',' << i << ',' << k << ',' << format_double(x(i, k)) << '\n';
      }
    }
  }
}

namespace {

struct Entry {
  long long t, node, virus;
  double value;
};

std::vector<EpidemicState> assemble(const std::vector<Entry>& entries, bool with_time, const std::string& source) {
  if (entries.empty()) fail("read", ErrorKind::parse, source + ": no data rows");
  long long T = 0, n = 0, m = 0;
  for (const auto& e : entries) {
    if (e.t < 0 || e.node < 0 || e.virus < 0) fail("read", ErrorKind::parse, source + ": negative index");
    T = std::max(T, e.t);
    n = std::max(n, e.node);
    m = std::max(m, e.virus);
  }
  ++T, ++n, ++m;
  if (static_cast<long long>(entries.size()) != T * n * m) {
    fail("read", ErrorKind::parse,
         source + ": expected a complete grid of " + std::to_string(T * n * m) + " rows, found " +
             std::to_string(entries.size()));
  }
  std::vector<Matrix> values(static_cast<std::size_t>(T), Matrix::Constant(n, m, std::nan("")));
  for (const auto& e : entries) {
    double& slot = values[static_cast<std::size_t>(e.t)](e.node, e.virus);
    if (!std::isnan(slot)) {
      fail("read", ErrorKind::parse,
           source + ": duplicate entry" + (with_time ? " t=" + std::to_string(e.t) : std::string()) +
               " node=" + std::to_string(e.node) + " virus=" + std::to_string(e.virus));
    }
    slot = e.value;
  }
  std::vector<EpidemicState> states;
  states.reserve(values.size());
  for (auto& v : values) states.emplace_back(std::move(v));
  return states;
}

}  // namespace

Trajectory read_trajectory(std::istream& in) {
  const auto table = CsvTable::parse(in, "trajectory");
  const auto ct = table.column("t"), cn = table.column("node"), ck = table.column("virus"),
             cv = table.column("value");
  std::vector<Entry> entries;
  entries.reserve(table.rows());
  for (std::size_t r = 0; r < table.rows(); ++r) {
    entries.push_back({table.integer(r, ct), table.integer(r, cn), table.integer(r, ck), table.number(r, cv)});
  }
  return Trajectory(assemble(entries, true, "trajectory"));
}

Trajectory read_trajectory(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_trajectory(in);
}

void write_state(std::ostream& out, const EpidemicState& x) {
  out << "node,virus,value\n";
  for (Index i = 0; i < x.nodes(); ++i) {
    for (Index k = 0; k < x.viruses(); ++k) out << i << ',' << k << ',' << format_double(x(i, k)) << '\n';
  }
}

EpidemicState read_state(std::istream& in) {
  const auto table = CsvTable::parse(in, "state");
  const auto cn = table.column("node"), ck = table.column("virus"), cv = table.column("value");
  std::vector<Entry> entries;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    entries.push_back({0, table.integer(r, cn), table.integer(r, ck), table.number(r, cv)});
  }
  return assemble(entries, false, "state").front();
}

EpidemicState read_state(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_state(in);
}

void write_colors(std::ostream& out, const Trajectory& traj) {
  out << "t,node,red,green,blue\n";
  for (std::size_t t = 0; t < traj.size(); ++t) {
    const auto colors = color_map(traj[t]);
    for (std::size_t i = 0; i < colors.size(); ++i) {
      out << t << ',' << i << ',' << format_double(colors[i][0]) << ',' << format_double(colors[i][1]) << ','
          << format_double(colors[i][2]) << '\n';
    }
  }
}

Matrix read_adjacency(std::istream& in, Index nodes) {
  const auto table = CsvTable::parse(in, "adjacency");
  const auto cr = table.column("row"), cc = table.column("col"), cw = table.column("weight");
  Matrix a = Matrix::Zero(nodes, nodes);
  for (std::size_t r = 0; r < table.rows(); ++r) {
    const long long i = table.integer(r, cr);
    const long long j = table.integer(r, cc);
    if (i < 0 || j < 0 || i >= nodes || j >= nodes) {
      fail("read_adjacency", ErrorKind::parse, table.where(r) + ": index outside 0.." + std::to_string(nodes - 1));
    }
    a(i, j) = table.number(r, cw);
  }
  return a;
}

Matrix read_adjacency(const std::filesystem::path& path, Index nodes) {
  auto in = open_input(path);
  return read_adjacency(in, nodes);
}

// --- JSON --------------------------------------------------------------------

Json to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array()) fail("json", ErrorKind::parse, "matrix must be an array of rows");
  const Index rows = static_cast<Index>(j.size());
  const Index cols = rows == 0 ? 0 : static_cast<Index>(j.front().size());
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      fail("json", ErrorKind::parse, "matrix rows must be arrays of equal length");
    }
    for (Index c = 0; c < cols; ++c) m(i, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

Json to_json(const Vector& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Vector vector_from_json(const Json& j) {
  if (!j.is_array()) fail("json", ErrorKind::parse, "vector must be an array");
  Vector v(static_cast<Index>(j.size()));
  for (Index i = 0; i < v.size(); ++i) v(i) = j[static_cast<std::size_t>(i)].get<double>();
  return v;
}

Json model_to_json(const MultiVirusModel& model) {
  Json layers = Json::array();
  for (const auto& layer : model.layers()) {
    Json l = Json::object();
    if (layer.is_factored()) {
      l["beta"] = to_json(layer.beta());
      l["adjacency"] = to_json(layer.adjacency());
    } else {
      l["beta"] = to_json(layer.infection());
    }
    l["delta"] = to_json(layer.healing());
    layers.push_back(std::move(l));
  }
  return Json{{"n", model.nodes()}, {"m", model.viruses()}, {"h", model.h()},
              {"strict", model.strict()}, {"layers", std::move(layers)}};
}

MultiVirusModel model_from_json(const Json& j) {
  try {
    const double h = j.at("h").get<double>();
    const bool strict = j.value("strict", false);
    const auto& layers_json = j.at("layers");
    std::vector<VirusLayer> layers;
    for (const auto& l : layers_json) {
      const Json& beta = l.at("beta");
      Vector delta = vector_from_json(l.at("delta"));
      const bool matrix_form = beta.is_array() && !beta.empty() && beta.front().is_array();
      if (l.contains("adjacency")) {
        if (matrix_form) fail("model", ErrorKind::parse, "factored layers take a beta vector");
        layers.push_back(VirusLayer::factored(vector_from_json(beta), matrix_from_json(l.at("adjacency")), std::move(delta)));
      } else if (matrix_form) {
        layers.push_back(VirusLayer::from_matrix(matrix_from_json(beta), std::move(delta)));
      } else {
        fail("model", ErrorKind::parse, "layer needs a beta matrix or a beta vector with an adjacency");
      }
    }
    if (layers.empty()) fail("model", ErrorKind::parse, "model has no layers");
    MultiVirusModel model(h, std::move(layers), strict);
    if (j.contains("n") && j.at("n").get<Index>() != model.nodes()) {
      fail("model", ErrorKind::parse, "field n disagrees with the layer sizes");
    }
    if (j.contains("m") && j.at("m").get<Index>() != model.viruses()) {
      fail("model", ErrorKind::parse, "field m disagrees with the number of layers");
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    fail("model", ErrorKind::parse, e.what());
  }
}

Json to_json(const AssumptionReport& report) {
  Json checks = Json::array();
  for (const auto& c : report.checks) {
    Json item{{"assumption", c.assumption}, {"evaluated", c.evaluated}, {"passed", c.passed}, {"detail", c.detail}};
    if (c.node) item["node"] = *c.node;
    if (c.virus) item["virus"] = *c.virus;
    if (c.column) item["column"] = *c.column;
    checks.push_back(std::move(item));
  }
  return Json{{"passed", report.passed()}, {"checks", std::move(checks)}};
}

Json to_json(const StabilityReport& report) {
  Json viruses = Json::array();
  for (std::size_t k = 0; k < report.rho.size(); ++k) {
    viruses.push_back(Json{{"virus", k}, {"rho", report.rho[k]}, {"regime", to_string(report.regimes[k])}});
  }
  Json out{{"viruses", std::move(viruses)}, {"classification", to_string(report.classification)}};
  if (report.survivor) out["survivor"] = *report.survivor;
  return out;
}

Json to_json(const EndemicEstimate& estimate) {
  return Json{{"virus", estimate.virus},
              {"x_tilde", to_json(estimate.x_tilde)},
              {"residual", estimate.residual},
              {"iterations", estimate.iterations}};
}

Json to_json(const EstimationResult& r) {
  Json out{{"beta", r.beta},
           {"delta", r.delta},
           {"h", r.h},
           {"lumped", r.lumped},
           {"identifiable", r.identifiable},
           {"residual_norm", r.residual_norm},
           {"smallest_singular_value", r.smallest_singular_value},
           {"largest_singular_value", r.largest_singular_value},
           {"rows", r.rows},
           {"violates_model", r.violates_model}};
  if (r.witness) {
    out["witness"] = Json{{"i", r.witness->i}, {"j", r.witness->j}, {"t1", r.witness->t1}, {"t2", r.witness->t2}};
  } else {
    out["witness"] = nullptr;
  }
  return out;
}

EstimationResult estimation_from_json(const Json& j) {
  try {
    EstimationResult r;
    r.beta = j.at("beta").get<double>();
    r.delta = j.at("delta").get<double>();
    r.h = j.value("h", 1.0);
    r.lumped = j.value("lumped", false);
    r.identifiable = j.value("identifiable", true);
    r.residual_norm = j.value("residual_norm", 0.0);
    r.smallest_singular_value = j.value("smallest_singular_value", 0.0);
    r.largest_singular_value = j.value("largest_singular_value", 0.0);
    r.rows = j.value("rows", Index{0});
    r.violates_model = r.beta < 0.0 || r.delta < 0.0;
    if (j.contains("witness") && j.at("witness").is_object()) {
      const auto& w = j.at("witness");
      r.witness = Witness{w.at("i").get<Index>(), w.at("j").get<Index>(), w.at("t1").get<Index>(),
                          w.at("t2").get<Index>()};
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    fail("estimate", ErrorKind::parse, e.what());
  }
}

Json panel_to_json(const PanelDataset& panel) {
  Json fractions = Json::array();
  for (const auto& f : panel.fractions()) fractions.push_back(to_json(f));
  return Json{{"unit_ids", panel.unit_ids()},   {"years", panel.years()},
              {"programs", panel.program_labels()}, {"eligible_counts", panel.eligible_counts()},
              {"adjacency", to_json(panel.adjacency())}, {"fractions", std::move(fractions)}};
}

PanelDataset panel_from_json(const Json& j) {
  try {
    std::vector<Matrix> fractions;
    for (const auto& f : j.at("fractions")) fractions.push_back(matrix_from_json(f));
    Matrix adjacency = matrix_from_json(j.at("adjacency"));
    auto units = j.at("unit_ids").get<std::vector<std::string>>();
    if (units.empty()) adjacency.resize(0, 0);
    return PanelDataset(std::move(units), j.at("years").get<std::vector<int>>(),
                        j.at("programs").get<std::vector<std::string>>(), std::move(fractions),
                        j.at("eligible_counts").get<std::vector<std::int64_t>>(), std::move(adjacency));
  } catch (const nlohmann::json::exception& e) {
    fail("panel", ErrorKind::parse, e.what());
  }
}

}  // namespace mvsis::io
