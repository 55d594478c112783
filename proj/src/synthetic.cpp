#include "mvsis/synthetic.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "mvsis/error.hpp"
#include "mvsis/io.hpp"

namespace mvsis {

SyntheticPanel make_synthetic_panel(const SyntheticPanelConfig& config) {
  const auto m = static_cast<Index>(config.programs.size());
  if (config.groups.empty() || config.years.size() < 2 || m == 0) {
    throw Error("data-pipeline.make_synthetic_panel", ErrorKind::invalid_argument,
                "need groups, at least two years and one program");
  }
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> share(0.05, 0.9);

  SyntheticPanel out;
  std::vector<std::string> ids;
  std::vector<Matrix> group_states;
  std::vector<Index> offsets;
  const auto steps = static_cast<Index>(config.years.size()) - 1;
  std::vector<std::vector<Matrix>> per_group;
  for (const auto& g : config.groups) {
    if (static_cast<Index>(g.beta.size()) != m || static_cast<Index>(g.delta.size()) != m || g.rows < 1 ||
        g.cols < 1 || g.rows * g.cols < 2) {
      throw Error("data-pipeline.make_synthetic_panel", ErrorKind::invalid_argument,
                  "group '" + g.label + "' is malformed");
    }
    const Index n = g.rows * g.cols;
    std::vector<std::string> local;
    for (Index r = 0; r < g.rows; ++r) {
      for (Index c = 0; c < g.cols; ++c) {
        local.push_back(g.label + "-" + std::to_string(r) + "-" + std::to_string(c));
        out.partition[local.back()] = g.label;
      }
    }
    BorderList borders;
    for (Index r = 0; r < g.rows; ++r) {
      for (Index c = 0; c < g.cols; ++c) {
        const auto& here = local[static_cast<std::size_t>(r * g.cols + c)];
        if (c + 1 < g.cols) borders.emplace_back(here, local[static_cast<std::size_t>(r * g.cols + c + 1)]);
        if (r + 1 < g.rows) borders.emplace_back(here, local[static_cast<std::size_t>((r + 1) * g.cols + c)]);
      }
    }
    const Matrix a = county_network(borders, local);
    std::vector<VirusLayer> layers;
    for (Index k = 0; k < m; ++k) {
      layers.push_back(VirusLayer::homogeneous(g.beta[static_cast<std::size_t>(k)], a,
                                               g.delta[static_cast<std::size_t>(k)]));
    }
    const MultiVirusModel model(1.0, std::move(layers));
    Matrix x0(n, m);
    for (Index i = 0; i < n; ++i) {
      const double total = share(rng);
      Vector split(m);
      for (Index k = 0; k < m; ++k) split(k) = share(rng);
      x0.row(i) = (total * split / split.sum()).transpose();
    }
    const auto traj = simulate(model, EpidemicState(x0), steps, SimulateOptions{.check_assumptions = false});
    std::vector<Matrix> states;
    for (const auto& x : traj) states.push_back(x.values());
    per_group.push_back(std::move(states));
    ids.insert(ids.end(), local.begin(), local.end());
    out.borders.insert(out.borders.end(), borders.begin(), borders.end());
  }

  const auto n = static_cast<Index>(ids.size());
  std::vector<Matrix> fractions(config.years.size(), Matrix(n, m));
  for (std::size_t y = 0; y < config.years.size(); ++y) {
    Index row = 0;
    for (const auto& states : per_group) {
      fractions[y].middleRows(row, states[y].rows()) = states[y];
      row += states[y].rows();
    }
  }
  std::vector<std::int64_t> eligible(ids.size(), config.eligible);
  PanelDataset base(ids, config.years, config.programs, std::move(fractions), std::move(eligible),
                    Matrix::Identity(n, n));
  out.dataset = base.with_borders(out.borders);
  return out;
}

SyntheticPanelConfig default_synthetic_config() {
  SyntheticPanelConfig config;
  const std::vector<double> beta{0.10, 0.08};
  const std::vector<double> delta{0.05, 0.07};
  config.groups = {{"ID", 3, 4, beta, delta}, {"KY", 4, 4, beta, delta}, {"TN", 3, 3, beta, delta}};
  config.years = {2009, 2010, 2011, 2012, 2013, 2014};
  return config;
}

void write_synthetic_panel(const SyntheticPanel& panel, const std::filesystem::path& directory) {
  const auto& d = panel.dataset;
  std::ostringstream data;
  data << "unit_id,year,program,enrolled_count\n";
  for (std::size_t y = 0; y < d.years().size(); ++y) {
    for (Index i = 0; i < d.units(); ++i) {
      const double eligible = static_cast<double>(d.eligible_counts()[static_cast<std::size_t>(i)]);
      for (Index k = 0; k < d.programs(); ++k) {
        data << d.unit_ids()[static_cast<std::size_t>(i)] << ',' << d.years()[y] << ','
             << d.program_labels()[static_cast<std::size_t>(k)] << ','
             << std::llround(d.fractions()[y](i, k) * eligible) << '\n';
      }
    }
  }
  std::ostringstream borders;
  borders << "unit_id_a,unit_id_b\n";
  for (const auto& [a, b] : panel.borders) borders << a << ',' << b << '\n';
  std::ostringstream partition;
  partition << "unit_id,group\n";
  for (const auto& [unit, group] : panel.partition) partition << unit << ',' << group << '\n';
  io::write_text(directory / "panel.csv", data.str());
  io::write_text(directory / "borders.csv", borders.str());
  io::write_text(directory / "partition.csv", partition.str());
  io::write_text(directory / "panel.json", io::panel_to_json(panel.dataset).dump(1) + "\n");
}

}  // namespace mvsis
