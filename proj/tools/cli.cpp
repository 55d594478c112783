#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "json_config.hpp"
#include "mvsis/data.hpp"
#include "mvsis/error.hpp"
#include "mvsis/experiments.hpp"
#include "mvsis/identification.hpp"
#include "mvsis/io.hpp"
#include "mvsis/model.hpp"
#include "mvsis/spectral.hpp"
#include "mvsis/synthetic.hpp"

namespace mvsis::cli {

namespace fs = std::filesystem;
using io::Json;

namespace {

struct Options {
  std::string model;
  std::string x0;
  Index steps = 0;
  std::string out;
  std::optional<double> noise;
  std::optional<std::uint64_t> seed;
  bool emit_colors = false;

  double tol = 1e-9;
  bool endemic = false;

  std::string data;
  std::vector<std::string> adjacency;
  std::string positions;
  std::optional<Index> virus;
  std::optional<Index> node;
  bool heterogeneous = false;
  std::optional<double> h;
  bool online = false;
  double forgetting = 1.0;

  std::string estimates;

  std::string borders;
  std::vector<std::string> programs{"1", "2"};
  std::vector<std::string> drop;
  std::string partition;
  std::string subset;
  std::string sweep;
  Index warmup = 1;
  std::string layout = "viruses";
  std::string residuals;

  std::string experiment;
  std::optional<double> sigma;
  std::optional<Index> fit_transitions;
};

[[noreturn]] void usage(const std::string& message) { throw Error("cli", ErrorKind::invalid_argument, message); }

fs::path output_dir() {
  const char* env = std::getenv("MVSIS_OUTPUT_DIR");
  return env && *env ? fs::path(env) : fs::path(".");
}

fs::path output_path(const std::string& given, const std::string& fallback) {
  return given.empty() ? output_dir() / fallback : fs::path(given);
}

void emit(const Json& doc, std::ostream& out, const std::string& path) {
  const std::string text = doc.dump(2) + "\n";
  out << text;
  if (!path.empty()) io::write_text(path, text);
}

MultiVirusModel load_model(const std::string& spec) {
  if (spec.empty()) usage("--model is required");
  const std::string text = spec.front() == '{' ? spec : io::read_text(spec);
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error("cli.model", ErrorKind::parse, e.what());
  }
  return io::model_from_json(doc);
}

std::vector<Matrix> load_networks(const Options& o, Index nodes, Index viruses) {
  if (!o.positions.empty() && !o.adjacency.empty()) usage("give either --adjacency or --positions");
  if (!o.positions.empty()) {
    const auto points = load_positions(fs::path(o.positions));
    if (static_cast<Index>(points.size()) != nodes) {
      throw Error("cli.positions", ErrorKind::dimension_mismatch,
                  "positions list " + std::to_string(points.size()) + " nodes, data has " + std::to_string(nodes));
    }
    return {geometric_network(points)};
  }
  if (o.adjacency.empty()) usage("--adjacency or --positions is required");
  if (o.adjacency.size() != 1 && static_cast<Index>(o.adjacency.size()) != viruses) {
    usage("give one --adjacency or one per virus");
  }
  std::vector<Matrix> out;
  for (const auto& path : o.adjacency) out.push_back(io::read_adjacency(fs::path(path), nodes));
  return out;
}

const Matrix& network_for(const std::vector<Matrix>& networks, Index k) {
  return networks[networks.size() == 1 ? 0 : static_cast<std::size_t>(k)];
}

std::vector<Index> selected_viruses(const Options& o, Index viruses) {
  if (o.virus) {
    if (*o.virus < 0 || *o.virus >= viruses) usage("--virus must lie in 0.." + std::to_string(viruses - 1));
    return {*o.virus};
  }
  std::vector<Index> all(static_cast<std::size_t>(viruses));
  for (Index k = 0; k < viruses; ++k) all[static_cast<std::size_t>(k)] = k;
  return all;
}

// --- simulate ------------------------------------------------------------------

int cmd_simulate(const Options& o, std::ostream& out) {
  const auto model = load_model(o.model);
  const auto x0 = io::read_state(fs::path(o.x0));
  if (o.steps < 0) usage("--steps must be non-negative");
  auto traj = simulate(model, x0, o.steps);
  if (o.noise && *o.noise > 0.0) {
    if (!o.seed) usage("--seed is required when --noise is set");
    traj = inject_noise(traj, *o.noise, *o.seed);
  }
  const fs::path path = output_path(o.out, "trajectory.csv");
  std::ostringstream csv;
  io::write_trajectory(csv, traj);
  io::write_text(path, csv.str());
  Json doc{{"command", "simulate"},
           {"nodes", traj.nodes()},
           {"viruses", traj.viruses()},
           {"states", traj.size()},
           {"max_excursion", traj.max_excursion},
           {"trajectory", path.string()}};
  if (traj.noise_sigma) doc["noise_sigma"] = *traj.noise_sigma;
  if (o.emit_colors) {
    fs::path colors = path;
    colors.replace_extension(".colors.csv");
    std::ostringstream rgb;
    io::write_colors(rgb, traj);
    io::write_text(colors, rgb.str());
    doc["colors"] = colors.string();
  }
  emit(doc, out, "");
  return 0;
}

// --- analyze -------------------------------------------------------------------

int cmd_analyze(const Options& o, std::ostream& out) {
  const auto model = load_model(o.model);
  Json doc{{"command", "analyze"}};
  doc["assumptions"] = io::to_json(validate_parameters(model));
  const auto report = classify(model, o.tol);
  doc["stability"] = io::to_json(report);
  if (o.endemic) {
    Json endemic = Json::array();
    for (std::size_t k = 0; k < report.regimes.size(); ++k) {
      if (report.regimes[k] == Regime::supercritical) {
        endemic.push_back(io::to_json(single_virus_endemic(model, static_cast<Index>(k))));
      }
    }
    doc["endemic"] = std::move(endemic);
  }
  emit(doc, out, o.out);
  return 0;
}

// --- identify ------------------------------------------------------------------

Json estimate_json(const EstimationResult& e, Index virus) {
  Json j{{"virus", virus}};
  j.update(io::to_json(e));
  return j;
}

int cmd_identify(const Options& o, std::ostream& out) {
  const auto traj = io::read_trajectory(fs::path(o.data));
  const auto networks = load_networks(o, traj.nodes(), traj.viruses());
  const auto viruses = selected_viruses(o, traj.viruses());
  Json doc{{"command", "identify"}, {"lumped", !o.h.has_value()}};
  if (o.h) doc["h"] = *o.h;

  if (o.online) {
    if (o.node || o.heterogeneous) usage("--online fits homogeneous parameters only");
    Json steps = Json::array();
    std::vector<RlsState> rls(viruses.size(), rls_init(o.forgetting));
    Json final_estimates = Json::array();
    for (Index t = 0; t < traj.transitions(); ++t) {
      const Trajectory pair(std::vector<EpidemicState>{traj[static_cast<std::size_t>(t)],
                                                       traj[static_cast<std::size_t>(t + 1)]});
      Json row{{"transition", t}, {"estimates", Json::array()}};
      final_estimates = Json::array();
      for (std::size_t v = 0; v < viruses.size(); ++v) {
        const Index k = viruses[v];
        auto system = build_phi_homogeneous(pair, network_for(networks, k), k);
        if (o.h) {
          system.phi *= *o.h;
          system.scale = *o.h;
        }
        rls[v] = rls_update(std::move(rls[v]), system);
        const auto est = estimate_json(rls_estimate(rls[v], o.h), k);
        row["estimates"].push_back(est);
        final_estimates.push_back(est);
      }
      steps.push_back(std::move(row));
    }
    doc["forgetting"] = o.forgetting;
    doc["online"] = std::move(steps);
    doc["estimates"] = std::move(final_estimates);
  } else if (o.node || o.heterogeneous) {
    Json nodes = Json::array();
    Json unidentifiable = Json::array();
    if (o.node) {
      if (*o.node < 0 || *o.node >= traj.nodes()) usage("--node must lie in 0.." + std::to_string(traj.nodes() - 1));
      for (const Index k : viruses) {
        const auto e = identify_heterogeneous_node(traj, network_for(networks, k), k, *o.node, o.h);
        Json j = estimate_json(e, k);
        j["node"] = *o.node;
        if (!e.identifiable) unidentifiable.push_back(Json{{"node", *o.node}, {"virus", k}});
        nodes.push_back(std::move(j));
      }
    } else {
      const auto est = identify_heterogeneous(traj, networks, o.h);
      for (Index i = 0; i < traj.nodes(); ++i) {
        for (const Index k : viruses) {
          Json j = estimate_json(est.at(i, k), k);
          j["node"] = i;
          nodes.push_back(std::move(j));
        }
      }
      for (const auto& [i, k] : est.unidentifiable) {
        if (std::find(viruses.begin(), viruses.end(), k) != viruses.end()) {
          unidentifiable.push_back(Json{{"node", i}, {"virus", k}});
        }
      }
    }
    doc["nodes"] = std::move(nodes);
    doc["unidentifiable"] = std::move(unidentifiable);
  } else {
    Json estimates = Json::array();
    for (const Index k : viruses) {
      estimates.push_back(estimate_json(identify_homogeneous(traj, network_for(networks, k), k, o.h), k));
    }
    doc["estimates"] = std::move(estimates);
  }
  emit(doc, out, o.out);
  return 0;
}

// --- predict -------------------------------------------------------------------

int cmd_predict(const Options& o, std::ostream& out) {
  auto x = io::read_state(fs::path(o.x0));
  const Index steps = o.steps == 0 ? 1 : o.steps;
  if (steps < 0) usage("--steps must be positive");
  Trajectory traj(x);
  if (!o.model.empty()) {
    if (!o.estimates.empty()) usage("give either --model or --estimates");
    const auto model = load_model(o.model);
    for (Index t = 0; t < steps; ++t) {
      x = step(model, x);
      traj.append(x);
    }
  } else {
    if (o.estimates.empty()) usage("--model or --estimates is required");
    Json doc;
    try {
      doc = Json::parse(io::read_text(o.estimates));
    } catch (const nlohmann::json::exception& e) {
      throw Error("cli.estimates", ErrorKind::parse, e.what());
    }
    if (!doc.contains("estimates") || !doc["estimates"].is_array()) {
      throw Error("cli.estimates", ErrorKind::parse, "document has no 'estimates' array");
    }
    std::vector<EstimationResult> estimates(static_cast<std::size_t>(x.viruses()));
    std::vector<bool> seen(estimates.size(), false);
    for (const auto& e : doc["estimates"]) {
      const Index k = e.value("virus", Index{-1});
      if (k < 0 || k >= x.viruses() || seen[static_cast<std::size_t>(k)]) {
        throw Error("cli.estimates", ErrorKind::parse, "estimates must cover each virus of the state once");
      }
      estimates[static_cast<std::size_t>(k)] = io::estimation_from_json(e);
      seen[static_cast<std::size_t>(k)] = true;
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
      throw Error("cli.estimates", ErrorKind::parse, "estimates must cover each virus of the state once");
    }
    const auto networks = load_networks(o, x.nodes(), x.viruses());
    for (Index t = 0; t < steps; ++t) {
      x = one_step_predict(estimates, x, networks);
      traj.append(x);
    }
  }
  const fs::path path = output_path(o.out, "prediction.csv");
  std::ostringstream csv;
  io::write_trajectory(csv, traj);
  io::write_text(path, csv.str());
  emit(Json{{"command", "predict"}, {"steps", steps}, {"trajectory", path.string()}}, out, "");
  return 0;
}

// --- validate ------------------------------------------------------------------

Json report_json(const ValidationReport& r, const PanelDataset& panel) {
  Json params = Json::array();
  for (std::size_t k = 0; k < r.parameters_used.size(); ++k) {
    Json j{{"program", panel.program_labels()[k]}};
    j.update(io::to_json(r.parameters_used[k]));
    params.push_back(std::move(j));
  }
  return Json{{"training_subset", r.training_subset},
              {"mode", r.mode},
              {"scaled_error", r.scaled_error},
              {"numerator", r.numerator},
              {"denominator", r.denominator},
              {"non_unique", r.non_unique},
              {"parameters", std::move(params)},
              {"warnings", r.assumption_warnings}};
}

void write_residuals(const std::string& path, const std::vector<const ValidationReport*>& reports,
                     const PanelDataset& panel) {
  std::ostringstream csv;
  csv << "report,mode,year,unit_id,program,observed,predicted,residual\n";
  for (const auto* r : reports) {
    for (std::size_t y = 0; y < panel.years().size(); ++y) {
      const Matrix& f = panel.fractions()[y];
      const Matrix& g = r->predicted[y];
      for (Index i = 0; i < panel.units(); ++i) {
        for (Index k = 0; k < panel.programs(); ++k) {
          csv << r->training_subset << ',' << r->mode << ',' << panel.years()[y] << ','
              << panel.unit_ids()[static_cast<std::size_t>(i)] << ','
              << panel.program_labels()[static_cast<std::size_t>(k)] << ',' << io::format_double(f(i, k)) << ','
              << io::format_double(g(i, k)) << ',' << io::format_double(f(i, k) - g(i, k)) << '\n';
        }
      }
    }
  }
  io::write_text(path, csv.str());
}

int cmd_validate(const Options& o, std::ostream& out) {
  PanelLoadOptions load;
  load.program_labels = o.programs;
  load.drop = o.drop;
  PanelDataset panel;
  if (fs::path(o.data).extension() == ".json") {
    try {
      panel = io::panel_from_json(Json::parse(io::read_text(o.data)));
    } catch (const nlohmann::json::exception& e) {
      throw Error("cli.data", ErrorKind::parse, e.what());
    }
  } else {
    panel = load_panel(fs::path(o.data), load);
  }
  if (panel.empty()) throw Error("cli.validate", ErrorKind::precondition, "panel has no units");
  Json doc{{"command", "validate"},
           {"units", panel.units()},
           {"years", panel.years()},
           {"programs", panel.program_labels()}};
  if (!o.borders.empty()) {
    const std::set<std::string> known(panel.unit_ids().begin(), panel.unit_ids().end());
    BorderList kept;
    std::size_t ignored = 0;
    for (const auto& b : load_borders(fs::path(o.borders))) {
      if (known.count(b.first) && known.count(b.second)) {
        kept.push_back(b);
      } else {
        ++ignored;
      }
    }
    panel = panel.with_borders(kept);
    doc["borders"] = kept.size();
    doc["borders_ignored"] = ignored;
  }
  const auto layout = layout_from_string(o.layout);
  doc["layout"] = std::string(to_string(layout));

  const int modes = (!o.subset.empty()) + (!o.sweep.empty()) + (o.online ? 1 : 0);
  if (modes > 1) usage("--subset, --sweep and --online are exclusive");

  std::vector<ValidationReport> reports;
  if (!o.sweep.empty()) {
    reports = subset_sweep(panel, load_partition(fs::path(o.sweep)), layout);
  } else if (o.online) {
    auto online = online_validate(panel, o.warmup, o.forgetting, layout);
    doc["warmup"] = o.warmup;
    doc["forgetting"] = o.forgetting;
    reports = {std::move(online.mode_a), std::move(online.mode_b)};
  } else {
    std::string label = o.subset.empty() ? "all" : o.subset;
    std::vector<std::string> units;
    if (o.subset.empty() || o.subset == "all") {
      units = panel.unit_ids();
    } else if (!o.partition.empty()) {
      for (const auto& [unit, group] : load_partition(fs::path(o.partition))) {
        if (group == o.subset && std::find(panel.unit_ids().begin(), panel.unit_ids().end(), unit) !=
                                     panel.unit_ids().end()) {
          units.push_back(unit);
        }
      }
    } else {
      for (const auto& id : panel.unit_ids()) {
        if (id.starts_with(o.subset)) units.push_back(id);
      }
    }
    if (units.empty()) usage("subset '" + o.subset + "' selects no units");
    reports.push_back(subset_train_full_validate(panel, units, label, layout));
  }

  Json list = Json::array();
  std::vector<const ValidationReport*> ptrs;
  for (const auto& r : reports) {
    list.push_back(report_json(r, panel));
    ptrs.push_back(&r);
  }
  doc["reports"] = std::move(list);
  if (!o.residuals.empty()) {
    write_residuals(o.residuals, ptrs, panel);
    doc["residuals"] = o.residuals;
  }
  emit(doc, out, o.out);
  return 0;
}

// --- experiment ----------------------------------------------------------------

int cmd_experiment(const Options& o, std::ostream& out) {
  if (o.experiment == "hetero-homo") {
    HeteroHomoConfig config;
    if (o.seed) config.seed = *o.seed;
    if (o.sigma) config.sigma = *o.sigma;
    if (o.steps > 0) config.steps = o.steps;
    if (o.fit_transitions) config.fit_transitions = *o.fit_transitions;
    const auto result = hetero_vs_homo_experiment(config);
    Json estimates = Json::array();
    for (std::size_t k = 0; k < result.estimates.size(); ++k) {
      estimates.push_back(estimate_json(result.estimates[k], static_cast<Index>(k)));
    }
    Json flagged = Json::array();
    for (const auto& [i, k] : result.flagged) flagged.push_back(Json{{"node", i}, {"virus", k}});
    Json doc{{"command", "experiment"},
             {"experiment", o.experiment},
             {"seed", config.seed},
             {"sigma", config.sigma},
             {"steps", config.steps},
             {"fit_transitions", config.fit_transitions},
             {"estimates", std::move(estimates)},
             {"rms_observed", io::to_json(result.rms)},
             {"rms_noiseless", io::to_json(result.rms_clean)},
             {"median_rms", result.median_rms},
             {"flagged", std::move(flagged)},
             {"warnings", result.warnings}};
    if (!o.out.empty()) {
      const fs::path dir(o.out);
      for (const auto& [name, traj] : {std::pair{"noiseless.csv", &result.clean},
                                       std::pair{"observed.csv", &result.observed},
                                       std::pair{"fitted.csv", &result.fitted}}) {
        std::ostringstream csv;
        io::write_trajectory(csv, *traj);
        io::write_text(dir / name, csv.str());
      }
      io::write_text(dir / "summary.json", doc.dump(2) + "\n");
    }
    emit(doc, out, "");
    return 0;
  }
  if (o.experiment == "synthetic-panel") {
    auto config = default_synthetic_config();
    if (o.seed) config.seed = *o.seed;
    const auto panel = make_synthetic_panel(config);
    const fs::path dir = o.out.empty() ? output_dir() : fs::path(o.out);
    write_synthetic_panel(panel, dir);
    emit(Json{{"command", "experiment"},
              {"experiment", o.experiment},
              {"seed", config.seed},
              {"units", panel.dataset.units()},
              {"directory", dir.string()}},
         out, "");
    return 0;
  }
  usage("unknown experiment '" + o.experiment + "' (hetero-homo, synthetic-panel)");
}

std::string one_line(std::string text) {
  std::replace(text.begin(), text.end(), '\n', ' ');
  return text;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Multi-virus SIS network models: simulation, stability analysis and parameter identification"};
  app.name("mvsis");
  app.require_subcommand(1);
  app.fallthrough();

  const std::vector<std::string> names{"simulate", "analyze", "identify", "predict", "validate", "experiment"};
  std::string section;
  for (const auto& a : args) {
    if (std::find(names.begin(), names.end(), a) != names.end()) {
      section = a;
      break;
    }
  }
  app.config_formatter(std::make_shared<JsonConfig>(section));
  app.set_config("--config", "", "JSON file with flag defaults; command-line flags take precedence");

  const auto existing = CLI::ExistingFile;

  auto* sim = app.add_subcommand("simulate", "Run the discrete-time dynamics from an initial state");
  sim->add_option("--model", o.model, "Model JSON file (or inline JSON)")->required();
  sim->add_option("--x0", o.x0, "Initial state CSV (node,virus,value)")->required()->check(existing);
  sim->add_option("--steps", o.steps, "Number of time steps")->required()->check(CLI::NonNegativeNumber);
  sim->add_option("--out", o.out, "Trajectory CSV (default: $MVSIS_OUTPUT_DIR/trajectory.csv)");
  sim->add_option("--noise", o.noise, "Standard deviation of additive Gaussian noise")->check(CLI::NonNegativeNumber);
  sim->add_option("--seed", o.seed, "Random seed (required with --noise)");
  sim->add_flag("--emit-colors", o.emit_colors, "Also write the two-virus RGB colour map next to the trajectory");

  auto* ana = app.add_subcommand("analyze", "Check assumptions and classify the stability regime");
  ana->add_option("--model", o.model, "Model JSON file (or inline JSON)")->required();
  ana->add_option("--tol", o.tol, "Band around 1 treated as critical")->check(CLI::PositiveNumber);
  ana->add_flag("--endemic", o.endemic, "Compute the single-virus endemic state of each supercritical virus");
  ana->add_option("--out", o.out, "Also write the report to this JSON file");

  auto* idf = app.add_subcommand("identify", "Recover spreading parameters from a trajectory");
  idf->add_option("--data", o.data, "Trajectory CSV (t,node,virus,value)")->required()->check(existing);
  idf->add_option("--adjacency", o.adjacency, "Adjacency CSV (row,col,weight); once, or once per virus")
      ->check(existing);
  idf->add_option("--positions", o.positions, "Node positions CSV (node,x,y) for a geometric network")
      ->check(existing);
  idf->add_option("--virus", o.virus, "Only this virus (0-based)");
  idf->add_option("--node", o.node, "Per-node parameters for this node (0-based)");
  idf->add_flag("--heterogeneous", o.heterogeneous, "Per-node parameters for every node");
  idf->set_help_flag("--help", "Print this help message and exit");
  auto* h_opt = idf->add_option("--h", o.h, "Known sampling parameter h")->check(CLI::PositiveNumber);
  idf->add_flag("--lumped", "Estimate h*beta and h*delta (default when --h is absent)")->excludes(h_opt);
  idf->add_flag("--online", o.online, "Recursive least squares, one transition at a time");
  idf->add_option("--forgetting", o.forgetting, "RLS forgetting factor in (0, 1]")
      ->check(CLI::Range(0.0, 1.0));
  idf->add_option("--out", o.out, "Also write the estimates to this JSON file");

  auto* pre = app.add_subcommand("predict", "Step a state forward with a model or estimated parameters");
  pre->add_option("--x0", o.x0, "State CSV (node,virus,value)")->required()->check(existing);
  pre->add_option("--model", o.model, "Model JSON file (or inline JSON)");
  pre->add_option("--estimates", o.estimates, "Estimates JSON written by identify")->check(existing);
  pre->add_option("--adjacency", o.adjacency, "Adjacency CSV used with --estimates")->check(existing);
  pre->add_option("--positions", o.positions, "Node positions CSV used with --estimates")->check(existing);
  pre->add_option("--steps", o.steps, "Number of steps (default 1)")->check(CLI::PositiveNumber);
  pre->add_option("--out", o.out, "Trajectory CSV (default: $MVSIS_OUTPUT_DIR/prediction.csv)");

  auto* val = app.add_subcommand("validate", "Fit and score homogeneous models on an enrollment panel");
  val->add_option("--data", o.data, "Enrollment CSV (unit_id,year,program,enrolled_count) or panel JSON")
      ->required()
      ->check(existing);
  val->add_option("--borders", o.borders, "Border CSV (unit_id_a,unit_id_b)")->check(existing);
  val->add_option("--programs", o.programs, "Program labels in virus order")->delimiter(',');
  val->add_option("--drop", o.drop, "Unit ids to exclude; a trailing * matches a prefix")->delimiter(',');
  val->add_option("--partition", o.partition, "Group CSV (unit_id,group) used by --subset")->check(existing);
  val->add_option("--subset", o.subset,
                  "Train on this group (with --partition) or on units whose id starts with it; 'all' for every unit");
  val->add_option("--sweep", o.sweep, "Group CSV (unit_id,group); rank every group as training subset")
      ->check(existing);
  val->add_flag("--online", o.online, "One-step-ahead validation with recursive least squares");
  val->add_option("--warmup", o.warmup, "Transitions seen before the first prediction")
      ->check(CLI::PositiveNumber);
  val->add_option("--forgetting", o.forgetting, "RLS forgetting factor in (0, 1]")->check(CLI::Range(0.0, 1.0));
  val->add_option("--layout", o.layout, "Error channels")
      ->check(CLI::IsMember({"viruses", "viruses_and_susceptible"}));
  val->add_option("--residuals", o.residuals, "Write per-unit per-year residuals to this CSV");
  val->add_option("--out", o.out, "Also write the reports to this JSON file");

  auto* exp = app.add_subcommand("experiment", "Run a bundled experiment");
  exp->add_option("name", o.experiment, "hetero-homo or synthetic-panel")
      ->required()
      ->check(CLI::IsMember({"hetero-homo", "synthetic-panel"}));
  exp->add_option("--seed", o.seed, "Random seed");
  exp->add_option("--sigma", o.sigma, "Noise standard deviation")->check(CLI::NonNegativeNumber);
  exp->add_option("--steps", o.steps, "Time steps")->check(CLI::PositiveNumber);
  exp->add_option("--fit-transitions", o.fit_transitions, "Transitions used for fitting")
      ->check(CLI::PositiveNumber);
  exp->add_option("--out", o.out, "Output directory");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "error: origin=cli kind=usage message=" << one_line(e.what()) << '\n';
    return 1;
  }

  try {
    if (sim->parsed()) return cmd_simulate(o, out);
    if (ana->parsed()) return cmd_analyze(o, out);
    if (idf->parsed()) return cmd_identify(o, out);
    if (pre->parsed()) return cmd_predict(o, out);
    if (val->parsed()) return cmd_validate(o, out);
    return cmd_experiment(o, out);
  } catch (const Error& e) {
    err << "error: origin=" << e.origin() << " kind=" << to_string(e.kind()) << " message=" << one_line(e.what())
        << '\n';
  } catch (const std::exception& e) {
    err << "error: origin=cli kind=internal message=" << one_line(e.what()) << '\n';
  }
  return 1;
}

}  // namespace mvsis::cli
