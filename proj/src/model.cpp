#include "mvsis/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mvsis/error.hpp"
#include "mvsis/kernels.hpp"
#include "mvsis/spectral.hpp"

namespace mvsis {

namespace {

constexpr const char* kOrigin = "model-core";

[[noreturn]] void fail(const std::string& op, ErrorKind kind, const std::string& message) {
  throw Error(std::string(kOrigin) + "." + op, kind, message);
}

bool all_finite(const auto& m) { return m.allFinite(); }

}  // namespace

// --- VirusLayer --------------------------------------------------------------

VirusLayer VirusLayer::from_matrix(Matrix infection, Vector healing) {
  if (infection.rows() != infection.cols() || infection.rows() != healing.size()) {
    fail("VirusLayer", ErrorKind::dimension_mismatch,
         "infection matrix must be n x n and healing rates length n");
  }
  if (!all_finite(infection) || !all_finite(healing)) {
    fail("VirusLayer", ErrorKind::invalid_argument, "layer parameters must be finite");
  }
  VirusLayer layer;
  layer.infection_ = std::move(infection);
  layer.healing_ = std::move(healing);
  return layer;
}

VirusLayer VirusLayer::factored(Vector beta, Matrix adjacency, Vector healing) {
  if (adjacency.rows() != adjacency.cols() || adjacency.rows() != beta.size()) {
    fail("VirusLayer", ErrorKind::dimension_mismatch,
         "adjacency must be n x n and infection rates length n");
  }
  Matrix infection = beta.asDiagonal() * adjacency;
  VirusLayer layer = from_matrix(std::move(infection), std::move(healing));
  layer.beta_ = std::move(beta);
  layer.adjacency_ = std::move(adjacency);
  return layer;
}

VirusLayer VirusLayer::homogeneous(double beta, Matrix adjacency, double delta) {
  const Index n = adjacency.rows();
  return factored(Vector::Constant(n, beta), std::move(adjacency), Vector::Constant(n, delta));
}

const Vector& VirusLayer::beta() const {
  if (!beta_) fail("VirusLayer", ErrorKind::precondition, "layer has no factored form");
  return *beta_;
}

const Matrix& VirusLayer::adjacency() const {
  if (!adjacency_) fail("VirusLayer", ErrorKind::precondition, "layer has no factored form");
  return *adjacency_;
}

// --- MultiVirusModel ---------------------------------------------------------

MultiVirusModel::MultiVirusModel(double h, std::vector<VirusLayer> layers, bool strict)
    : h_(h), layers_(std::move(layers)), strict_(strict) {
  if (layers_.empty()) fail("MultiVirusModel", ErrorKind::invalid_argument, "need at least one virus");
  if (!std::isfinite(h_)) fail("MultiVirusModel", ErrorKind::invalid_argument, "h must be finite");
  const Index n = layers_.front().size();
  for (const auto& layer : layers_) {
    if (layer.size() != n) {
      fail("MultiVirusModel", ErrorKind::dimension_mismatch, "all layers must have the same node count");
    }
  }
}

// --- EpidemicState -----------------------------------------------------------

EpidemicState::EpidemicState(Matrix values) : values_(std::move(values)) {
  if (!values_.allFinite()) fail("EpidemicState", ErrorKind::invalid_argument, "state must be finite");
}

EpidemicState EpidemicState::zeros(Index nodes, Index viruses) {
  return EpidemicState(Matrix::Zero(nodes, viruses));
}

double EpidemicState::domain_excursion() const {
  double excursion = 0.0;
  for (Index i = 0; i < values_.rows(); ++i) {
    double sum = 0.0;
    for (Index k = 0; k < values_.cols(); ++k) {
      const double v = values_(i, k);
      excursion = std::max({excursion, -v, v - 1.0});
      sum += v;
    }
    excursion = std::max(excursion, sum - 1.0);
  }
  return excursion;
}

void clamp_to_domain(Matrix& values) {
  for (Index i = 0; i < values.rows(); ++i) {
    double sum = 0.0;
    for (Index k = 0; k < values.cols(); ++k) {
      double& v = values(i, k);
      v = std::clamp(v, 0.0, 1.0);
      sum += v;
    }
    if (sum > 1.0) values.row(i) /= sum;
  }
}

// --- Trajectory --------------------------------------------------------------

Trajectory::Trajectory(EpidemicState initial, std::optional<double> h_value) : h(h_value) {
  states_.push_back(std::move(initial));
}

Trajectory::Trajectory(std::vector<EpidemicState> states, std::optional<double> h_value)
    : h(h_value), states_(std::move(states)) {
  if (states_.empty()) fail("Trajectory", ErrorKind::invalid_argument, "trajectory needs at least one state");
  for (const auto& s : states_) {
    if (s.nodes() != states_.front().nodes() || s.viruses() != states_.front().viruses()) {
      fail("Trajectory", ErrorKind::dimension_mismatch, "all states must share (n, m)");
    }
  }
}

void Trajectory::append(EpidemicState state) {
  if (state.nodes() != nodes() || state.viruses() != viruses()) {
    fail("Trajectory", ErrorKind::dimension_mismatch, "all states must share (n, m)");
  }
  states_.push_back(std::move(state));
}

// --- validation --------------------------------------------------------------

bool AssumptionReport::passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const AssumptionCheck& c) { return !c.evaluated || c.passed; });
}

std::string AssumptionReport::first_failure() const {
  for (const auto& c : checks) {
    if (c.evaluated && !c.passed) {
      return "assumption " + std::to_string(c.assumption) + ": " + c.detail;
    }
  }
  return {};
}

namespace {

void check_initial_state(const MultiVirusModel& model, const EpidemicState& x0, AssumptionCheck& c) {
  c.assumption = 1;
  if (x0.nodes() != model.nodes() || x0.viruses() != model.viruses()) {
    c.passed = false;
    c.detail = "initial state shape does not match the model";
    return;
  }
  for (Index i = 0; i < x0.nodes(); ++i) {
    double sum = 0.0;
    for (Index k = 0; k < x0.viruses(); ++k) {
      const double v = x0(i, k);
      if (v < -kDomainTolerance || v > 1.0 + kDomainTolerance) {
        c.passed = false;
        c.node = i;
        c.virus = k;
        c.detail = "x0(" + std::to_string(i) + "," + std::to_string(k) + ") outside [0,1]";
        return;
      }
      sum += v;
    }
    if (sum > 1.0 + kDomainTolerance) {
      c.passed = false;
      c.node = i;
      std::ostringstream os;
      os << "infection fractions at node " << i << " sum to " << sum << " > 1";
      c.detail = os.str();
      return;
    }
  }
}

void check_nonnegative(const MultiVirusModel& model, AssumptionCheck& c) {
  c.assumption = 2;
  for (Index k = 0; k < model.viruses(); ++k) {
    const auto& layer = model.layer(k);
    for (Index i = 0; i < model.nodes(); ++i) {
      if (layer.healing()(i) < 0.0) {
        c.passed = false;
        c.node = i;
        c.virus = k;
        c.detail = "negative healing rate delta at (" + std::to_string(i) + "," + std::to_string(k) + ")";
        return;
      }
      for (Index j = 0; j < model.nodes(); ++j) {
        if (layer.infection()(i, j) < 0.0) {
          c.passed = false;
          c.node = i;
          c.column = j;
          c.virus = k;
          c.detail = "negative infection rate beta(" + std::to_string(i) + "," + std::to_string(j) +
                     ") of virus " + std::to_string(k);
          return;
        }
      }
    }
  }
}

void check_rate_bounds(const MultiVirusModel& model, AssumptionCheck& c) {
  c.assumption = 3;
  const double h = model.h();
  for (Index i = 0; i < model.nodes(); ++i) {
    for (Index k = 0; k < model.viruses(); ++k) {
      if (h * model.layer(k).healing()(i) > 1.0) {
        c.passed = false;
        c.node = i;
        c.virus = k;
        std::ostringstream os;
        os << "h*delta = " << h * model.layer(k).healing()(i) << " > 1 at (" << i << "," << k << ")";
        c.detail = os.str();
        return;
      }
    }
  }
  for (Index i = 0; i < model.nodes(); ++i) {
    double total = 0.0;
    for (Index k = 0; k < model.viruses(); ++k) total += model.layer(k).infection().row(i).sum();
    if (h * total > 1.0) {
      c.passed = false;
      c.node = i;
      std::ostringstream os;
      os << "h * sum_k sum_j beta_ij^k = " << h * total << " > 1 at node " << i;
      c.detail = os.str();
      return;
    }
  }
}

void check_nontrivial(const MultiVirusModel& model, AssumptionCheck& c) {
  c.assumption = 4;
  if (model.nodes() <= 1) {
    c.passed = false;
    c.detail = "need n > 1 agents";
    return;
  }
  if (!(model.h() > 0.0)) {
    c.passed = false;
    c.detail = "sampling parameter h must be positive";
    return;
  }
  const bool any_spread = std::any_of(model.layers().begin(), model.layers().end(),
                                      [](const VirusLayer& l) { return (l.infection().array() != 0.0).any(); });
  if (!any_spread) {
    c.passed = false;
    c.detail = "all infection matrices are zero";
  }
}

void check_irreducible(const MultiVirusModel& model, AssumptionCheck& c) {
  c.assumption = 5;
  if (!model.strict()) {
    c.evaluated = false;
    c.detail = "skipped (model not in strict mode)";
    return;
  }
  for (Index k = 0; k < model.viruses(); ++k) {
    if (!is_irreducible(model.layer(k).infection())) {
      c.passed = false;
      c.virus = k;
      c.detail = "infection matrix of virus " + std::to_string(k) + " is reducible";
      return;
    }
  }
}

}  // namespace

AssumptionReport validate_parameters(const MultiVirusModel& model) {
  AssumptionReport report;
  report.checks[0].assumption = 1;
  report.checks[0].evaluated = false;
  report.checks[0].detail = "no initial state supplied";
  check_nonnegative(model, report.checks[1]);
  check_rate_bounds(model, report.checks[2]);
  check_nontrivial(model, report.checks[3]);
  check_irreducible(model, report.checks[4]);
  return report;
}

AssumptionReport validate_model(const MultiVirusModel& model, const EpidemicState& x0) {
  AssumptionReport report = validate_parameters(model);
  report.checks[0] = AssumptionCheck{};
  check_initial_state(model, x0, report.checks[0]);
  return report;
}

// --- dynamics ----------------------------------------------------------------

EpidemicState step(const MultiVirusModel& model, const EpidemicState& x) {
  if (x.nodes() != model.nodes() || x.viruses() != model.viruses()) {
    fail("step", ErrorKind::dimension_mismatch, "state shape does not match the model");
  }
  if (!x.in_domain()) {
    fail("step", ErrorKind::domain_violation, "state lies outside the domain D");
  }
  Matrix current = x.values();
  clamp_to_domain(current);
  Matrix next(current.rows(), current.cols());
  kernels::advance(model, current, next);
  return EpidemicState(std::move(next));
}

Trajectory simulate(const MultiVirusModel& model, const EpidemicState& x0, Index steps,
                    SimulateOptions options) {
  if (steps < 0) fail("simulate", ErrorKind::invalid_argument, "steps must be non-negative");
  if (x0.nodes() != model.nodes() || x0.viruses() != model.viruses()) {
    fail("simulate", ErrorKind::dimension_mismatch, "initial state shape does not match the model");
  }
  if (options.check_assumptions) {
    const AssumptionReport report = validate_model(model, x0);
    if (!report.passed()) fail("simulate", ErrorKind::assumption_violation, report.first_failure());
  } else if (!x0.in_domain()) {
    fail("simulate", ErrorKind::domain_violation, "initial state lies outside the domain D");
  }

  Matrix current = x0.values();
  clamp_to_domain(current);
  Trajectory traj(EpidemicState(current), model.h());
  Matrix next(current.rows(), current.cols());
  double worst = 0.0;
  for (Index t = 0; t < steps; ++t) {
    worst = std::max(worst, kernels::advance(model, current, next));
    current.swap(next);
    traj.append(EpidemicState(current));
  }
  traj.max_excursion = worst;
  return traj;
}

std::vector<Rgb> color_map(const EpidemicState& x) {
  if (x.viruses() != 2) fail("color_map", ErrorKind::invalid_argument, "colour map needs exactly two viruses");
  if (!x.in_domain()) fail("color_map", ErrorKind::domain_violation, "state lies outside the domain D");
  std::vector<Rgb> colors(static_cast<std::size_t>(x.nodes()));
  for (Index i = 0; i < x.nodes(); ++i) {
    const double red = x(i, 0);
    const double green = x(i, 1);
    colors[static_cast<std::size_t>(i)] = {red, green, 1.0 - red - green};
  }
  return colors;
}

}  // namespace mvsis
