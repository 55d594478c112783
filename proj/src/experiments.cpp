#include "mvsis/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>

#include "mvsis/error.hpp"

namespace mvsis {

namespace {

constexpr const char* kOrigin = "experiment-harness";

[[noreturn]] void fail(const std::string& op, ErrorKind kind, const std::string& message) {
  throw Error(std::string(kOrigin) + "." + op, kind, message);
}

Matrix with_channels(const Matrix& x, FrobeniusLayout layout) {
  if (layout == FrobeniusLayout::viruses) return x;
  Matrix out(x.rows(), x.cols() + 1);
  out.leftCols(x.cols()) = x;
  out.col(x.cols()) = Vector::Ones(x.rows()) - x.rowwise().sum();
  return out;
}

MultiVirusModel model_from_estimates(std::span<const EstimationResult> estimates, const Matrix& adjacency) {
  std::vector<VirusLayer> layers;
  for (const auto& e : estimates) layers.push_back(VirusLayer::homogeneous(e.beta, adjacency, e.delta));
  return MultiVirusModel(estimates.front().h, std::move(layers));
}

void note_estimate(std::vector<std::string>& warnings, const EstimationResult& e, Index k) {
  const std::string who = "program " + std::to_string(k);
  if (!e.identifiable) warnings.push_back(who + ": parameters are not uniquely determined");
  if (e.delta < 0.0) warnings.push_back(who + ": negative healing rate " + std::to_string(e.delta));
  if (e.beta < 0.0) warnings.push_back(who + ": negative infection rate " + std::to_string(e.beta));
}

void note_model(std::vector<std::string>& warnings, const MultiVirusModel& model) {
  const auto report = validate_parameters(model);
  for (const auto& c : report.checks) {
    if (c.evaluated && !c.passed) warnings.push_back("assumption " + std::to_string(c.assumption) + ": " + c.detail);
  }
}

std::vector<Matrix> states_of(const Trajectory& traj) {
  std::vector<Matrix> out;
  out.reserve(traj.size());
  for (const auto& x : traj) out.push_back(x.values());
  return out;
}

void score(ValidationReport& report, const PanelDataset& dataset, FrobeniusLayout layout) {
  const auto err = scaled_frobenius_error(dataset.fractions(), report.predicted, layout);
  report.scaled_error = err.scaled;
  report.numerator = err.numerator;
  report.denominator = err.denominator;
}

}  // namespace

std::string_view to_string(FrobeniusLayout layout) {
  return layout == FrobeniusLayout::viruses ? "viruses" : "viruses_and_susceptible";
}

FrobeniusLayout layout_from_string(std::string_view text) {
  if (text == "viruses") return FrobeniusLayout::viruses;
  if (text == "viruses_and_susceptible") return FrobeniusLayout::viruses_and_susceptible;
  fail("layout", ErrorKind::invalid_argument, "unknown layout '" + std::string(text) + "'");
}

FrobeniusError scaled_frobenius_error(std::span<const Matrix> data, std::span<const Matrix> predicted,
                                      FrobeniusLayout layout) {
  if (data.size() != predicted.size()) {
    fail("scaled_frobenius_error", ErrorKind::dimension_mismatch, "year counts differ");
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t y = 0; y < data.size(); ++y) {
    if (data[y].rows() != predicted[y].rows() || data[y].cols() != predicted[y].cols()) {
      fail("scaled_frobenius_error", ErrorKind::dimension_mismatch, "shapes differ in year " + std::to_string(y));
    }
    const Matrix f = with_channels(data[y], layout);
    const Matrix g = with_channels(predicted[y], layout);
    num += (f - g).squaredNorm();
    den += f.squaredNorm();
  }
  if (!(den > 0.0)) fail("scaled_frobenius_error", ErrorKind::degenerate, "data tensor is zero");
  FrobeniusError out;
  out.numerator = std::sqrt(num);
  out.denominator = std::sqrt(den);
  out.scaled = out.numerator / out.denominator;
  return out;
}

ValidationReport subset_train_full_validate(const PanelDataset& dataset, std::span<const std::string> subset,
                                            const std::string& label, FrobeniusLayout layout) {
  if (subset.empty()) fail("subset_train_full_validate", ErrorKind::precondition, "subset is empty");
  if (dataset.year_count() < 2) {
    fail("subset_train_full_validate", ErrorKind::precondition, "panel needs at least two years");
  }
  const PanelDataset train = dataset.subset(subset);
  const Trajectory traj = train.as_trajectory();

  ValidationReport report;
  report.training_subset = label;
  for (Index k = 0; k < dataset.programs(); ++k) {
    auto est = identify_homogeneous(traj, train.adjacency(), k, std::nullopt);
    if (!est.identifiable) report.non_unique = true;
    note_estimate(report.assumption_warnings, est, k);
    report.parameters_used.push_back(std::move(est));
  }
  const auto model = model_from_estimates(report.parameters_used, dataset.adjacency());
  note_model(report.assumption_warnings, model);
  const auto sim = simulate(model, EpidemicState(dataset.fractions().front()), dataset.year_count() - 1,
                            SimulateOptions{.check_assumptions = false});
  report.predicted = states_of(sim);
  score(report, dataset, layout);
  return report;
}

std::vector<ValidationReport> subset_sweep(const PanelDataset& dataset,
                                           const std::map<std::string, std::string>& partition,
                                           FrobeniusLayout layout) {
  std::map<std::string, std::vector<std::string>> groups;
  for (const auto& id : dataset.unit_ids()) {
    const auto it = partition.find(id);
    if (it == partition.end()) fail("subset_sweep", ErrorKind::precondition, "unit '" + id + "' has no group");
    groups[it->second].push_back(id);
  }
  std::vector<std::pair<std::string, std::vector<std::string>>> work(groups.begin(), groups.end());
  std::vector<ValidationReport> reports(work.size());
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
  for (std::size_t g = 0; g < work.size(); ++g) {
    try {
      reports[g] = subset_train_full_validate(dataset, work[g].second, work[g].first, layout);
    } catch (...) {
#pragma omp critical(mvsis_sweep_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  std::stable_sort(reports.begin(), reports.end(), [](const ValidationReport& a, const ValidationReport& b) {
    if (a.scaled_error != b.scaled_error) return a.scaled_error < b.scaled_error;
    return a.training_subset < b.training_subset;
  });
  return reports;
}

OnlineValidation online_validate(const PanelDataset& dataset, Index warmup, double forgetting,
                                 FrobeniusLayout layout) {
  if (warmup < 1) fail("online_validate", ErrorKind::invalid_argument, "warmup must be at least one transition");
  if (dataset.empty() || dataset.year_count() - 1 <= warmup) {
    fail("online_validate", ErrorKind::precondition,
         "need more than " + std::to_string(warmup) + " transitions, panel has " +
             std::to_string(std::max<Index>(dataset.year_count() - 1, 0)));
  }
  const Trajectory traj = dataset.as_trajectory();
  const Index m = dataset.programs();
  const Index years = dataset.year_count();
  const std::span<const Matrix> adjacency(&dataset.adjacency(), 1);

  OnlineValidation out;
  std::vector<RlsState> rls(static_cast<std::size_t>(m), rls_init(forgetting));
  for (Index t = 0; t + 1 < years; ++t) {
    const Trajectory pair(std::vector<EpidemicState>{traj[static_cast<std::size_t>(t)],
                                                     traj[static_cast<std::size_t>(t + 1)]});
    std::vector<EstimationResult> current;
    for (Index k = 0; k < m; ++k) {
      auto& state = rls[static_cast<std::size_t>(k)];
      state = rls_update(std::move(state), build_phi_homogeneous(pair, dataset.adjacency(), k));
      current.push_back(rls_estimate(state));
    }
    out.estimates.push_back(std::move(current));
  }

  // estimates[t - 1] is what is known before year t + 1 is observed.
  const auto predict = [&](Index t, const std::vector<EstimationResult>& est) {
    return one_step_predict(est, traj[static_cast<std::size_t>(t)], adjacency).values();
  };
  const auto& first = out.estimates[static_cast<std::size_t>(warmup - 1)];
  auto& a = out.mode_a;
  auto& b = out.mode_b;
  a.mode = "online-A";
  b.mode = "online-B";
  a.training_subset = b.training_subset = "all";
  for (Index y = 0; y < years; ++y) {
    if (y <= warmup) {
      a.predicted.push_back(dataset.fractions()[static_cast<std::size_t>(y)]);
      b.predicted.push_back(y == 0 ? dataset.fractions().front() : predict(y - 1, first));
    } else {
      const Matrix p = predict(y - 1, out.estimates[static_cast<std::size_t>(y - 2)]);
      a.predicted.push_back(p);
      b.predicted.push_back(p);
    }
  }
  const auto& last = out.estimates[static_cast<std::size_t>(years - 3)];
  for (auto* report : {&a, &b}) {
    report->parameters_used = last;
    for (Index t = warmup - 1; t + 2 < years; ++t) {
      for (Index k = 0; k < m; ++k) {
        const auto& e = out.estimates[static_cast<std::size_t>(t)][static_cast<std::size_t>(k)];
        if (!e.identifiable) report->non_unique = true;
        if (e.delta < 0.0 || e.beta < 0.0) {
          report->assumption_warnings.push_back("program " + std::to_string(k) + " after transition " +
                                                std::to_string(t) + ": negative rate estimate");
        }
      }
    }
    score(*report, dataset, layout);
  }
  return out;
}

HeteroHomoResult hetero_vs_homo_experiment(const HeteroHomoConfig& config) {
  const Index n = config.x0.rows();
  const Index m = config.x0.cols();
  if (static_cast<Index>(config.beta.size()) != m || static_cast<Index>(config.delta.size()) != m) {
    fail("hetero_vs_homo_experiment", ErrorKind::dimension_mismatch, "need beta and delta for every virus");
  }
  if (config.fit_transitions < 1 || config.fit_transitions > config.steps) {
    fail("hetero_vs_homo_experiment", ErrorKind::invalid_argument, "fit window must lie inside the run");
  }
  const Matrix a = config.adjacency.value_or(Matrix::Ones(n, n) - Matrix::Identity(n, n));
  std::vector<VirusLayer> layers;
  for (Index k = 0; k < m; ++k) {
    layers.push_back(VirusLayer::factored(config.beta[static_cast<std::size_t>(k)], a,
                                          config.delta[static_cast<std::size_t>(k)]));
  }
  const MultiVirusModel truth(config.h, std::move(layers));

  Trajectory clean = simulate(truth, EpidemicState(config.x0), config.steps);
  Trajectory observed = inject_noise(clean, config.sigma, config.seed);
  HeteroHomoResult out{std::move(clean), std::move(observed), Trajectory(EpidemicState(config.x0)), {}, {}, {}, 0.0, {}, {}};

  std::vector<EpidemicState> window(out.observed.begin(),
                                    out.observed.begin() + static_cast<std::ptrdiff_t>(config.fit_transitions + 1));
  const Trajectory fit_data(std::move(window));
  for (Index k = 0; k < m; ++k) {
    auto est = identify_homogeneous(fit_data, a, k, std::nullopt);
    note_estimate(out.warnings, est, k);
    out.estimates.push_back(std::move(est));
  }
  const auto model = model_from_estimates(out.estimates, a);
  note_model(out.warnings, model);
  out.fitted = simulate(model, out.observed.front(), config.steps, SimulateOptions{.check_assumptions = false});

  out.rms = Matrix::Zero(n, m);
  out.rms_clean = Matrix::Zero(n, m);
  for (std::size_t t = 0; t < out.fitted.size(); ++t) {
    out.rms += (out.fitted[t].values() - out.observed[t].values()).cwiseAbs2();
    out.rms_clean += (out.fitted[t].values() - out.clean[t].values()).cwiseAbs2();
  }
  const double samples = static_cast<double>(out.fitted.size());
  out.rms = (out.rms / samples).cwiseSqrt();
  out.rms_clean = (out.rms_clean / samples).cwiseSqrt();

  std::vector<double> sorted(out.rms_clean.data(), out.rms_clean.data() + out.rms_clean.size());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  out.median_rms = sorted.size() % 2 == 1 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  for (Index i = 0; i < n; ++i) {
    for (Index k = 0; k < m; ++k) {
      if (out.rms_clean(i, k) > out.median_rms) out.flagged.emplace_back(i, k);
    }
  }
  return out;
}

}  // namespace mvsis
