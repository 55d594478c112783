// Acceptance runner: one PASS/FAIL line per criterion.
//
//   acceptance                 run everything
//   acceptance --criterion 4   run one criterion (ids: 1 2 2c 3 4 5 6 7 8 9)
//
// Exit status is nonzero if any selected criterion fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include <omp.h>

#include "mvsis/data.hpp"
#include "mvsis/error.hpp"
#include "mvsis/experiments.hpp"
#include "mvsis/identification.hpp"
#include "mvsis/kernels.hpp"
#include "mvsis/spectral.hpp"
#include "mvsis/synthetic.hpp"
#include "support.hpp"

using namespace mvsis;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

testing::Rng seeded(std::uint64_t criterion, std::uint64_t instance) {
  std::seed_seq seq{criterion, instance};
  return testing::Rng(seq);
}

// Homogeneous model, each virus on its own irreducible adjacency, Assumption 3
// respected. target(rng, k, cap) picks virus k's threshold quantity below cap,
// the largest one reachable on that adjacency.
using TargetFn = std::function<double(testing::Rng&, Index, double)>;

MultiVirusModel threshold_model(testing::Rng& rng, Index n, Index m, const TargetFn& target, double& h,
                                std::vector<double>& targets) {
  h = testing::uniform(rng, 0.1, 1.0);
  const double budget = 0.95 / static_cast<double>(m);
  std::vector<VirusLayer> layers;
  targets.clear();
  for (Index k = 0; k < m; ++k) {
    const Matrix a = testing::random_irreducible_adjacency(rng, n, testing::uniform(rng, 0.0, 0.5));
    targets.push_back(target(rng, k, testing::max_threshold(a, budget)));
    const auto r = testing::rates_for_threshold(rng, a, h, targets.back(), budget);
    layers.push_back(VirusLayer::homogeneous(r.beta, a, r.delta));
  }
  return MultiVirusModel(h, std::move(layers), true);
}

double relative_error(double got, double want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

// --- 1 ----------------------------------------------------------------------

Outcome box_invariance() {
  const auto start = std::chrono::steady_clock::now();
  const int models = 1000;
  const Index steps = 10000;
  double worst = 0.0;
  bool outside = false;
#pragma omp parallel for schedule(dynamic) reduction(max : worst) reduction(|| : outside)
  for (int s = 0; s < models; ++s) {
    auto rng = seeded(1, static_cast<std::uint64_t>(s));
    const Index n = testing::uniform_int(rng, 2, 20);
    const Index m = testing::uniform_int(rng, 1, 3);
    const auto model = testing::random_valid_model(rng, n, m);
    Matrix x = testing::random_state(rng, n, m);
    Matrix next(n, m);
    for (Index t = 0; t < steps; ++t) {
      worst = std::max(worst, kernels::advance_reference(model, x, next));
      x.swap(next);
      if (!EpidemicState(x).in_domain()) outside = true;
    }
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {worst <= 1e-12 && !outside && seconds < 60.0,
          fmt("largest pre-clamp excursion %.3g over %d models x %lld steps, %.1f s", worst, models,
              static_cast<long long>(steps), seconds)};
}

// --- 2 ----------------------------------------------------------------------

struct DecayRun {
  int converged = 0;
  int runs = 0;
  double worst_final = 0.0;
  Index slowest = 0;
};

DecayRun healthy_decay(int models, std::uint64_t stream, const TargetFn& target, double& worst_rho_gap) {
  DecayRun out;
  double gap = 0.0;
  int converged = 0;
  int runs = 0;
  double worst_final = 0.0;
  Index slowest = 0;
#pragma omp parallel for schedule(dynamic) reduction(+ : converged, runs) reduction(max : worst_final, slowest, gap)
  for (int s = 0; s < models; ++s) {
    auto rng = seeded(stream, static_cast<std::uint64_t>(s));
    const Index n = testing::uniform_int(rng, 2, 10);
    const Index m = testing::uniform_int(rng, 1, 3);
    std::vector<double> targets;
    double h = 0.0;
    const auto model = threshold_model(rng, n, m, target, h, targets);
    const auto report = classify(model);
    for (Index k = 0; k < m; ++k) {
      gap = std::max(gap, std::abs(report.rho[static_cast<std::size_t>(k)] - targets[static_cast<std::size_t>(k)]));
    }
    for (int start = 0; start < 20; ++start) {
      Matrix x = testing::random_state(rng, n, m);
      Matrix next(n, m);
      Index t = 0;
      for (; t < 100000 && x.cwiseAbs().maxCoeff() >= 1e-6; ++t) {
        kernels::advance(model, x, next);
        x.swap(next);
      }
      ++runs;
      const double final_norm = x.cwiseAbs().maxCoeff();
      if (final_norm < 1e-6) ++converged;
      worst_final = std::max(worst_final, final_norm);
      slowest = std::max(slowest, t);
    }
  }
  out.converged = converged;
  out.runs = runs;
  out.worst_final = worst_final;
  out.slowest = slowest;
  worst_rho_gap = gap;
  return out;
}

Outcome healthy_subcritical() {
  double gap = 0.0;
  const auto r = healthy_decay(200, 2, [](testing::Rng& rng, Index, double) {
    return 1.0 - std::exp(testing::uniform(rng, std::log(1e-3), std::log(0.5)));
  }, gap);
  return {r.converged == r.runs && gap < 1e-9,
          fmt("%d/%d runs below 1e-6 (slowest %lld steps, worst final %.3g, |rho - target| <= %.2g)", r.converged,
              r.runs, static_cast<long long>(r.slowest), r.worst_final, gap)};
}

Outcome healthy_critical() {
  double gap = 0.0;
  const auto r = healthy_decay(20, 22, [](testing::Rng&, Index, double) { return 1.0; }, gap);
  return {r.converged == r.runs && gap <= 1e-9,
          fmt("%d/%d critical runs below 1e-6 within 1e5 steps (worst final %.3g, |rho - 1| <= %.2g)", r.converged,
              r.runs, r.worst_final, gap)};
}

// --- 3 ----------------------------------------------------------------------

Outcome single_survivor() {
  const int models = 100;
  int decayed = 0;
  double worst_match = 0.0;
  double worst_defect = 0.0;
  int failures = 0;
#pragma omp parallel for schedule(dynamic) reduction(+ : decayed, failures) reduction(max : worst_match, worst_defect)
  for (int s = 0; s < models; ++s) {
    auto rng = seeded(3, static_cast<std::uint64_t>(s));
    const Index n = testing::uniform_int(rng, 2, 10);
    const Index m = testing::uniform_int(rng, 2, 3);
    const Index winner = testing::uniform_int(rng, 0, m - 1);
    std::vector<double> targets;
    double h = 0.0;
    const auto model = threshold_model(
        rng, n, m,
        [winner](testing::Rng& r, Index k, double cap) {
          return k == winner ? 1.0 + testing::uniform(r, 0.2, 0.9) * (cap - 1.0) : testing::uniform(r, 0.5, 0.95);
        },
        h, targets);
    try {
      const auto report = classify(model);
      if (report.classification != Classification::single_survivor || *report.survivor != winner) {
        ++failures;
        continue;
      }
      Matrix x = testing::interior_state(rng, n, m);
      Matrix next(n, m);
      for (Index t = 0; t < 2000000; ++t) {
        kernels::advance(model, x, next);
        const double change = (next - x).cwiseAbs().maxCoeff();
        x.swap(next);
        double losers = 0.0;
        for (Index k = 0; k < m; ++k) {
          if (k != winner) losers = std::max(losers, x.col(k).cwiseAbs().maxCoeff());
        }
        if (losers < 1e-6 && change < 1e-13) break;
      }
      double losers = 0.0;
      for (Index k = 0; k < m; ++k) {
        if (k != winner) losers = std::max(losers, x.col(k).cwiseAbs().maxCoeff());
      }
      if (losers < 1e-6) ++decayed;
      const auto endemic = single_virus_endemic(model, winner);
      worst_match = std::max(worst_match, (x.col(winner) - endemic.x_tilde).cwiseAbs().maxCoeff());
      // Defect evaluated with the plain-loop step, independent of the solver.
      const MultiVirusModel alone(model.h(), {model.layer(winner)});
      const Matrix xt = endemic.x_tilde;
      worst_defect = std::max(worst_defect, (testing::naive_step(alone, xt) - xt).norm());
    } catch (const Error&) {
      ++failures;
    }
  }
  return {decayed == models && failures == 0 && worst_match < 1e-4 && worst_defect < 1e-10,
          fmt("%d/%d losers below 1e-6, winner vs endemic solver %.3g, fixed-point defect %.3g, %d setup failures",
              decayed, models, worst_match, worst_defect, failures)};
}

// --- 4 ----------------------------------------------------------------------

Outcome homogeneous_recovery() {
  const int instances = 500;
  double worst = 0.0;
  double worst_lumped = 0.0;
  int recovered = 0;
  int no_witness = 0;
#pragma omp parallel for schedule(dynamic) reduction(max : worst, worst_lumped) reduction(+ : recovered, no_witness)
  for (int s = 0; s < instances; ++s) {
    auto rng = seeded(4, static_cast<std::uint64_t>(s));
    const Index n = testing::uniform_int(rng, 2, 10);
    const Index m = testing::uniform_int(rng, 1, 3);
    std::vector<double> targets;
    double h = 0.0;
    const auto model = threshold_model(
        rng, n, m, [](testing::Rng& r, Index, double cap) { return testing::uniform(r, 0.7, cap); }, h, targets);
    auto traj = simulate(model, EpidemicState(testing::interior_state(rng, n, m)), 1);
    for (Index k = 0; k < m; ++k) {
      const auto& layer = model.layer(k);
      const auto est = identify_homogeneous(traj, layer.adjacency(), k, h);
      const auto lumped = identify_homogeneous(traj, layer.adjacency(), k, std::nullopt);
      worst_lumped = std::max({worst_lumped, std::abs(lumped.beta - h * est.beta), std::abs(lumped.delta - h * est.delta)});
      if (!est.witness) {
        ++no_witness;
        continue;
      }
      ++recovered;
      worst = std::max({worst, relative_error(est.beta, layer.beta()(0)), relative_error(est.delta, layer.healing()(0))});
    }
  }
  return {worst < 1e-8 && worst_lumped < 1e-10 && recovered > 0,
          fmt("%d virus fits from one transition, max parameter error %.3g, lumped vs h-scaled %.3g, %d without witness",
              recovered, worst, worst_lumped, no_witness)};
}

// --- 5 ----------------------------------------------------------------------

Outcome heterogeneous_recovery() {
  const int instances = 500;
  double worst = 0.0;
  int recovered = 0;
  int flagged = 0;
  int silent = 0;
  int planted = 0;
#pragma omp parallel for schedule(dynamic) reduction(max : worst) reduction(+ : recovered, flagged, silent, planted)
  for (int s = 0; s < instances; ++s) {
    auto rng = seeded(5, static_cast<std::uint64_t>(s));
    const Index n = testing::uniform_int(rng, 2, 8);
    const Index m = testing::uniform_int(rng, 1, 3);
    const double h = testing::uniform(rng, 0.1, 1.0);
    const Matrix a = testing::random_irreducible_adjacency(rng, n, testing::uniform(rng, 0.0, 0.6));
    std::vector<VirusLayer> layers;
    for (Index k = 0; k < m; ++k) {
      Vector beta(n), delta(n);
      for (Index i = 0; i < n; ++i) {
        beta(i) = testing::uniform(rng, 0.05, 1.0) * 0.95 / (static_cast<double>(m) * h * a.row(i).sum());
        delta(i) = testing::uniform(rng, 0.0, 1.0) / h;
      }
      layers.push_back(VirusLayer::factored(beta, a, delta));
    }
    const MultiVirusModel model(h, std::move(layers));
    Matrix x0 = testing::interior_state(rng, n, m);
    // Some instances carry an absent virus: its regression rows vanish at every node.
    const bool plant = testing::uniform(rng) < 0.1;
    const Index absent = testing::uniform_int(rng, 0, m - 1);
    if (plant) x0.col(absent).setZero();
    const auto traj = simulate(model, EpidemicState(x0), 2);
    const std::vector<Matrix> adj{a};
    const auto est = identify_heterogeneous(traj, adj, h);
    for (Index i = 0; i < n; ++i) {
      for (Index k = 0; k < m; ++k) {
        const auto& r = est.at(i, k);
        const bool listed = std::find(est.unidentifiable.begin(), est.unidentifiable.end(),
                                      std::pair<Index, Index>{i, k}) != est.unidentifiable.end();
        if (plant && k == absent) {
          ++planted;
          if (!listed || r.witness) ++silent;
        }
        if (r.witness) {
          ++recovered;
          const double e = std::max(relative_error(r.beta, model.layer(k).beta()(i)),
                                    relative_error(r.delta, model.layer(k).healing()(i)));
          worst = std::max(worst, e);
        } else {
          ++flagged;
          if (!listed || r.identifiable) ++silent;
        }
      }
    }
  }
  return {worst < 1e-8 && silent == 0 && recovered > 0,
          fmt("%d node/virus pairs recovered (max error %.3g), %d flagged unidentifiable (%d planted), %d unflagged",
              recovered, worst, flagged, planted, silent)};
}

// --- 6 ----------------------------------------------------------------------

Outcome rls_batch() {
  double worst = 0.0;
  int systems = 0;
  for (int s = 0; systems < 500; ++s) {
    auto rng = seeded(6, static_cast<std::uint64_t>(s));
    const Index rows = testing::uniform_int(rng, 2, 200);
    RegressionSystem system{Eigen::MatrixX2d(rows, 2), Vector(rows), 1.0};
    const double scale = std::exp(testing::uniform(rng, -6.0, 2.0));
    for (Index r = 0; r < rows; ++r) {
      system.phi(r, 0) = scale * testing::uniform(rng, -1, 1);
      system.phi(r, 1) = testing::uniform(rng, -1, 1);
      system.rhs(r) = testing::uniform(rng, -1, 1);
    }
    const auto batch = solve_least_squares(system);
    if (!batch.full_rank) continue;
    ++systems;
    const auto online = rls_estimate(rls_update(rls_init(), system));
    const Eigen::Vector2d theta(online.beta, online.delta);
    worst = std::max(worst, (theta - batch.theta).norm() / batch.theta.norm());
  }
  return {worst < 1e-8, fmt("max relative difference %.3g over %d full-rank systems", worst, systems)};
}

// --- 7 ----------------------------------------------------------------------

bool small_irreducible(const std::array<int, 16>& digits, int n) {
  // Reachability closure on bitmasks: edge j -> i when entry (i, j) is nonzero.
  std::array<unsigned, 4> reach{};
  for (int i = 0; i < n; ++i) {
    reach[static_cast<std::size_t>(i)] = 1u << i;
    for (int j = 0; j < n; ++j) {
      if (digits[static_cast<std::size_t>(i * n + j)] != 0) reach[static_cast<std::size_t>(i)] |= 1u << j;
    }
  }
  for (int round = 0; round < n; ++round) {
    for (int i = 0; i < n; ++i) {
      unsigned r = reach[static_cast<std::size_t>(i)];
      for (int j = 0; j < n; ++j) {
        if (r & (1u << j)) r |= reach[static_cast<std::size_t>(j)];
      }
      reach[static_cast<std::size_t>(i)] = r;
    }
  }
  const unsigned all = (1u << n) - 1u;
  for (int i = 0; i < n; ++i) {
    if (reach[static_cast<std::size_t>(i)] != all) return false;
  }
  return n > 1 || digits[0] != 0;
}

// True when no simultaneous row/column permutation yields a smaller digit string.
bool canonical(const std::array<int, 16>& digits, int n, const std::vector<std::array<int, 4>>& perms) {
  for (const auto& p : perms) {
    for (int pos = 0; pos < n * n; ++pos) {
      const int i = pos / n;
      const int j = pos % n;
      const int permuted = digits[static_cast<std::size_t>(p[static_cast<std::size_t>(i)] * n + p[static_cast<std::size_t>(j)])];
      const int original = digits[static_cast<std::size_t>(pos)];
      if (permuted < original) return false;
      if (permuted > original) break;
    }
  }
  return true;
}

Outcome spectral_oracle() {
  static constexpr double kLevels[3] = {0.0, 0.5, 1.0};
  double worst = 0.0;
  long long exhaustive = 0;
  for (int n = 1; n <= 4; ++n) {
    std::vector<std::array<int, 4>> perms;
    std::array<int, 4> p{0, 1, 2, 3};
    do {
      perms.push_back(p);
    } while (std::next_permutation(p.begin(), p.begin() + n));
    long long total = 1;
    for (int e = 0; e < n * n; ++e) total *= 3;
    long long count = 0;
    double local_worst = 0.0;
#pragma omp parallel for schedule(dynamic, 4096) reduction(+ : count) reduction(max : local_worst)
    for (long long code = 0; code < total; ++code) {
      std::array<int, 16> digits{};
      long long c = code;
      for (int e = n * n - 1; e >= 0; --e) {
        digits[static_cast<std::size_t>(e)] = static_cast<int>(c % 3);
        c /= 3;
      }
      if (!small_irreducible(digits, n) || !canonical(digits, n, perms)) continue;
      Matrix a(n, n);
      for (int e = 0; e < n * n; ++e) a(e / n, e % n) = kLevels[digits[static_cast<std::size_t>(e)]];
      const double want = testing::perron_root_oracle(a);
      local_worst = std::max(local_worst, std::abs(spectral_radius(a) - want) / std::max(1.0, want));
      ++count;
    }
    exhaustive += count;
    worst = std::max(worst, local_worst);
  }

  double random_worst = 0.0;
#pragma omp parallel for schedule(dynamic) reduction(max : random_worst)
  for (int s = 0; s < 1000; ++s) {
    auto rng = seeded(7, static_cast<std::uint64_t>(s));
    const Index n = testing::uniform_int(rng, 1, 8);
    const Matrix a = testing::random_irreducible_adjacency(rng, n, testing::uniform(rng, 0.0, 0.8), true);
    const double want = testing::perron_root_oracle(a);
    random_worst = std::max(random_worst, std::abs(spectral_radius(a) - want) / std::max(1.0, want));
  }
  return {worst < 1e-8 && random_worst < 1e-8,
          fmt("%lld canonical irreducible {0,0.5,1} matrices with n<=4 (max deviation %.3g), 1000 random n<=8 (%.3g)",
              exhaustive, worst, random_worst)};
}

// --- 8 ----------------------------------------------------------------------

Outcome pipeline_self_consistency() {
  const auto panel = make_synthetic_panel(default_synthetic_config());
  std::map<std::string, std::vector<std::string>> groups;
  for (const auto& [unit, group] : panel.partition) groups[group].push_back(unit);
  groups["all"] = panel.dataset.unit_ids();
  double worst = 0.0;
  bool non_unique = false;
  for (const auto& [label, ids] : groups) {
    const auto r = subset_train_full_validate(panel.dataset, ids, label);
    worst = std::max(worst, r.scaled_error);
    non_unique = non_unique || r.non_unique;
  }
  const auto online = online_validate(panel.dataset, 1);
  return {worst < 1e-8 && !non_unique && online.mode_a.scaled_error < 1e-6,
          fmt("subset fits on %zu subsets: worst scaled error %.3g; online mode A %.3g, mode B %.3g", groups.size(),
              worst, online.mode_a.scaled_error, online.mode_b.scaled_error)};
}

// --- 9 ----------------------------------------------------------------------

Outcome usda_golden(const fs::path& dir) {
  PanelLoadOptions options;
  options.drop = {"02*", "15*"};
  if (const char* drop = std::getenv("MVSIS_USDA_DROP")) {
    options.drop.clear();
    std::string list = drop;
    for (std::size_t pos = 0; pos <= list.size();) {
      const std::size_t comma = std::min(list.find(',', pos), list.size());
      if (comma > pos) options.drop.push_back(list.substr(pos, comma - pos));
      pos = comma + 1;
    }
  }
  const auto base = load_panel(dir / "panel.csv", options);
  const auto panel = base.with_borders(load_borders(dir / "borders.csv"));
  const auto by_prefix = [&](const std::string& prefix) {
    std::vector<std::string> ids;
    for (const auto& id : panel.unit_ids()) {
      if (id.rfind(prefix, 0) == 0) ids.push_back(id);
    }
    return ids;
  };
  struct Case {
    const char* label;
    std::vector<std::string> ids;
    double error;
    std::array<double, 4> params;  // delta1, beta1, delta2, beta2
  };
  const std::vector<Case> cases{{"all", panel.unit_ids(), 0.1244, {0.0107, 0.0139, 0.0551, 0.0852}},
                                {"ID", by_prefix("16"), 0.1348, {-0.0332, 0.0663, 0.0503, 0.0345}},
                                {"KY", by_prefix("21"), 0.1230, {0.0044, 0.1352, 0.0702, 0.1272}}};
  bool pass = true;
  std::string detail;
  for (const auto& c : cases) {
    const auto r = subset_train_full_validate(panel, c.ids, c.label);
    const std::array<double, 4> got{r.parameters_used[0].delta, r.parameters_used[0].beta, r.parameters_used[1].delta,
                                    r.parameters_used[1].beta};
    double param_gap = 0.0;
    for (std::size_t p = 0; p < 4; ++p) param_gap = std::max(param_gap, std::abs(got[p] - c.params[p]));
    pass = pass && std::abs(r.scaled_error - c.error) <= 0.005 && param_gap <= 0.002;
    detail += fmt("%s error %.4f (paper %.4f) params off by %.4f; ", c.label, r.scaled_error, c.error, param_gap);
  }
  const auto online = online_validate(panel, 1);
  pass = pass && std::abs(online.mode_a.scaled_error - 0.0855) <= 0.005 &&
         std::abs(online.mode_b.scaled_error - 0.1140) <= 0.005;
  detail += fmt("online %.4f / %.4f (paper 0.0855 / 0.1140)", online.mode_a.scaled_error, online.mode_b.scaled_error);
  return {pass, detail};
}

Outcome paper_numbers() {
  if (const char* dir = std::getenv("MVSIS_USDA_DIR"); dir && *dir) return usda_golden(dir);

  // Without the enrollment data only the noisy-recovery values are checked, for sign and magnitude.
  const auto r = hetero_vs_homo_experiment();
  const std::array<double, 4> reference{0.0415, 0.1379, 0.0772, 0.0944};
  const std::array<double, 4> got{r.estimates[0].delta, r.estimates[0].beta, r.estimates[1].delta,
                                  r.estimates[1].beta};
  bool pass = true;
  for (std::size_t p = 0; p < 4; ++p) {
    pass = pass && got[p] > 0.0 && std::abs(std::log10(got[p] / reference[p])) < 1.0;
  }
  return {pass, fmt("SKIP enrollment golden test (MVSIS_USDA_DIR unset); seed 7 noisy fit %.4f %.4f %.4f %.4f vs "
                    "%.4f %.4f %.4f %.4f: same sign and order of magnitude",
                    got[0], got[1], got[2], got[3], reference[0], reference[1], reference[2], reference[3])};
}

struct Criterion {
  const char* id;
  const char* name;
  Outcome (*run)();
};

const Criterion kCriteria[] = {
    {"1", "box invariance", box_invariance},
    {"2", "healthy-state convergence (subcritical)", healthy_subcritical},
    {"2c", "healthy-state convergence (critical)", healthy_critical},
    {"3", "single survivor", single_survivor},
    {"4", "exact homogeneous recovery", homogeneous_recovery},
    {"5", "exact heterogeneous recovery", heterogeneous_recovery},
    {"6", "RLS/batch equivalence", rls_batch},
    {"7", "spectral radius oracle", spectral_oracle},
    {"8", "pipeline self-consistency", pipeline_self_consistency},
    {"9", "paper numbers", paper_numbers},
};

}  // namespace

int main(int argc, char** argv) {
  std::string only;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      only = argv[++i];
    } else {
      std::fprintf(stderr, "usage: %s [--criterion ID]\n", argv[0]);
      return 2;
    }
  }
  int failed = 0;
  int ran = 0;
  for (const auto& c : kCriteria) {
    if (!only.empty() && only != c.id) continue;
    ++ran;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %-2s %s  %s: %s [%.1f s]\n", c.id, o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(),
                seconds);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  if (ran == 0) {
    std::fprintf(stderr, "unknown criterion '%s'\n", only.c_str());
    return 2;
  }
  return failed == 0 ? 0 : 1;
}
