#include "mvsis/identification.hpp"

#include <cmath>
#include <exception>
#include <limits>

#include <Eigen/SVD>

#include "mvsis/error.hpp"
#include "mvsis/kernels.hpp"

namespace mvsis {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

[[noreturn]] void fail(const std::string& op, ErrorKind kind, const std::string& message) {
  throw Error("identification." + op, kind, message);
}

void check_inputs(const Trajectory& traj, const Matrix& adjacency, Index k, const char* op) {
  if (adjacency.rows() != adjacency.cols() || adjacency.rows() != traj.nodes()) {
    fail(op, ErrorKind::dimension_mismatch, "adjacency must be n x n with n matching the trajectory");
  }
  if (k < 0 || k >= traj.viruses()) fail(op, ErrorKind::invalid_argument, "virus index out of range");
}

double checked_scale(std::optional<double> h, const char* op) {
  if (!h) return 1.0;
  if (!(*h > 0.0) || !std::isfinite(*h)) fail(op, ErrorKind::invalid_argument, "h must be positive and finite");
  return *h;
}

// |det| of the 2x2 minor built from rows r1 and r2 of phi.
inline double minor(const Eigen::MatrixX2d& phi, Index r1, Index r2) {
  return std::abs(phi(r1, 0) * phi(r2, 1) - phi(r1, 1) * phi(r2, 0));
}

// Threshold a 2x2 minor must exceed for its rows to certify rank two. Since the
// squared minors sum to (sigma_max * sigma_min)^2 over all row pairs, a matrix
// with sigma_min above the rank tolerance always has a minor above this value.
double witness_threshold(const LeastSquaresSolution& sol, Index rows) {
  const double pairs = 0.5 * static_cast<double>(rows) * static_cast<double>(rows - 1);
  return sol.sigma_max * rank_tolerance(rows, sol.sigma_max) / std::sqrt(std::max(pairs, 1.0));
}

// Lexicographic search over (t1, t2, i, j) for rows laid out as t * n + i.
std::optional<Witness> find_witness(const Eigen::MatrixX2d& phi, Index n, const LeastSquaresSolution& sol,
                                    bool single_node, Index node) {
  if (!sol.full_rank) return std::nullopt;
  const Index rows = phi.rows();
  const Index transitions = single_node ? rows : rows / n;
  const Index width = single_node ? 1 : n;
  const double threshold = witness_threshold(sol, rows);

  Witness best{};
  double best_value = -1.0;
  for (Index t1 = 0; t1 < transitions; ++t1) {
    for (Index t2 = 0; t2 < transitions; ++t2) {
      for (Index i = 0; i < width; ++i) {
        for (Index j = 0; j < width; ++j) {
          const double value = minor(phi, t1 * width + i, t2 * width + j);
          const Witness w = single_node ? Witness{node, node, t1, t2} : Witness{i, j, t1, t2};
          if (value > threshold) return w;
          if (value > best_value) {
            best_value = value;
            best = w;
          }
        }
      }
    }
  }
  // Only reachable through rounding at the boundary: fall back to the largest minor.
  return best;
}

EstimationResult make_result(const LeastSquaresSolution& sol, double scale, bool lumped, Index rows) {
  EstimationResult result;
  result.beta = sol.theta(0) / scale;
  result.delta = sol.theta(1) / scale;
  result.h = scale;
  result.lumped = lumped;
  result.residual_norm = sol.residual_norm;
  result.identifiable = sol.full_rank;
  result.smallest_singular_value = sol.sigma_min;
  result.largest_singular_value = sol.sigma_max;
  result.rows = rows;
  result.violates_model = result.beta < 0.0 || result.delta < 0.0;
  return result;
}

}  // namespace

double EstimationResult::condition_number() const {
  if (smallest_singular_value <= 0.0) return std::numeric_limits<double>::infinity();
  return largest_singular_value / smallest_singular_value;
}

double rank_tolerance(Index rows, double sigma_max) {
  return static_cast<double>(std::max<Index>(rows, 2)) * kEps * sigma_max;
}

RegressionSystem build_phi_homogeneous(const Trajectory& traj, const Matrix& adjacency, Index k) {
  check_inputs(traj, adjacency, k, "build_phi_homogeneous");
  if (traj.size() < 2) fail("build_phi_homogeneous", ErrorKind::precondition, "need at least two states (T > 0)");
  const Index rows = traj.transitions() * traj.nodes();
  RegressionSystem system{Eigen::MatrixX2d(rows, 2), Vector(rows), traj.h.value_or(1.0)};
  kernels::phi_rows(traj.states(), adjacency, k, system.phi, system.rhs);
  return system;
}

RegressionSystem build_phi_node(const Trajectory& traj, const Matrix& adjacency, Index k, Index i) {
  check_inputs(traj, adjacency, k, "build_phi_node");
  if (i < 0 || i >= traj.nodes()) fail("build_phi_node", ErrorKind::invalid_argument, "node index out of range");
  if (traj.size() < 2) fail("build_phi_node", ErrorKind::precondition, "need at least two states");
  const Index rows = traj.transitions();
  RegressionSystem system{Eigen::MatrixX2d(rows, 2), Vector(rows), traj.h.value_or(1.0)};
  for (Index t = 0; t < rows; ++t) {
    const auto& now = traj[static_cast<std::size_t>(t)].values();
    const auto& later = traj[static_cast<std::size_t>(t + 1)].values();
    double pressure = 0.0;
    for (Index j = 0; j < adjacency.cols(); ++j) pressure += adjacency(i, j) * now(j, k);
    system.phi(t, 0) = (1.0 - now.row(i).sum()) * pressure;
    system.phi(t, 1) = -now(i, k);
    system.rhs(t) = later(i, k) - now(i, k);
  }
  return system;
}

LeastSquaresSolution solve_least_squares(const RegressionSystem& system) {
  const Index rows = system.phi.rows();
  if (rows == 0 || system.rhs.size() != rows) {
    fail("solve_least_squares", ErrorKind::dimension_mismatch, "regression system is empty or inconsistent");
  }
  if (!system.phi.allFinite() || !system.rhs.allFinite()) {
    fail("solve_least_squares", ErrorKind::invalid_argument, "regression system has non-finite entries");
  }

  const Eigen::HouseholderQR<Eigen::MatrixX2d> qr(system.phi);
  const Index r = std::min<Index>(rows, 2);
  Eigen::MatrixXd upper = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
  Vector qtb = system.rhs;
  qtb.applyOnTheLeft(qr.householderQ().adjoint());

  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(upper, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector& s = svd.singularValues();

  LeastSquaresSolution sol;
  sol.sigma_max = s.size() > 0 ? s(0) : 0.0;
  sol.sigma_min = s.size() > 1 ? s(1) : 0.0;
  const double tol = rank_tolerance(rows, sol.sigma_max);
  sol.full_rank = sol.sigma_max > 0.0 && sol.sigma_min > tol;

  const Vector projected = svd.matrixU().transpose() * qtb.head(r);
  Eigen::Vector2d scaled = Eigen::Vector2d::Zero();
  for (Index c = 0; c < s.size(); ++c) {
    if (s(c) > tol && s(c) > 0.0) scaled(c) = projected(c) / s(c);
  }
  sol.theta = svd.matrixV() * scaled;
  sol.residual_norm = (system.phi * sol.theta - system.rhs).norm();
  return sol;
}

std::optional<Witness> identifiability_witness(const Trajectory& traj, const Matrix& adjacency, Index k) {
  const RegressionSystem system = build_phi_homogeneous(traj, adjacency, k);
  return find_witness(system.phi, traj.nodes(), solve_least_squares(system), false, 0);
}

EstimationResult identify_homogeneous(const Trajectory& traj, const Matrix& adjacency, Index k,
                                      std::optional<double> h) {
  const double scale = checked_scale(h, "identify_homogeneous");
  RegressionSystem system = build_phi_homogeneous(traj, adjacency, k);
  system.scale = scale;
  const LeastSquaresSolution sol = solve_least_squares(system);
  EstimationResult result = make_result(sol, scale, !h.has_value(), system.rows());
  result.witness = find_witness(system.phi, traj.nodes(), sol, false, 0);
  return result;
}

EstimationResult identify_heterogeneous_node(const Trajectory& traj, const Matrix& adjacency, Index k, Index i,
                                             std::optional<double> h) {
  const double scale = checked_scale(h, "identify_heterogeneous_node");
  if (traj.size() < 3) {
    fail("identify_heterogeneous_node", ErrorKind::precondition,
         "per-node identification needs T > 1 transitions (at least three states)");
  }
  RegressionSystem system = build_phi_node(traj, adjacency, k, i);
  system.scale = scale;
  const LeastSquaresSolution sol = solve_least_squares(system);
  EstimationResult result = make_result(sol, scale, !h.has_value(), system.rows());
  result.witness = find_witness(system.phi, 1, sol, true, i);
  return result;
}

HeterogeneousEstimate identify_heterogeneous(const Trajectory& traj, std::span<const Matrix> adjacency,
                                             std::optional<double> h) {
  const Index n = traj.nodes();
  const Index m = traj.viruses();
  if (adjacency.size() != 1 && static_cast<Index>(adjacency.size()) != m) {
    fail("identify_heterogeneous", ErrorKind::dimension_mismatch, "need one adjacency matrix or one per virus");
  }
  checked_scale(h, "identify_heterogeneous");
  if (traj.size() < 3) {
    fail("identify_heterogeneous", ErrorKind::precondition,
         "per-node identification needs T > 1 transitions (at least three states)");
  }
  for (Index k = 0; k < m; ++k) {
    check_inputs(traj, adjacency[adjacency.size() == 1 ? 0 : static_cast<std::size_t>(k)], k,
                 "identify_heterogeneous");
  }

  HeterogeneousEstimate estimate{Matrix(n, m), Matrix(n, m),
                                 std::vector<EstimationResult>(static_cast<std::size_t>(n * m)), {}};
  const Index pairs = n * m;
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
  for (Index p = 0; p < pairs; ++p) {
    const Index i = p / m;
    const Index k = p % m;
    const Matrix& a = adjacency[adjacency.size() == 1 ? 0 : static_cast<std::size_t>(k)];
    try {
      estimate.results[static_cast<std::size_t>(p)] = identify_heterogeneous_node(traj, a, k, i, h);
    } catch (...) {
#pragma omp critical(mvsis_identify_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  for (Index i = 0; i < n; ++i) {
    for (Index k = 0; k < m; ++k) {
      const auto& r = estimate.at(i, k);
      estimate.beta(i, k) = r.beta;
      estimate.delta(i, k) = r.delta;
      if (!r.identifiable) estimate.unidentifiable.emplace_back(i, k);
    }
  }
  return estimate;
}

EpidemicState one_step_predict(std::span<const EstimationResult> estimates, const EpidemicState& x,
                               std::span<const Matrix> adjacency) {
  const Index m = x.viruses();
  if (static_cast<Index>(estimates.size()) != m) {
    fail("one_step_predict", ErrorKind::dimension_mismatch, "need one estimate per virus");
  }
  if (adjacency.size() != 1 && static_cast<Index>(adjacency.size()) != m) {
    fail("one_step_predict", ErrorKind::dimension_mismatch, "need one adjacency matrix or one per virus");
  }
  const double h = estimates.front().h;
  std::vector<VirusLayer> layers;
  for (Index k = 0; k < m; ++k) {
    const auto& est = estimates[static_cast<std::size_t>(k)];
    if (!std::isfinite(est.beta) || !std::isfinite(est.delta)) {
      fail("one_step_predict", ErrorKind::invalid_argument, "estimate must be finite");
    }
    if (est.h != h) fail("one_step_predict", ErrorKind::invalid_argument, "estimates must share one h");
    const Matrix& a = adjacency[adjacency.size() == 1 ? 0 : static_cast<std::size_t>(k)];
    if (a.rows() != x.nodes() || a.cols() != x.nodes()) {
      fail("one_step_predict", ErrorKind::dimension_mismatch, "adjacency does not match the state");
    }
    layers.push_back(VirusLayer::homogeneous(est.beta, a, est.delta));
  }
  const MultiVirusModel model(h, std::move(layers));
  Matrix current = x.values();
  clamp_to_domain(current);
  Matrix next;
  kernels::advance(model, current, next);
  return EpidemicState(std::move(next));
}

// --- recursive least squares ------------------------------------------------

namespace {

struct InformationSolve {
  Eigen::Vector2d theta;
  double lambda_min;
  double lambda_max;
  bool full_rank;
};

InformationSolve solve_information(const Eigen::Matrix2d& information, const Eigen::Vector2d& moment,
                                   std::size_t rows) {
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(information);
  const Eigen::Vector2d lambda = eig.eigenvalues();  // ascending
  InformationSolve out{Eigen::Vector2d::Zero(), std::max(lambda(0), 0.0), std::max(lambda(1), 0.0), false};
  // The information matrix squares the singular values, so its rank rule is on eps itself.
  const double tol = static_cast<double>(std::max<std::size_t>(rows, 2)) * kEps * out.lambda_max;
  out.full_rank = out.lambda_max > 0.0 && out.lambda_min > tol;
  if (out.full_rank) {
    out.theta = information.ldlt().solve(moment);
  } else if (out.lambda_max > 0.0) {
    const Eigen::Vector2d v = eig.eigenvectors().col(1);
    out.theta = v * (v.dot(moment) / out.lambda_max);
  }
  return out;
}

}  // namespace

RlsState rls_init(double forgetting, double prior) {
  if (!(forgetting > 0.0 && forgetting <= 1.0)) {
    fail("rls_init", ErrorKind::invalid_argument, "forgetting factor must lie in (0, 1]");
  }
  if (!(prior >= 0.0)) fail("rls_init", ErrorKind::invalid_argument, "prior must be non-negative");
  RlsState state;
  state.forgetting = forgetting;
  state.information = prior * Eigen::Matrix2d::Identity();
  state.full_rank = prior > 0.0;
  return state;
}

RlsState rls_update(RlsState state, const Eigen::Vector2d& row, double target) {
  if (!row.allFinite() || !std::isfinite(target)) fail("rls_update", ErrorKind::invalid_argument, "row must be finite");
  const double lambda = state.forgetting;
  state.information = lambda * state.information + row * row.transpose();
  state.moment = lambda * state.moment + row * target;
  state.target_energy = lambda * state.target_energy + target * target;
  ++state.rows_seen;
  const InformationSolve solved = solve_information(state.information, state.moment, state.rows_seen);
  state.estimate = solved.theta;
  state.full_rank = solved.full_rank;
  return state;
}

RlsState rls_update(RlsState state, const RegressionSystem& system) {
  for (Index r = 0; r < system.rows(); ++r) state = rls_update(std::move(state), system.phi.row(r).transpose(), system.rhs(r));
  return state;
}

EstimationResult rls_estimate(const RlsState& state, std::optional<double> h) {
  const double scale = checked_scale(h, "rls_estimate");
  const InformationSolve solved = solve_information(state.information, state.moment, state.rows_seen);
  EstimationResult result;
  result.beta = state.estimate(0) / scale;
  result.delta = state.estimate(1) / scale;
  result.h = scale;
  result.lumped = !h.has_value();
  const double energy = state.target_energy - 2.0 * state.estimate.dot(state.moment) +
                        state.estimate.dot(state.information * state.estimate);
  result.residual_norm = std::sqrt(std::max(energy, 0.0));
  result.identifiable = solved.full_rank;
  result.smallest_singular_value = std::sqrt(solved.lambda_min);
  result.largest_singular_value = std::sqrt(solved.lambda_max);
  result.rows = static_cast<Index>(state.rows_seen);
  result.violates_model = result.beta < 0.0 || result.delta < 0.0;
  return result;
}

}  // namespace mvsis
