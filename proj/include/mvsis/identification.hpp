#pragma once

// Least-squares recovery of spreading parameters from state trajectories.
//
// For a homogeneous virus k the dynamics rearrange into the linear system
//   x^k[t+1] - x^k[t] = h [ g(x^k[t]) , -x^k[t] ] [beta; delta],
//   g(x^k[t]) = (I - X^1[t] - ... - X^m[t]) A^k x^k[t],
// stacked over t = 0..T-1. When h is unknown only the lumped pair
// (h beta, h delta) is recoverable. Heterogeneous nodes use the same
// construction restricted to row i, which needs at least two transitions.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "mvsis/model.hpp"
#include "mvsis/types.hpp"

namespace mvsis {

struct RegressionSystem {
  Eigen::MatrixX2d phi;
  Vector rhs;
  /// h when known, 1 for lumped estimation.
  double scale = 1.0;
  Index rows() const { return phi.rows(); }
};

/// Rows (t, i) stacked by time then node. Requires at least two states.
RegressionSystem build_phi_homogeneous(const Trajectory& traj, const Matrix& adjacency, Index k);
/// Rows t = 0..T-1 for node i alone.
RegressionSystem build_phi_node(const Trajectory& traj, const Matrix& adjacency, Index k, Index i);

/// Indices certifying column rank two. For homogeneous fits (i, j, t1, t2)
/// satisfy x_i[t1] g_j[t2] != x_j[t2] g_i[t1]; for a single node i == j.
struct Witness {
  Index i = 0;
  Index j = 0;
  Index t1 = 0;
  Index t2 = 0;
};

struct LeastSquaresSolution {
  Eigen::Vector2d theta = Eigen::Vector2d::Zero();
  double residual_norm = 0.0;
  double sigma_max = 0.0;
  double sigma_min = 0.0;
  bool full_rank = false;
};

/// Numerical rank rule: sigma_min <= max(rows, 2) * eps * sigma_max means rank deficient.
double rank_tolerance(Index rows, double sigma_max);

/// Householder QR of phi, then an SVD of the 2x2 triangular factor. Returns
/// the minimum-norm solution when phi is rank deficient.
LeastSquaresSolution solve_least_squares(const RegressionSystem& system);

struct EstimationResult {
  double beta = 0.0;
  double delta = 0.0;
  /// Sampling parameter the estimate is expressed for; 1 for lumped estimates
  /// (then beta and delta are h*beta and h*delta).
  double h = 1.0;
  bool lumped = false;
  double residual_norm = 0.0;
  bool identifiable = false;
  std::optional<Witness> witness;
  double smallest_singular_value = 0.0;
  double largest_singular_value = 0.0;
  Index rows = 0;
  /// A recovered rate is negative. The values are kept as computed.
  bool violates_model = false;

  double condition_number() const;
};

std::optional<Witness> identifiability_witness(const Trajectory& traj, const Matrix& adjacency, Index k);

/// Homogeneous recovery for virus k. With `h` unset the result is lumped.
EstimationResult identify_homogeneous(const Trajectory& traj, const Matrix& adjacency, Index k,
                                      std::optional<double> h);

/// Per-node recovery. Needs at least two transitions (three states).
EstimationResult identify_heterogeneous_node(const Trajectory& traj, const Matrix& adjacency, Index k,
                                             Index i, std::optional<double> h);

struct HeterogeneousEstimate {
  Matrix beta;   ///< n x m
  Matrix delta;  ///< n x m
  /// Row-major over (node, virus): results[i * m + k].
  std::vector<EstimationResult> results;
  /// (node, virus) pairs whose parameters are not uniquely determined.
  std::vector<std::pair<Index, Index>> unidentifiable;

  const EstimationResult& at(Index i, Index k) const {
    return results[static_cast<std::size_t>(i * beta.cols() + k)];
  }
};

/// Every (node, virus) pair; adjacency[k] is A^k (a single matrix is shared by all viruses).
HeterogeneousEstimate identify_heterogeneous(const Trajectory& traj, std::span<const Matrix> adjacency,
                                             std::optional<double> h);

/// One step of the dynamics with homogeneous estimated parameters, one
/// estimate per virus, then clamped to D. adjacency as above.
EpidemicState one_step_predict(std::span<const EstimationResult> estimates, const EpidemicState& x,
                               std::span<const Matrix> adjacency);

// --- recursive least squares ------------------------------------------------

/// Information-form recursive least squares for the two-parameter regression.
/// `information` accumulates lambda * J + phi phi^T and `moment` lambda * z + phi y,
/// so with forgetting 1 the estimate J^+ z is exactly the batch solution.
struct RlsState {
  Eigen::Vector2d estimate = Eigen::Vector2d::Zero();
  Eigen::Matrix2d information = Eigen::Matrix2d::Zero();
  Eigen::Vector2d moment = Eigen::Vector2d::Zero();
  double target_energy = 0.0;
  std::size_t rows_seen = 0;
  double forgetting = 1.0;
  bool full_rank = false;
};

/// forgetting in (0, 1]. `prior` seeds the information matrix with prior * I
/// (0 keeps exact batch equivalence; early estimates are then minimum-norm).
RlsState rls_init(double forgetting = 1.0, double prior = 0.0);
RlsState rls_update(RlsState state, const Eigen::Vector2d& row, double target);
RlsState rls_update(RlsState state, const RegressionSystem& system);
/// Estimate in the scale of `h` (lumped when unset). Before rank two is reached
/// the minimum-norm value is returned with identifiable = false.
EstimationResult rls_estimate(const RlsState& state, std::optional<double> h = std::nullopt);

}  // namespace mvsis
