#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "mvsis/model.hpp"
#include "mvsis/types.hpp"

namespace mvsis {

/// Spectral radius of a nonnegative square matrix.
///
/// The matrix is split into strongly connected components (its Frobenius
/// normal form); the radius is the largest Perron root over the irreducible
/// diagonal blocks. Each block is solved by power iteration on the shifted
/// block M + cI, with c its mean row sum, which is primitive and has the same
/// Perron vector. Iteration stops once the Collatz-Wielandt bounds
/// min_i (Mv)_i / v_i <= rho <= max_i (Mv)_i / v_i agree to relative `tol`.
/// Throws ErrorKind::convergence naming the cap if `max_iterations` is hit.
double spectral_radius(const Matrix& m, double tol = 1e-12, std::size_t max_iterations = 1'000'000);

/// True iff the directed graph with an edge j -> i whenever a_ij > 0 is strongly connected.
bool is_irreducible(const Matrix& a);

/// Strongly connected components of the same graph, each listed in ascending node order.
std::vector<std::vector<Index>> strongly_connected_components(const Matrix& a);

enum class Regime { subcritical, critical, supercritical };
enum class Classification { unique_healthy, single_survivor, multi_endemic_candidates };

std::string_view to_string(Regime regime);
std::string_view to_string(Classification classification);

/// rho < 1 - tol: subcritical, |rho - 1| <= tol: critical, rho > 1 + tol: supercritical.
Regime regime_of(double rho, double tol);

struct StabilityReport {
  std::vector<double> rho;       ///< rho(I - h D^k + h B^k) per virus
  std::vector<Regime> regimes;
  Classification classification = Classification::unique_healthy;
  std::optional<Index> survivor;  ///< set for single_survivor
};

/// Pure function of the regimes: no supercritical virus (critical counts as
/// stable) -> unique healthy state; exactly one -> that virus survives alone;
/// two or more -> at least m + 1 equilibria exist, stability unclaimed.
StabilityReport classify_regimes(std::vector<double> rho, std::vector<Regime> regimes);

/// I - h D^k + h B^k.
Matrix threshold_matrix(const MultiVirusModel& model, Index k);

/// Requires every infection matrix to be irreducible and the remaining
/// assumptions to hold; throws ErrorKind::assumption_violation otherwise.
StabilityReport classify(const MultiVirusModel& model, double tol = 1e-9);

/// Homogeneous threshold: compares rho(A) with delta / beta, using a relative
/// band of `tol`. Agrees with classify() on the equivalent homogeneous model.
Regime homogeneous_threshold(const Matrix& adjacency, double beta, double delta, double tol = 1e-9);

struct EndemicEstimate {
  Index virus = 0;
  Vector x_tilde;
  double residual = 0.0;  ///< ||x_tilde - step(x_tilde)||_2
  std::size_t iterations = 0;
};

/// Single-virus endemic equilibrium of virus k (all other viruses absent),
/// found by iterating the dynamics from 0.5 * 1 until the fixed-point defect
/// drops below `tol`. Refuses non-supercritical viruses.
EndemicEstimate single_virus_endemic(const MultiVirusModel& model, Index k, double tol = 1e-11,
                                     std::size_t max_iterations = 10'000'000);

}  // namespace mvsis
