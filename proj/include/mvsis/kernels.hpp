#pragma once

// Data-parallel inner loops. Every kernel has a serial `_reference` version and
// an OpenMP `_parallel` version. Both evaluate each output row with the same
// sequence of floating-point operations, so their results are bit-identical;
// the plain entry points pick one by problem size.

#include <span>

#include "mvsis/model.hpp"
#include "mvsis/types.hpp"

namespace mvsis::kernels {

/// Rows below this count are not worth a parallel region.
inline constexpr Index kParallelThreshold = 128;

/// Applies one step of the dynamics to `x` (n x m) and writes the clamped
/// result to `next`. Returns the largest pre-clamp excursion outside D.
double advance_reference(const MultiVirusModel& model, const Matrix& x, Matrix& next);
double advance_parallel(const MultiVirusModel& model, const Matrix& x, Matrix& next);
double advance(const MultiVirusModel& model, const Matrix& x, Matrix& next);

/// y = a * x.
void matvec_reference(const Matrix& a, const Vector& x, Vector& y);
void matvec_parallel(const Matrix& a, const Vector& x, Vector& y);
void matvec(const Matrix& a, const Vector& x, Vector& y);

/// Homogeneous regression rows for virus k, stacked t = 0..T-1 then node:
///   phi(t*n + i, :) = [ (1 - sum_l x_i^l[t]) (A x^k[t])_i , -x_i^k[t] ]
///   rhs(t*n + i)    = x_i^k[t+1] - x_i^k[t]
void phi_rows_reference(std::span<const EpidemicState> states, const Matrix& adjacency, Index k,
                        Eigen::Ref<Eigen::MatrixX2d> phi, Eigen::Ref<Vector> rhs);
void phi_rows_parallel(std::span<const EpidemicState> states, const Matrix& adjacency, Index k,
                       Eigen::Ref<Eigen::MatrixX2d> phi, Eigen::Ref<Vector> rhs);
void phi_rows(std::span<const EpidemicState> states, const Matrix& adjacency, Index k,
              Eigen::Ref<Eigen::MatrixX2d> phi, Eigen::Ref<Vector> rhs);

}  // namespace mvsis::kernels
