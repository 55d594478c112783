#include "mvsis/kernels.hpp"

#include <algorithm>
#include <vector>

#include <omp.h>

namespace mvsis::kernels {

namespace {

// Column copies of x so the inner j-loop runs over contiguous memory.
std::vector<Vector> split_columns(const Matrix& x) {
  std::vector<Vector> cols(static_cast<std::size_t>(x.cols()));
  for (Index k = 0; k < x.cols(); ++k) cols[static_cast<std::size_t>(k)] = x.col(k);
  return cols;
}

inline double dot_row(const Matrix& a, Index i, const Vector& v) {
  const double* row = a.data() + i * a.cols();
  const double* vec = v.data();
  double acc = 0.0;
  for (Index j = 0; j < a.cols(); ++j) acc += row[j] * vec[j];
  return acc;
}

// Updates row i of `next` and returns its pre-clamp excursion outside D.
inline double advance_row(const MultiVirusModel& model, const Matrix& x, const std::vector<Vector>& cols,
                          Index i, Matrix& next) {
  const Index m = x.cols();
  const double h = model.h();
  double occupied = 0.0;
  for (Index k = 0; k < m; ++k) occupied += x(i, k);
  const double susceptible = 1.0 - occupied;

  double excursion = 0.0;
  double sum = 0.0;
  for (Index k = 0; k < m; ++k) {
    const auto& layer = model.layer(k);
    const double pressure = dot_row(layer.infection(), i, cols[static_cast<std::size_t>(k)]);
    const double xik = x(i, k);
    const double v = xik + h * (susceptible * pressure - layer.healing()(i) * xik);
    excursion = std::max({excursion, -v, v - 1.0});
    sum += v;
    next(i, k) = v;
  }
  excursion = std::max(excursion, sum - 1.0);

  if (excursion > 0.0) {
    double clamped_sum = 0.0;
    for (Index k = 0; k < m; ++k) {
      double& v = next(i, k);
      v = std::clamp(v, 0.0, 1.0);
      clamped_sum += v;
    }
    if (clamped_sum > 1.0) {
      for (Index k = 0; k < m; ++k) next(i, k) /= clamped_sum;
    }
  }
  return excursion;
}

inline void phi_row(std::span<const EpidemicState> states, const Matrix& adjacency, Index k,
                    const std::vector<Vector>& columns, Index t, Index i, Eigen::Ref<Eigen::MatrixX2d>& phi,
                    Eigen::Ref<Vector>& rhs) {
  const Index n = adjacency.rows();
  const auto& now = states[static_cast<std::size_t>(t)].values();
  const auto& later = states[static_cast<std::size_t>(t + 1)].values();
  double occupied = 0.0;
  for (Index l = 0; l < now.cols(); ++l) occupied += now(i, l);
  const Index r = t * n + i;
  phi(r, 0) = (1.0 - occupied) * dot_row(adjacency, i, columns[static_cast<std::size_t>(t)]);
  phi(r, 1) = -now(i, k);
  rhs(r) = later(i, k) - now(i, k);
}

std::vector<Vector> virus_columns(std::span<const EpidemicState> states, Index k, Index transitions) {
  std::vector<Vector> columns(static_cast<std::size_t>(transitions));
  for (Index t = 0; t < transitions; ++t) {
    columns[static_cast<std::size_t>(t)] = states[static_cast<std::size_t>(t)].values().col(k);
  }
  return columns;
}

}  // namespace

double advance_reference(const MultiVirusModel& model, const Matrix& x, Matrix& next) {
  next.resize(x.rows(), x.cols());
  const auto cols = split_columns(x);
  double excursion = 0.0;
  for (Index i = 0; i < x.rows(); ++i) excursion = std::max(excursion, advance_row(model, x, cols, i, next));
  return excursion;
}

double advance_parallel(const MultiVirusModel& model, const Matrix& x, Matrix& next) {
  next.resize(x.rows(), x.cols());
  const auto cols = split_columns(x);
  double excursion = 0.0;
  const Index n = x.rows();
#pragma omp parallel for schedule(static) reduction(max : excursion)
  for (Index i = 0; i < n; ++i) excursion = std::max(excursion, advance_row(model, x, cols, i, next));
  return excursion;
}

double advance(const MultiVirusModel& model, const Matrix& x, Matrix& next) {
  return x.rows() >= kParallelThreshold ? advance_parallel(model, x, next) : advance_reference(model, x, next);
}

void matvec_reference(const Matrix& a, const Vector& x, Vector& y) {
  y.resize(a.rows());
  for (Index i = 0; i < a.rows(); ++i) y(i) = dot_row(a, i, x);
}

void matvec_parallel(const Matrix& a, const Vector& x, Vector& y) {
  y.resize(a.rows());
  const Index n = a.rows();
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) y(i) = dot_row(a, i, x);
}

void matvec(const Matrix& a, const Vector& x, Vector& y) {
  if (a.rows() >= kParallelThreshold) {
    matvec_parallel(a, x, y);
  } else {
    matvec_reference(a, x, y);
  }
}

void phi_rows_reference(std::span<const EpidemicState> states, const Matrix& adjacency, Index k,
                        Eigen::Ref<Eigen::MatrixX2d> phi, Eigen::Ref<Vector> rhs) {
  const Index transitions = static_cast<Index>(states.size()) - 1;
  const auto columns = virus_columns(states, k, transitions);
  for (Index t = 0; t < transitions; ++t) {
    for (Index i = 0; i < adjacency.rows(); ++i) phi_row(states, adjacency, k, columns, t, i, phi, rhs);
  }
}

void phi_rows_parallel(std::span<const EpidemicState> states, const Matrix& adjacency, Index k,
                       Eigen::Ref<Eigen::MatrixX2d> phi, Eigen::Ref<Vector> rhs) {
  const Index transitions = static_cast<Index>(states.size()) - 1;
  const Index n = adjacency.rows();
  const auto columns = virus_columns(states, k, transitions);
  const Index rows = transitions * n;
#pragma omp parallel for schedule(static)
  for (Index r = 0; r < rows; ++r) phi_row(states, adjacency, k, columns, r / n, r % n, phi, rhs);
}

void phi_rows(std::span<const EpidemicState> states, const Matrix& adjacency, Index k,
              Eigen::Ref<Eigen::MatrixX2d> phi, Eigen::Ref<Vector> rhs) {
  if (adjacency.rows() >= kParallelThreshold) {
    phi_rows_parallel(states, adjacency, k, phi, rhs);
  } else {
    phi_rows_reference(states, adjacency, k, phi, rhs);
  }
}

}  // namespace mvsis::kernels
