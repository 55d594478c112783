#pragma once

// Random instance generators and independent reference computations shared by
// the unit tests and the acceptance runner.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Eigenvalues>

#include "mvsis/model.hpp"
#include "mvsis/spectral.hpp"

namespace mvsis::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo = 0.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Index uniform_int(Rng& rng, Index lo, Index hi) {
  return std::uniform_int_distribution<Index>(lo, hi)(rng);
}

/// Random point of D; some rows sit exactly on the boundary sum_k x = 1.
inline Matrix random_state(Rng& rng, Index n, Index m) {
  Matrix x(n, m);
  for (Index i = 0; i < n; ++i) {
    const double total = uniform(rng) < 0.1 ? 1.0 : uniform(rng);
    Vector w(m);
    for (Index k = 0; k < m; ++k) w(k) = -std::log(uniform(rng, 1e-12, 1.0));
    x.row(i) = (total * w / w.sum()).transpose();
  }
  return x;
}

/// Strictly positive interior state.
inline Matrix interior_state(Rng& rng, Index n, Index m) {
  Matrix x(n, m);
  for (Index i = 0; i < n; ++i) {
    const double total = uniform(rng, 0.1, 0.9);
    Vector w(m);
    for (Index k = 0; k < m; ++k) w(k) = uniform(rng, 0.2, 1.0);
    x.row(i) = (total * w / w.sum()).transpose();
  }
  return x;
}

/// Nonnegative n x n matrix with the given edge density.
inline Matrix random_nonnegative(Rng& rng, Index n, double density) {
  Matrix a = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (uniform(rng) < density) a(i, j) = uniform(rng, 0.05, 1.0);
    }
  }
  return a;
}

/// Irreducible 0/1 adjacency: a random directed cycle through every node plus extra edges.
inline Matrix random_irreducible_adjacency(Rng& rng, Index n, double density, bool weighted = false) {
  std::vector<Index> order(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::shuffle(order.begin(), order.end(), rng);
  Matrix a = Matrix::Zero(n, n);
  const auto weight = [&] { return weighted ? uniform(rng, 0.1, 1.0) : 1.0; };
  for (Index p = 0; p < n; ++p) {
    a(order[static_cast<std::size_t>(p)], order[static_cast<std::size_t>((p + 1) % n)]) = weight();
  }
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (a(i, j) == 0.0 && uniform(rng) < density) a(i, j) = weight();
    }
  }
  return a;
}

/// A model satisfying Assumptions 2-4. Occasionally the Assumption 3 bounds
/// hold with equality.
inline MultiVirusModel random_valid_model(Rng& rng, Index n, Index m) {
  const double h = uniform(rng) < 0.2 ? 1.0 : uniform(rng, 0.05, 1.0);
  std::vector<Matrix> b;
  Vector row_total = Vector::Zero(n);
  for (Index k = 0; k < m; ++k) {
    Matrix layer = random_nonnegative(rng, n, uniform(rng, 0.1, 0.8));
    if (layer.isZero()) layer(0, 1) = 1.0;
    row_total += layer.rowwise().sum();
    b.push_back(std::move(layer));
  }
  const double fill = uniform(rng) < 0.2 ? 1.0 : uniform(rng, 0.05, 1.0);
  const double scale = fill / (h * row_total.maxCoeff());
  std::vector<VirusLayer> layers;
  for (Index k = 0; k < m; ++k) {
    Vector delta(n);
    for (Index i = 0; i < n; ++i) delta(i) = (uniform(rng) < 0.1 ? 1.0 : uniform(rng)) / h;
    layers.push_back(VirusLayer::from_matrix(b[static_cast<std::size_t>(k)] * scale, delta));
  }
  return MultiVirusModel(h, std::move(layers));
}

/// Largest threshold quantity reachable by rates_for_threshold with this budget.
inline double max_threshold(const Matrix& a, double budget) {
  return 1.0 + budget * spectral_radius(a) / a.rowwise().sum().maxCoeff();
}

/// Homogeneous layer on `a` whose threshold quantity 1 - h delta + h beta rho(A) equals `rho_target`,
/// with h beta max-row-sum <= budget and h delta <= 1. Targets above max_threshold() are rejected.
struct HomogeneousRates {
  double beta;
  double delta;
};

inline HomogeneousRates rates_for_threshold(Rng& rng, const Matrix& a, double h, double rho_target,
                                            double budget) {
  const double rho_a = spectral_radius(a);
  const double row_max = a.rowwise().sum().maxCoeff();
  // beta * rho_a - delta = (rho_target - 1) / h, with h * beta * row_max <= budget and h * delta <= 1.
  const double gap = (rho_target - 1.0) / h;
  if (h * gap > budget * rho_a / row_max || h * gap < -1.0) {
    throw std::invalid_argument("threshold target out of reach for this budget");
  }
  for (;;) {
    const double beta = uniform(rng, 0.05, 1.0) * budget / (h * row_max);
    const double delta = beta * rho_a - gap;
    if (delta >= 0.0 && h * delta <= 1.0) return {beta, delta};
  }
}

// --- oracles -----------------------------------------------------------------

/// Coefficients c_0..c_n of det(lambda I - M) = lambda^n + c_1 lambda^(n-1) + ... + c_n
/// by the Faddeev-LeVerrier recursion.
inline std::vector<double> characteristic_polynomial(const Matrix& m) {
  const Index n = m.rows();
  std::vector<double> c(static_cast<std::size_t>(n + 1), 0.0);
  c[0] = 1.0;
  Eigen::MatrixXd mk = Eigen::MatrixXd::Zero(n, n);
  const Eigen::MatrixXd a = m;
  for (Index k = 1; k <= n; ++k) {
    mk = a * mk + c[static_cast<std::size_t>(k - 1)] * Eigen::MatrixXd::Identity(n, n);
    c[static_cast<std::size_t>(k)] = -(a * mk).trace() / static_cast<double>(k);
  }
  return c;
}

inline double polynomial_value(const std::vector<double>& c, double x, double* derivative = nullptr) {
  double p = 0.0;
  double dp = 0.0;
  for (const double coeff : c) {
    dp = dp * x + p;
    p = p * x + coeff;
  }
  if (derivative) *derivative = dp;
  return p;
}

/// Largest-modulus real root of the characteristic polynomial: companion
/// matrix roots, then Newton polishing on the polynomial itself.
inline double perron_root_oracle(const Matrix& m) {
  const auto c = characteristic_polynomial(m);
  const Index n = m.rows();
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
  for (Index k = 0; k < n; ++k) companion(0, k) = -c[static_cast<std::size_t>(k + 1)];
  for (Index k = 1; k < n; ++k) companion(k, k - 1) = 1.0;
  const Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  double modulus = 0.0;
  for (Index k = 0; k < n; ++k) modulus = std::max(modulus, std::abs(solver.eigenvalues()(k)));
  // The Perron root is the real root of maximal modulus; start Newton from the
  // real root closest to that modulus.
  double best = modulus;
  double distance = std::numeric_limits<double>::infinity();
  for (Index k = 0; k < n; ++k) {
    const std::complex<double> root = solver.eigenvalues()(k);
    const double d = std::abs(root - std::complex<double>(modulus, 0.0));
    if (d < distance) {
      distance = d;
      best = root.real();
    }
  }
  double x = std::max(best, 0.0);
  for (int it = 0; it < 100; ++it) {
    double dp = 0.0;
    const double p = polynomial_value(c, x, &dp);
    if (dp == 0.0) break;
    const double next = x - p / dp;
    if (std::abs(next - x) <= 1e-16 * std::max(1.0, std::abs(x))) {
      x = next;
      break;
    }
    x = next;
  }
  return x;
}

/// Plain loop evaluation of one step of the dynamics, without clamping.
inline Matrix naive_step(const MultiVirusModel& model, const Matrix& x) {
  const Index n = model.nodes();
  const Index m = model.viruses();
  Matrix next(n, m);
  for (Index i = 0; i < n; ++i) {
    double occupied = 0.0;
    for (Index l = 0; l < m; ++l) occupied += x(i, l);
    for (Index k = 0; k < m; ++k) {
      const auto& b = model.layer(k).infection();
      double pressure = 0.0;
      for (Index j = 0; j < n; ++j) pressure += b(i, j) * x(j, k);
      next(i, k) = x(i, k) + model.h() * ((1.0 - occupied) * pressure - model.layer(k).healing()(i) * x(i, k));
    }
  }
  return next;
}

}  // namespace mvsis::testing
