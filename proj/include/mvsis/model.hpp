#pragma once

// Discrete-time competing multi-virus SIS dynamics.
//
// For agents i, viruses k and sampling parameter h the state evolves as
//
//   x_i^k[t+1] = x_i^k + h ( (1 - sum_l x_i^l) sum_j beta_ij^k x_j^k - delta_i^k x_i^k )
//
// on the domain D = { x^k >= 0, sum_k x^k <= 1 }, which is positively invariant
// whenever the model satisfies the well-posedness assumptions checked by
// validate_model().

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mvsis/types.hpp"

namespace mvsis {

/// Absolute slack allowed on domain membership before a state is rejected.
inline constexpr double kDomainTolerance = 1e-12;

/// Per-virus spreading parameters: the infection matrix B^k (entries beta_ij^k)
/// and healing rates delta^k. A layer built from a rate vector and adjacency
/// keeps both factors; B^k = diag(beta) A is then derived from them.
class VirusLayer {
 public:
  static VirusLayer from_matrix(Matrix infection, Vector healing);
  static VirusLayer factored(Vector beta, Matrix adjacency, Vector healing);
  static VirusLayer homogeneous(double beta, Matrix adjacency, double delta);

  Index size() const { return healing_.size(); }
  const Matrix& infection() const { return infection_; }
  const Vector& healing() const { return healing_; }

  bool is_factored() const { return beta_.has_value(); }
  /// Throws if the layer was built without the factored form.
  const Vector& beta() const;
  const Matrix& adjacency() const;

 private:
  VirusLayer() = default;

  Matrix infection_;
  Vector healing_;
  std::optional<Vector> beta_;
  std::optional<Matrix> adjacency_;
};

class MultiVirusModel {
 public:
  /// Shapes and finiteness are checked here; the modelling assumptions are
  /// reported by validate_model() instead so that violations stay inspectable.
  MultiVirusModel(double h, std::vector<VirusLayer> layers, bool strict = false);

  Index nodes() const { return layers_.front().size(); }
  Index viruses() const { return static_cast<Index>(layers_.size()); }
  double h() const { return h_; }
  /// Strict models also require every infection matrix to be irreducible.
  bool strict() const { return strict_; }

  const VirusLayer& layer(Index k) const { return layers_.at(static_cast<std::size_t>(k)); }
  std::span<const VirusLayer> layers() const { return layers_; }

 private:
  double h_;
  std::vector<VirusLayer> layers_;
  bool strict_;
};

/// n x m matrix of infection fractions, entry (i, k) = x_i^k.
class EpidemicState {
 public:
  EpidemicState() = default;
  explicit EpidemicState(Matrix values);

  static EpidemicState zeros(Index nodes, Index viruses);

  Index nodes() const { return values_.rows(); }
  Index viruses() const { return values_.cols(); }

  double operator()(Index i, Index k) const { return values_(i, k); }
  double& operator()(Index i, Index k) { return values_(i, k); }

  const Matrix& values() const { return values_; }
  Matrix& values() { return values_; }
  Vector virus(Index k) const { return values_.col(k); }

  /// Largest distance outside D: max of -x_i^k, x_i^k - 1 and sum_k x_i^k - 1 (0 if inside).
  double domain_excursion() const;
  bool in_domain(double tolerance = kDomainTolerance) const {
    return domain_excursion() <= tolerance;
  }

  friend bool operator==(const EpidemicState& a, const EpidemicState& b) {
    return a.values_.rows() == b.values_.rows() && a.values_.cols() == b.values_.cols() &&
           a.values_ == b.values_;
  }

 private:
  Matrix values_;
};

/// Entry-wise clamp to [0, 1], then proportional rescale of any row whose sum exceeds 1.
void clamp_to_domain(Matrix& values);

class Trajectory {
 public:
  explicit Trajectory(EpidemicState initial, std::optional<double> h = std::nullopt);
  explicit Trajectory(std::vector<EpidemicState> states, std::optional<double> h = std::nullopt);

  void append(EpidemicState state);

  std::size_t size() const { return states_.size(); }
  Index transitions() const { return static_cast<Index>(states_.size()) - 1; }
  Index nodes() const { return states_.front().nodes(); }
  Index viruses() const { return states_.front().viruses(); }

  const EpidemicState& operator[](std::size_t t) const { return states_[t]; }
  const EpidemicState& front() const { return states_.front(); }
  const EpidemicState& back() const { return states_.back(); }
  auto begin() const { return states_.begin(); }
  auto end() const { return states_.end(); }
  std::span<const EpidemicState> states() const { return states_; }

  std::optional<double> h;
  std::optional<double> noise_sigma;
  /// Largest pre-clamp excursion outside D seen while the trajectory was generated.
  double max_excursion = 0.0;

 private:
  std::vector<EpidemicState> states_;
};

struct AssumptionCheck {
  int assumption = 0;
  bool evaluated = true;
  bool passed = true;
  std::string detail;
  std::optional<Index> node;
  std::optional<Index> virus;
  std::optional<Index> column;
};

/// One entry per well-posedness assumption (1..5). Failures are data: the
/// first offending index is recorded, nothing is thrown.
struct AssumptionReport {
  std::array<AssumptionCheck, 5> checks;

  const AssumptionCheck& operator[](int assumption) const { return checks.at(assumption - 1); }
  bool passed() const;
  /// Human-readable description of the first failed check, empty if none.
  std::string first_failure() const;
};

AssumptionReport validate_model(const MultiVirusModel& model, const EpidemicState& x0);
/// Assumptions 2-5 only (no initial state).
AssumptionReport validate_parameters(const MultiVirusModel& model);

/// One application of the update above. Throws if `x` lies outside D by more
/// than kDomainTolerance; the result is clamped back to exact bounds.
EpidemicState step(const MultiVirusModel& model, const EpidemicState& x);

struct SimulateOptions {
  /// Run validate_model once before iterating and refuse invalid input.
  bool check_assumptions = true;
};

/// steps + 1 states starting at x0.
Trajectory simulate(const MultiVirusModel& model, const EpidemicState& x0, Index steps,
                    SimulateOptions options = {});

using Rgb = std::array<double, 3>;
/// Two-virus colour map: x^1 red + x^2 green + (1 - x^1 - x^2) blue.
std::vector<Rgb> color_map(const EpidemicState& x);

}  // namespace mvsis
