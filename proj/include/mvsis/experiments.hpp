#pragma once

// Validation workflows on enrollment panels and the heterogeneous-versus-
// homogeneous approximation experiment.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mvsis/data.hpp"
#include "mvsis/identification.hpp"
#include "mvsis/model.hpp"

namespace mvsis {

/// How a yearly state enters the error tensor. The norm does not depend on
/// the flattening order, only on which channels are included.
enum class FrobeniusLayout {
  viruses,                  ///< years x units x programs
  viruses_and_susceptible,  ///< adds 1 - sum_k x^k as an extra channel
};

std::string_view to_string(FrobeniusLayout layout);
FrobeniusLayout layout_from_string(std::string_view text);

struct FrobeniusError {
  double scaled = 0.0;
  double numerator = 0.0;
  double denominator = 0.0;
};

/// ||F - F_hat||_F / ||F||_F over all years jointly.
FrobeniusError scaled_frobenius_error(std::span<const Matrix> data, std::span<const Matrix> predicted,
                                      FrobeniusLayout layout = FrobeniusLayout::viruses);

struct ValidationReport {
  double scaled_error = 0.0;
  double numerator = 0.0;
  double denominator = 0.0;
  std::string training_subset;
  /// "subset", "online-A" or "online-B".
  std::string mode = "subset";
  std::vector<EstimationResult> parameters_used;
  std::vector<std::string> assumption_warnings;
  /// Some virus could not be identified uniquely from the training data.
  bool non_unique = false;
  /// Simulated or predicted panel, one units x programs matrix per year.
  std::vector<Matrix> predicted;
};

/// Fits lumped homogeneous parameters per program on the units in `subset`
/// (borders leaving the subset are ignored), then simulates every unit from
/// the first year over the full horizon and scores it against the data.
ValidationReport subset_train_full_validate(const PanelDataset& dataset, std::span<const std::string> subset,
                                            const std::string& label,
                                            FrobeniusLayout layout = FrobeniusLayout::viruses);

/// One report per group, best first; equal errors are ordered by label.
std::vector<ValidationReport> subset_sweep(const PanelDataset& dataset,
                                           const std::map<std::string, std::string>& partition,
                                           FrobeniusLayout layout = FrobeniusLayout::viruses);

struct OnlineValidation {
  /// Years 0..warmup copied from the data.
  ValidationReport mode_a;
  /// Years 1..warmup predicted with the first estimate.
  ValidationReport mode_b;
  /// estimates[t][k]: estimate for program k after transitions 0..t.
  std::vector<std::vector<EstimationResult>> estimates;
};

/// Recursive least squares fed one year at a time. Each year after the
/// warmup is predicted one step ahead from the previous year's data with the
/// estimate available before it. Needs more than `warmup` transitions.
OnlineValidation online_validate(const PanelDataset& dataset, Index warmup = 1, double forgetting = 1.0,
                                 FrobeniusLayout layout = FrobeniusLayout::viruses);

struct HeteroHomoConfig {
  double h = 1.0;
  std::vector<Vector> beta{(Vector(3) << 0.15, 0.13, 0.08).finished(), (Vector(3) << 0.09, 0.11, 0.10).finished()};
  std::vector<Vector> delta{(Vector(3) << 0.05, 0.03, 0.04).finished(),
                            (Vector(3) << 0.13, 0.07, 0.08).finished()};
  Matrix x0 = (Matrix(3, 2) << 0, 0, 0, 1, 1, 0).finished();
  /// Complete graph without self-loops when unset.
  std::optional<Matrix> adjacency;
  double sigma = 0.03;
  std::uint64_t seed = 7;
  Index steps = 40;
  /// Transitions used for the homogeneous fit.
  Index fit_transitions = 4;
};

struct HeteroHomoResult {
  Trajectory clean;
  Trajectory observed;
  Trajectory fitted;
  /// Lumped homogeneous fit, one per virus.
  std::vector<EstimationResult> estimates;
  /// rms(i, k) between the fitted and the observed trajectory.
  Matrix rms;
  /// Same against the noiseless trajectory.
  Matrix rms_clean;
  double median_rms = 0.0;
  /// (node, virus) whose noiseless RMS exceeds the median.
  std::vector<std::pair<Index, Index>> flagged;
  std::vector<std::string> warnings;
};

HeteroHomoResult hetero_vs_homo_experiment(const HeteroHomoConfig& config = {});

}  // namespace mvsis
