#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "laborflow/flows.hpp"

namespace laborflow {

/// Result of the stationary-distribution power iteration.
struct StationaryResult {
  std::vector<double> distribution;  // nonnegative, sums to 1
  bool converged = false;
  std::size_t iterations = 0;
  /// Closed communicating classes of the support graph (occupation codes).
  /// More than one class means the chain is reducible and the returned vector
  /// depends on the uniform start; callers get the classes as a warning.
  std::vector<std::vector<std::string>> closed_classes;

  bool reducible() const { return closed_classes.size() > 1; }
};

/// Power iteration from a uniform start until the max-norm change drops below
/// `tol` (default 1e-12) or `max_iter` iterations. P must be column-stochastic
/// with self-loops included.
StationaryResult stationary_distribution(const TransitionMatrix& P,
                                         double tol = 1e-12,
                                         std::size_t max_iter = 1000000);

/// Modulus of the second-largest eigenvalue and the implied convergence
/// half-time 1 / (1 - |lambda2|), infinite when |lambda2| is within 1e-12
/// of 1.
struct SpectralGapResult {
  double lambda2_modulus = 0.0;
  double halftime = 0.0;
  bool converged = false;
};
SpectralGapResult spectral_gap(const TransitionMatrix& P,
                               double tol = 1e-12,
                               std::size_t max_iter = 1000000);

/// Steady-state comparison of an observed occupation-share vector against the
/// implied stationary distribution.
struct SteadyStateReport {
  std::vector<double> stationary;
  double lambda2_modulus = 0.0;
  double halftime = 0.0;
  /// 100 * (x - xbar) / xbar per occupation; undefined where xbar is 0.
  std::vector<std::optional<double>> deviations_pct;
  /// Fraction of occupations with a defined deviation exceeding 10% in
  /// absolute value.
  double share_exceeding_10pct = 0.0;
  bool stationary_converged = false;
  bool gap_converged = false;
  std::vector<std::vector<std::string>> closed_classes;
};

/// Observed shares must sum to 1 within 1e-9.
SteadyStateReport deviation_report(const std::vector<double>& observed_shares,
                                   const TransitionMatrix& P);

}  // namespace laborflow
