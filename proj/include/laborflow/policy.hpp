#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "laborflow/complexity.hpp"
#include "laborflow/flows.hpp"

namespace laborflow {

enum class Strategy { skills_only, informed };

const char* strategy_name(Strategy s);

struct PolicyOptions {
  double delta = 0.005;      // injected flow before renormalization
  double percentile = 0.98;  // global similarity threshold (informed)
  int top_n = 5;             // fallback candidate count (informed)
  int steps = 5;             // random walk length
  int n_seeds = 500;         // walk repetitions
  std::uint64_t seed0 = 1;
  bool with_self_loops = false;  // walk on the matrix as-is instead of the
                                 // self-loop-excluded view
  std::size_t fc_iterations = 200;  // for the metric-stability scores
  /// Walk start indices for the coverage evaluation; empty = every
  /// occupation (start nodes count as visited, so the default start set
  /// saturates coverage on connected networks).
  std::vector<std::size_t> start_set;
};

struct AddedLink {
  std::string origin;
  std::string destination;
  double delta = 0.0;
};

/// Result of a link-addition strategy: the renormalized matrix, one added
/// link per origin that had an unlinked candidate, coverage distributions
/// with matched RNG streams before and after, and rank stability of the
/// accessibility/transferability scores across the modification.
struct PolicyOutcome {
  TransitionMatrix modified;
  std::vector<AddedLink> added_links;
  Strategy strategy = Strategy::skills_only;
  std::vector<std::string> skipped;  // origins already linked everywhere
  std::vector<double> coverage_before;  // per seed
  std::vector<double> coverage_after;
  std::optional<double> rho_accessibility;
  std::optional<double> rho_transferability;
  std::optional<double> percentile_threshold;  // informed only
};

/// For each origin with at least one zero-flow destination (self excluded),
/// add a link to the most skill-similar one (ties -> lowest code) with flow
/// `delta`, then renormalize that origin's column. D must be symmetric with
/// unit diagonal and aligned with P.
PolicyOutcome skills_only_strategy(const TransitionMatrix& P, const Matrix& D,
                                   const PolicyOptions& options = {});

/// Candidates are the unlinked destinations whose similarity exceeds the
/// global percentile of the off-diagonal pairwise-similarity distribution
/// (falling back to the top_n most similar when none qualify); among them the
/// one with the highest transferability wins (ties -> most similar, then
/// lowest code).
PolicyOutcome informed_strategy(const TransitionMatrix& P, const Matrix& D,
                                const std::vector<std::optional<double>>& transferability,
                                const PolicyOptions& options = {});

/// Per-seed network coverage: one walker starts from every occupation (or
/// from `start_set` when given) and takes `steps` probability-weighted steps;
/// coverage is the visited fraction of the network, start nodes included.
/// Walkers on all-zero columns halt in place. Deterministic: each walker's
/// stream is derived from seed0, the occupation code, and the seed index.
std::vector<double> random_walk_coverage(const TransitionMatrix& P, int steps,
                                         int n_seeds, std::uint64_t seed0,
                                         bool exclude_self_loops = true,
                                         const std::vector<std::size_t>* start_set = nullptr);

/// Spearman correlations of before/after accessibility and transferability.
struct MetricStability {
  std::optional<double> rho_accessibility;
  std::optional<double> rho_transferability;
};
MetricStability metric_stability(const AccessTransferScores& before,
                                 const AccessTransferScores& after);

}  // namespace laborflow
