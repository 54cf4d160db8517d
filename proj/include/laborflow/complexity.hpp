#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "laborflow/community.hpp"
#include "laborflow/flows.hpp"

namespace laborflow {

/// Accessibility (fitness) and transferability (inverse complexity) scores.
/// Occupations without inflow carry no accessibility score; occupations
/// without outflow carry no complexity/transferability score. Each defined
/// score vector is normalized to sum 1.
struct AccessTransferScores {
  std::vector<Occupation> occupations;
  std::vector<std::optional<double>> accessibility;    // F
  std::vector<std::optional<double>> complexity;       // Q
  std::vector<std::optional<double>> transferability;  // 1/Q
  std::size_t iterations = 0;
  bool converged = false;          // rank orders stabilized before the last iteration
  std::size_t rank_stable_at = 0;  // first iteration after which ranks never changed
  std::vector<std::string> no_inflow;   // flagged, excluded from accessibility
  std::vector<std::string> no_outflow;  // flagged, excluded from transferability
};

/// Per-iteration sums of the normalized score vectors, for invariant checks.
struct FitnessComplexityTrace {
  std::vector<double> sum_accessibility;
  std::vector<double> sum_complexity;
};

/// Iterate the accessibility/transferability fixed point on a self-loop-free
/// transition matrix: starting from all-ones vectors, each round sets
///   F~(i) = sum_j P(i,j) * Q(j)   and   Q~(j) = (sum_i P(i,j) / F(i))^-1
/// and renormalizes both vectors by their sums. Runs exactly `n_iter` rounds
/// (default 200) and records when both rank orders stopped changing.
AccessTransferScores fitness_complexity(const TransitionMatrix& Pt,
                                        std::size_t n_iter = 200,
                                        FitnessComplexityTrace* trace = nullptr);

/// Flat-kernel mean-shift over log10-transformed positive values. The window
/// at mean m covers points within bandwidth/2 of m; each point is iterated to
/// its mode (stop when the shift drops below 1e-7) and modes closer than
/// bandwidth/2 are merged into one cluster.
struct MeanShiftResult {
  std::vector<double> modes;           // raw units, ascending
  std::vector<int> cluster_of;         // per input value, indexes `modes`
  std::vector<std::size_t> cluster_sizes;
  /// Midpoint (in log space) between the facing boundary points of the two
  /// largest clusters, in raw units. Undefined when only one mode is found;
  /// the caller must then supply a threshold explicitly.
  std::optional<double> threshold;
  std::optional<double> threshold_log10;
};
MeanShiftResult mean_shift_1d(const std::vector<double>& values, double bandwidth);

enum class Taxonomy { Hub, Condenser, Diffuser, Channel };

const char* taxonomy_name(Taxonomy t);
std::optional<Taxonomy> taxonomy_from_name(std::string_view name);

/// Four-class occupation taxonomy from accessibility/transferability
/// thresholds. Boundary values count as "high" (>= on both axes).
struct TaxonomyLabels {
  std::vector<Occupation> occupations;
  std::vector<std::optional<Taxonomy>> labels;  // undefined where a score is
  double theta_A = 0.0;
  double theta_T = 0.0;
};
TaxonomyLabels classify_taxonomy(const AccessTransferScores& scores,
                                 double theta_A, double theta_T);

/// NODF nestedness of a binary matrix, in [0, 100]. Ordered line pairs with
/// strictly decreasing fill contribute the percentage of the sparser line's
/// ones matched by the denser line; equal fills contribute zero.
double nodf(const BinaryGrid& M);

/// Entry is 1 iff the transition probability exceeds `cutoff` (default 1e-2).
BinaryGrid binarize_for_nestedness(const TransitionMatrix& Pt, double cutoff = 1e-2);

/// Row/column permutations exposing the nested structure: rows ordered by
/// descending accessibility, columns by ascending transferability, undefined
/// scores last, ties broken by occupation code.
struct NestedOrdering {
  std::vector<std::size_t> row_order;
  std::vector<std::size_t> col_order;
};
NestedOrdering nested_ordering(const AccessTransferScores& scores);

/// NODF of each community's induced submatrix plus the unweighted mean over
/// communities; single-occupation communities are undefined and excluded.
struct PerBlockNodf {
  std::vector<std::optional<double>> per_community;
  std::optional<double> mean;
};
PerBlockNodf per_block_nodf(const BinaryGrid& M, const CommunityAssignment& communities);

/// 4x4 taxonomy cross-tabulation between two labelings of the same
/// occupation set. Occupations lacking a label on either side are skipped.
struct ConfusionMatrix {
  std::array<std::array<int, 4>, 4> counts{};  // [label in a][label in b]
  int total = 0;

  int diagonal() const {
    return counts[0][0] + counts[1][1] + counts[2][2] + counts[3][3];
  }
  int off_diagonal() const { return total - diagonal(); }
};
ConfusionMatrix taxonomy_confusion(const TaxonomyLabels& a, const TaxonomyLabels& b);

}  // namespace laborflow
