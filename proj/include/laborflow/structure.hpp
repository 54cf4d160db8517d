#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "laborflow/community.hpp"
#include "laborflow/complexity.hpp"
#include "laborflow/flows.hpp"

namespace laborflow {

/// Occupation-by-skill weight matrix (binary or averaged).
struct SkillMatrix {
  std::vector<Occupation> occupations;
  std::vector<std::string> skills;
  Matrix weights;  // occupations.size() x skills.size(), nonnegative
  std::vector<std::string> zero_rows;  // flagged on load

  std::optional<std::size_t> index_of(std::string_view code) const {
    return find_occupation(occupations, code);
  }
};

/// Edge distance used for centralities: -ln(p) with p clamped into
/// [1e-12, 1 - 1e-12], so that higher transition probability means a shorter
/// (and always strictly positive) distance, additive along paths.
double probability_distance(double p);

/// Freeman betweenness on the weighted directed graph, distances as above,
/// path counts over all shortest paths, normalized by (n-1)(n-2).
/// Expects a self-loop-free matrix.
std::vector<double> betweenness(const TransitionMatrix& Pt);

/// Outward closeness: (number of reachable nodes) / (sum of distances to
/// them), zero for nodes that reach nothing. `harmonic` carries the
/// disconnection-robust variant sum(1/d) / (n-1).
struct ClosenessResult {
  std::vector<double> closeness;
  std::vector<double> harmonic;
  static constexpr const char* distance_transform = "-ln(p), p clamped to [1e-12, 1-1e-12]";
};
ClosenessResult closeness(const TransitionMatrix& Pt);

/// Spearman rank correlation: Pearson correlation of fractional ranks, ties
/// averaged. Undefined when either argument has no rank variance.
std::optional<double> spearman(const std::vector<double>& x,
                               const std::vector<double>& y);

/// Cosine similarity of two occupations' skill rows, in [0, 1] for
/// nonnegative weights. Throws InputError naming the occupation if a row is
/// all zero.
double skill_similarity(const SkillMatrix& skills, std::size_t i, std::size_t j);

/// Full pairwise cosine-similarity matrix (unit diagonal).
Matrix skill_similarity_matrix(const SkillMatrix& skills);

/// Aggregate source-classification skill rows onto target occupations by
/// element-wise averaging, per a (source, target) mapping. Every target must
/// have at least one mapped source present in `sources`.
SkillMatrix aggregate_skills(const SkillMatrix& sources,
                             const std::vector<std::pair<std::string, std::string>>& mapping);

/// Mean skill similarity of each occupation to its own community (self
/// excluded) and to all other communities, with product and ratio scores.
/// d_intra is undefined for singleton communities; d_r is undefined when
/// d_inter is zero.
struct InterIntraScores {
  std::vector<std::optional<double>> d_intra;
  std::vector<std::optional<double>> d_inter;
  std::vector<std::optional<double>> d_p;  // d_intra * d_inter
  std::vector<std::optional<double>> d_r;  // d_intra / d_inter
};
InterIntraScores inter_intra_scores(const SkillMatrix& skills,
                                    const CommunityAssignment& communities);

/// Spearman correlations of accessibility and transferability against
/// occupation sizes. When `filter` is given, only occupations with filter[v]
/// true enter the correlations.
struct SizeCorrelations {
  std::optional<double> rho_accessibility;
  std::optional<double> rho_transferability;
};
SizeCorrelations size_correlations(const AccessTransferScores& scores,
                                   const std::vector<double>& sizes,
                                   const std::vector<char>* filter = nullptr);

}  // namespace laborflow
