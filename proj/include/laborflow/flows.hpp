#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "laborflow/types.hpp"

namespace laborflow {

struct CommunityAssignment;  // community.hpp

/// One parsed transition record: `count` workers moved origin -> destination.
/// ENTRY as origin / EXIT as destination route the count to the boundary
/// tallies instead of the matrix. `group` is an opaque sub-population tag.
struct FlowRecord {
  std::string origin;
  std::string destination;
  std::int64_t count = 0;
  std::string group;  // empty = untagged
};

/// Raw directed transition counts between occupations, indexed
/// (destination, origin), plus boundary tallies and optional per-group splits.
struct FlowCounts {
  std::vector<Occupation> occupations;  // sorted by code
  CountGrid counts;                     // counts(dest, origin) >= 0
  std::vector<std::int64_t> entry_counts;  // arrivals from outside the network
  std::vector<std::int64_t> exit_counts;   // departures to outside the network
  std::map<std::string, FlowCounts> tags;  // group -> split, same occupation set

  std::size_t size() const { return occupations.size(); }
  std::optional<std::size_t> index_of(std::string_view code) const {
    return find_occupation(occupations, code);
  }
  /// Total outflow of origin j, self-loop included.
  std::int64_t out_total(std::size_t j) const;
  /// Total inflow into destination i, self-loop included.
  std::int64_t in_total(std::size_t i) const;
  /// Total link weight in the matrix (entry/exit tallies excluded).
  std::int64_t total() const;
};

/// Aggregate records into a FlowCounts. Occupation set = union of all
/// non-sentinel codes; aggregation is additive and order-independent.
/// Throws InputError (with the offending 1-based row index) on negative
/// counts, empty codes, or sentinel misuse (ENTRY as destination, EXIT as
/// origin, or ENTRY->EXIT rows).
FlowCounts ingest_counts(const std::vector<FlowRecord>& rows);

enum class SelfLoops { included, excluded };

/// Column-stochastic transition matrix: probs(i, j) is the probability of
/// destination i conditional on origin j, so each supported column sums to 1.
struct TransitionMatrix {
  std::vector<Occupation> occupations;
  Matrix probs;
  double theta = 0.0;          // link filter fraction applied at construction
  SelfLoops self_loops = SelfLoops::included;
  std::vector<std::string> dangling;    // origins made absorbing by the filter
  std::vector<std::string> degenerate;  // all-zero columns after self-loop removal

  static constexpr const char* dangling_policy = "absorbing";

  std::size_t size() const { return occupations.size(); }
  std::optional<std::size_t> index_of(std::string_view code) const {
    return find_occupation(occupations, code);
  }
};

/// Build the transition matrix from counts. Per origin j, links carrying less
/// than theta * (total outflow of j, self-loop included) are removed, the
/// remaining column is normalized to 1, and origins left with no outflow
/// become absorbing (unit self-loop) and are recorded in `dangling`.
/// theta must lie in [0, 1); the occupation set must be nonempty.
TransitionMatrix build_transition_matrix(const FlowCounts& counts, double theta);

/// Zero the diagonal and renormalize each remaining column to 1. Columns that
/// were pure self-loops become all-zero and are reported in `degenerate`.
/// Idempotent: stripping an already-stripped matrix returns it unchanged.
TransitionMatrix strip_self_loops(const TransitionMatrix& P);

/// Per-community boundary shares. A share is the boundary count divided by
/// (boundary count + matching off-diagonal transition count); communities
/// with no flow at all on a side get an undefined marker.
struct EntryExitShare {
  std::optional<double> inflow_from_outside;
  std::optional<double> outflow_to_outside;
};
std::vector<EntryExitShare> entry_exit_shares(const FlowCounts& counts,
                                              const CommunityAssignment& communities);

/// OLS coefficients of one destination row regressed on the base year.
struct StabilityCell {
  double alpha = 0.0;
  double beta = 0.0;
  std::size_t n_points = 0;
};

/// Year-on-year link-stability regressions: for each destination occupation i
/// and year t != base, P[i,j][t] = alpha + beta * P[i,j][base] across origins
/// j with a link in either year. Cells with fewer than two points, or with no
/// variance in the base-year regressor, are omitted and listed in `skipped`.
struct StabilityCoefficients {
  std::vector<std::string> years;  // sorted, base year excluded
  std::vector<Occupation> occupations;
  std::vector<std::vector<std::optional<StabilityCell>>> cells;  // [year][occ]
  std::vector<std::pair<std::string, std::string>> skipped;      // (year, code)
};
StabilityCoefficients temporal_stability(
    const std::map<std::string, TransitionMatrix>& by_year,
    const std::string& base_year);

}  // namespace laborflow
