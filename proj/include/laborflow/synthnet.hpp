#pragma once

#include <cstdint>

#include "laborflow/flows.hpp"

namespace laborflow {

/// Planted community structure: directed weighted counts where ordered pairs
/// inside a block link with probability p_in and cross-block pairs with
/// probability p_out (p_in > p_out required). Blocks are contiguous index
/// ranges of near-equal size; ground truth label of node v is its block.
FlowCounts planted_blocks(std::size_t n, int c, double p_in, double p_out,
                          std::uint64_t seed);

/// Ground-truth block label of node v under planted_blocks' partitioning.
int planted_block_of(std::size_t v, std::size_t n, int c);

/// Nested flow structure: origin k connects to the first f(k) occupations
/// (self-loop included when k < f(k)), with f(k) = n * ((n-k)/n)^(1 - 1/gamma)
/// rounded and clamped to at least 1. gamma steers the profile from dense
/// (gamma near 1) to the exact strict triangle (gamma -> infinity). Weights
/// are seeded small integers.
FlowCounts nested_flow(std::size_t n, double gamma, std::uint64_t seed);

/// Uniform complete digraph: every ordered pair of distinct occupations
/// carries the same count.
FlowCounts uniform_complete(std::size_t n, std::int64_t weight = 1);

/// Degree-preserving randomization: repeated directed double-edge swaps on
/// the off-diagonal binary support (self-loops keep their weight untouched),
/// then each origin's off-diagonal total is redistributed over its new
/// support in near-equal integer shares. In- and out-degree sequences and
/// column totals are preserved exactly. `n_swaps` counts attempted swaps.
/// Sets *too_few_edges and returns the input unchanged when fewer than two
/// off-diagonal links exist.
FlowCounts degree_preserving_null(const FlowCounts& base, std::size_t n_swaps,
                                  std::uint64_t seed, bool* too_few_edges = nullptr);

}  // namespace laborflow
