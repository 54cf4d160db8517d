// Shared deterministic fixtures for unit and acceptance tests.
#pragma once

#include <cstdint>
#include <vector>

#include "laborflow/flows.hpp"
#include "laborflow/structure.hpp"
#include "laborflow/types.hpp"

namespace fixtures {

/// Occupations named X00, X01, ... (code order = index order).
std::vector<laborflow::Occupation> occupations(std::size_t n);

/// FlowCounts wrapping an explicit (destination, origin) count grid.
laborflow::FlowCounts counts_from(const laborflow::CountGrid& counts);

/// TransitionMatrix wrapping explicit column-stochastic probabilities.
laborflow::TransitionMatrix matrix_from(const laborflow::Matrix& probs,
                                        laborflow::SelfLoops self_loops);

/// Random dense column-stochastic matrix with self-loops included; every
/// entry positive.
laborflow::TransitionMatrix random_stochastic(std::size_t n, std::uint64_t seed);

/// Random self-loop-free column-stochastic matrix with edge density in
/// (0, 1]; isolated columns are patched to keep every column supported.
laborflow::TransitionMatrix random_stochastic_stripped(std::size_t n,
                                                       std::uint64_t seed,
                                                       double density = 1.0);

/// Strict-triangle transition matrix: origin j spreads uniformly over
/// destinations i < j; column 0 is empty (no outflow) and occupation n-1 has
/// no inflow. Self-loop-free by construction.
laborflow::TransitionMatrix strict_triangle(std::size_t n);

/// Full triangular binary matrix: entry (i, j) = 1 iff i <= j.
laborflow::BinaryGrid full_triangle(std::size_t n);

/// Condensation fixture: three nested communities whose flows pool at a few
/// highly accessible, high-fan-out occupations; the last member of each
/// community carries a little cross-community flow. Skills make neighbors
/// similar and give the community tails overlap with the next community's
/// entries. `starts` restricts coverage walks to the first community, where
/// added links can actually unlock reach.
struct CondensationFixture {
  laborflow::FlowCounts flows;
  laborflow::SkillMatrix skills;
  std::vector<std::size_t> starts;
};
CondensationFixture condensation_fixture();

/// Index-proximity similarity matrix for nested fixtures: unit diagonal,
/// symmetric, decaying in |i - j|.
laborflow::Matrix proximity_similarity(std::size_t n);

}  // namespace fixtures
