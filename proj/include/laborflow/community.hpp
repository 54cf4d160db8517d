#pragma once

#include <cstdint>
#include <vector>

#include "laborflow/flows.hpp"
#include "laborflow/types.hpp"

namespace laborflow {

/// A total occupation -> community map together with its Barber modularity.
struct CommunityAssignment {
  std::vector<Occupation> occupations;
  std::vector<int> membership;  // community index in [0, n_communities)
  double modularity = 0.0;
  int n_communities = 0;
};

/// Barber modularity of a membership over the bipartite lift of the flow
/// network: each occupation contributes an origin-role and a destination-role
/// node, both carrying the occupation's community label. The null model for a
/// (origin i, destination a) cell is out_strength(i) * in_strength(a) / E.
/// Throws InputError when the total link weight E is zero or the membership
/// does not cover the occupation set.
double barber_modularity(const FlowCounts& flows, const std::vector<int>& membership);

struct BrimOptions {
  int c_max = 24;           // label-space upper bound; empty labels are dropped
  int restarts = 16;        // independent seeded restarts, best Q kept
  int max_sweeps = 200;     // per restart
  std::uint64_t seed = 1;
};

/// Per-sweep modularity values of every restart, for monotonicity checks.
struct BrimTrace {
  std::vector<std::vector<double>> sweep_q;  // [restart][sweep]
};

/// BRIM community detection: alternating label optimization on the bipartite
/// lift (fix destination-role labels, optimally relabel origin-role nodes,
/// swap roles, repeat until the modularity gain falls below 1e-12), followed
/// by greedy community merges while they improve modularity. Restarts run
/// from independent random initializations and the best result is kept.
/// Each occupation's final label comes from its higher-strength role
/// (ties -> origin role); the stored modularity is recomputed from the
/// reconciled membership via barber_modularity.
CommunityAssignment brim(const FlowCounts& flows, const BrimOptions& options = {},
                         BrimTrace* trace = nullptr);

/// Cross-community share of transition probability mass.
struct InterCommunityShare {
  double inter_share = 0.0;  // cross-community mass / total off-diagonal mass
  std::vector<double> outside_share;  // per origin: fraction of its outgoing
                                      // off-diagonal mass leaving its community
};
InterCommunityShare inter_community_share(const TransitionMatrix& P,
                                          const CommunityAssignment& communities);

}  // namespace laborflow
