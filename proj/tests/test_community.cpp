#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <doctest.h>

#include "fixtures.hpp"
#include "laborflow/community.hpp"
#include "laborflow/rng.hpp"
#include "laborflow/synthnet.hpp"

using namespace laborflow;

namespace {

// Two complete digraphs of size m with no cross links.
FlowCounts two_cliques(std::size_t m) {
  CountGrid counts(2 * m, 2 * m, 0);
  for (std::size_t block = 0; block < 2; ++block)
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b)
        if (a != b) counts(block * m + a, block * m + b) = 1;
  return fixtures::counts_from(counts);
}

bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
  std::map<int, int> fwd, bwd;
  for (std::size_t v = 0; v < a.size(); ++v) {
    if (fwd.count(a[v]) && fwd[a[v]] != b[v]) return false;
    if (bwd.count(b[v]) && bwd[b[v]] != a[v]) return false;
    fwd[a[v]] = b[v];
    bwd[b[v]] = a[v];
  }
  return true;
}

}  // namespace

TEST_CASE("one community on any graph scores zero") {
  const FlowCounts fc = ingest_counts(
      {{"A", "B", 3, ""}, {"B", "A", 1, ""}, {"C", "C", 2, ""}, {"A", "C", 1, ""}});
  CHECK(std::abs(barber_modularity(fc, {0, 0, 0})) < 1e-15);
}

TEST_CASE("hand-computed 3-node fixture") {
  // Flows: A->B 3, B->A 1, C->C 2, A->C 1; communities {A,B} and {C}.
  // Q = (intra - null) / E with E = 7 works out to 16/49.
  const FlowCounts fc = ingest_counts(
      {{"A", "B", 3, ""}, {"B", "A", 1, ""}, {"C", "C", 2, ""}, {"A", "C", 1, ""}});
  const double q = barber_modularity(fc, {0, 0, 1});
  CHECK(std::abs(q - 16.0 / 49.0) < 1e-12);
}

TEST_CASE("two disconnected cliques split in half score one half") {
  const FlowCounts fc = two_cliques(4);
  std::vector<int> membership(8, 0);
  for (std::size_t v = 4; v < 8; ++v) membership[v] = 1;
  CHECK(std::abs(barber_modularity(fc, membership) - 0.5) < 1e-12);
}

TEST_CASE("modularity is invariant under community relabeling") {
  Rng rng(4);
  const FlowCounts fc = planted_blocks(12, 3, 0.8, 0.1, 5);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> membership(12);
    for (int& m : membership) m = static_cast<int>(rng.below(4));
    const double q = barber_modularity(fc, membership);
    // Relabel by a random permutation of {0..3}.
    std::vector<int> perm = {0, 1, 2, 3};
    for (std::size_t i = 4; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
    std::vector<int> relabeled(12);
    for (std::size_t v = 0; v < 12; ++v) relabeled[v] = perm[membership[v]];
    CHECK(std::abs(barber_modularity(fc, relabeled) - q) < 1e-12);
  }
}

TEST_CASE("empty networks and partial memberships are rejected") {
  CountGrid counts(2, 2, 0);
  CHECK_THROWS_AS(barber_modularity(fixtures::counts_from(counts), {0, 0}), InputError);
  counts(0, 1) = 1;
  CHECK_THROWS_AS(barber_modularity(fixtures::counts_from(counts), {0}), InputError);
}

TEST_CASE("brim recovers a planted two-block partition") {
  const FlowCounts fc = planted_blocks(20, 2, 0.9, 0.05, 31);
  std::vector<int> truth(20);
  for (std::size_t v = 0; v < 20; ++v) truth[v] = planted_block_of(v, 20, 2);
  const CommunityAssignment found = brim(fc);
  CHECK(found.n_communities == 2);
  CHECK(same_partition(found.membership, truth));
}

TEST_CASE("a single clique stays one community") {
  CountGrid counts(5, 5, 0);
  for (std::size_t a = 0; a < 5; ++a)
    for (std::size_t b = 0; b < 5; ++b)
      if (a != b) counts(a, b) = 2;
  const CommunityAssignment found = brim(fixtures::counts_from(counts));
  CHECK(found.n_communities == 1);
  CHECK(std::abs(found.modularity) < 1e-12);
}

TEST_CASE("brim finds eight planted blocks") {
  const FlowCounts fc = planted_blocks(64, 8, 0.9, 0.02, 7);
  const CommunityAssignment found = brim(fc);
  CHECK(found.n_communities == 8);
  std::vector<int> truth(64);
  for (std::size_t v = 0; v < 64; ++v) truth[v] = planted_block_of(v, 64, 8);
  CHECK(same_partition(found.membership, truth));
}

TEST_CASE("modularity never decreases across sweeps") {
  const FlowCounts fc = planted_blocks(30, 3, 0.8, 0.08, 13);
  BrimTrace trace;
  brim(fc, {}, &trace);
  REQUIRE_FALSE(trace.sweep_q.empty());
  for (const auto& run : trace.sweep_q)
    for (std::size_t s = 1; s < run.size(); ++s)
      CHECK(run[s] >= run[s - 1] - 1e-12);
}

TEST_CASE("the stored modularity equals a recomputation") {
  const FlowCounts fc = planted_blocks(24, 4, 0.85, 0.05, 3);
  const CommunityAssignment found = brim(fc);
  CHECK(std::abs(found.modularity - barber_modularity(fc, found.membership)) < 1e-12);
}

TEST_CASE("brim is reproducible for a fixed seed") {
  const FlowCounts fc = planted_blocks(26, 3, 0.8, 0.1, 17);
  BrimOptions options;
  options.seed = 99;
  const CommunityAssignment a = brim(fc, options);
  const CommunityAssignment b = brim(fc, options);
  CHECK(a.membership == b.membership);
  CHECK(a.modularity == b.modularity);
}

TEST_CASE("inter-community share: block-diagonal means zero") {
  Matrix probs(4, 4, 0.0);
  probs(1, 0) = 1.0;
  probs(0, 1) = 1.0;
  probs(3, 2) = 1.0;
  probs(2, 3) = 1.0;
  const TransitionMatrix tm = fixtures::matrix_from(probs, SelfLoops::excluded);
  CommunityAssignment ca;
  ca.occupations = tm.occupations;
  ca.membership = {0, 0, 1, 1};
  ca.n_communities = 2;
  const auto share = inter_community_share(tm, ca);
  CHECK(share.inter_share == 0.0);
  for (double v : share.outside_share) CHECK(v == 0.0);
}

TEST_CASE("inter-community share: uniform complete 4-node graph gives 2/3") {
  Matrix probs(4, 4, 0.0);
  for (std::size_t j = 0; j < 4; ++j)
    for (std::size_t i = 0; i < 4; ++i)
      if (i != j) probs(i, j) = 1.0 / 3.0;
  const TransitionMatrix tm = fixtures::matrix_from(probs, SelfLoops::excluded);
  CommunityAssignment ca;
  ca.occupations = tm.occupations;
  ca.membership = {0, 0, 1, 1};
  ca.n_communities = 2;
  const auto share = inter_community_share(tm, ca);
  CHECK(share.inter_share == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  for (double v : share.outside_share)
    CHECK(v == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("inter-community share hits a constructed 9 percent") {
  // Origin X00 keeps 91% of its off-diagonal mass inside its community.
  Matrix probs(4, 4, 0.0);
  probs(1, 0) = 0.91;
  probs(2, 0) = 0.05;
  probs(3, 0) = 0.04;
  probs(0, 1) = 0.91;
  probs(2, 1) = 0.09;
  probs(3, 2) = 0.91;
  probs(0, 2) = 0.09;
  probs(2, 3) = 0.91;
  probs(1, 3) = 0.09;
  const TransitionMatrix tm = fixtures::matrix_from(probs, SelfLoops::excluded);
  CommunityAssignment ca;
  ca.occupations = tm.occupations;
  ca.membership = {0, 0, 1, 1};
  ca.n_communities = 2;
  const auto share = inter_community_share(tm, ca);
  CHECK(std::abs(share.inter_share - 0.09) < 1e-12);
}
