#include "fixtures.hpp"

#include <cmath>
#include <string>

#include "laborflow/rng.hpp"

namespace fixtures {

using laborflow::CountGrid;
using laborflow::FlowCounts;
using laborflow::Matrix;
using laborflow::Occupation;
using laborflow::Rng;
using laborflow::SelfLoops;
using laborflow::TransitionMatrix;

std::vector<Occupation> occupations(std::size_t n) {
  std::vector<Occupation> occupations(n);
  for (std::size_t v = 0; v < n; ++v) {
    std::string digits = std::to_string(v);
    if (digits.size() < 2) digits = "0" + digits;
    occupations[v].code = "X" + digits;
  }
  return occupations;
}

FlowCounts counts_from(const CountGrid& counts) {
  FlowCounts fc;
  fc.occupations = occupations(counts.rows());
  fc.counts = counts;
  fc.entry_counts.assign(counts.rows(), 0);
  fc.exit_counts.assign(counts.rows(), 0);
  return fc;
}

TransitionMatrix matrix_from(const Matrix& probs, SelfLoops self_loops) {
  TransitionMatrix tm;
  tm.occupations = occupations(probs.rows());
  tm.probs = probs;
  tm.self_loops = self_loops;
  return tm;
}

TransitionMatrix random_stochastic(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Matrix probs(n, n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      probs(i, j) = 0.05 + rng.uniform();
      sum += probs(i, j);
    }
    for (std::size_t i = 0; i < n; ++i) probs(i, j) /= sum;
  }
  return matrix_from(probs, SelfLoops::included);
}

TransitionMatrix random_stochastic_stripped(std::size_t n, std::uint64_t seed,
                                            double density) {
  Rng rng(seed);
  Matrix probs(n, n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == j) continue;
      if (rng.uniform() < density) {
        probs(i, j) = 0.05 + rng.uniform();
        sum += probs(i, j);
      }
    }
    if (sum <= 0.0) {  // keep every column supported
      const std::size_t i = (j + 1) % n;
      probs(i, j) = 1.0;
      sum = 1.0;
    }
    for (std::size_t i = 0; i < n; ++i) probs(i, j) /= sum;
  }
  return matrix_from(probs, SelfLoops::excluded);
}

TransitionMatrix strict_triangle(std::size_t n) {
  Matrix probs(n, n, 0.0);
  for (std::size_t j = 1; j < n; ++j)
    for (std::size_t i = 0; i < j; ++i)
      probs(i, j) = 1.0 / static_cast<double>(j);
  TransitionMatrix tm = matrix_from(probs, SelfLoops::excluded);
  tm.degenerate.push_back(tm.occupations[0].code);
  return tm;
}

laborflow::BinaryGrid full_triangle(std::size_t n) {
  laborflow::BinaryGrid m(n, n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) m(i, j) = 1;
  return m;
}

CondensationFixture condensation_fixture() {
  // Three communities of eight; local flows are nested (everything pools at
  // the community's first occupations), the last member of each community is
  // a bridge sending a sliver of flow into the next community.
  const std::size_t community_size = 8;
  const std::size_t n_communities = 3;
  const std::size_t n = community_size * n_communities;

  CountGrid counts(n, n, 0);
  for (std::size_t c = 0; c < n_communities; ++c) {
    const std::size_t base = c * community_size;
    for (std::size_t k = 0; k < community_size; ++k) {
      const std::size_t origin = base + k;
      counts(origin, origin) = 300;  // stayers dominate
      const std::size_t reach = community_size - k;  // nested out-profile
      for (std::size_t i = 0; i < std::max<std::size_t>(reach, 1); ++i) {
        const std::size_t dest = base + i;
        if (dest == origin) continue;
        counts(dest, origin) = static_cast<std::int64_t>(40 - 4 * i);
      }
    }
    // Bridge: the community's last occupation also reaches the next
    // community's first two occupations.
    const std::size_t bridge = base + community_size - 1;
    const std::size_t next = ((c + 1) % n_communities) * community_size;
    counts(next, bridge) = 30;
    counts(next + 1, bridge) = 20;
  }

  CondensationFixture fixture;
  fixture.flows = counts_from(counts);
  for (std::size_t v = 0; v < community_size; ++v) fixture.starts.push_back(v);

  // Skills: a community block signature plus one positional feature, and a
  // shared "bridge craft" feature that ties each community's tail
  // occupations to the next community's entries.
  const std::size_t n_skills = n_communities + community_size + 1;
  laborflow::SkillMatrix skills;
  skills.occupations = fixture.flows.occupations;
  skills.skills.resize(n_skills);
  for (std::size_t s = 0; s < n_skills; ++s)
    skills.skills[s] = "S" + std::to_string(s);
  skills.weights = Matrix(n, n_skills, 0.0);
  for (std::size_t v = 0; v < n; ++v) {
    const std::size_t c = v / community_size;
    const std::size_t k = v % community_size;
    skills.weights(v, c) = 2.0;                       // community signature
    skills.weights(v, n_communities + k) = 1.0;       // positional feature
    if (k + 1 < community_size)                       // neighbor overlap
      skills.weights(v, n_communities + k + 1) = 0.8;
    if (k >= community_size - 2 || k <= 1)            // bridge craft
      skills.weights(v, n_skills - 1) = 1.5;
  }
  fixture.skills = skills;
  return fixture;
}

Matrix proximity_similarity(std::size_t n) {
  Matrix d(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      d(i, j) = i == j ? 1.0
                       : std::exp(-4.0 * std::abs(static_cast<double>(i) -
                                                  static_cast<double>(j)) /
                                  static_cast<double>(n));
  return d;
}

}  // namespace fixtures
