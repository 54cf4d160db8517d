#include "laborflow/synthnet.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "laborflow/rng.hpp"

namespace laborflow {

namespace {

std::vector<Occupation> index_codes(std::size_t n) {
  std::size_t width = 1;
  for (std::size_t v = n > 0 ? n - 1 : 0; v >= 10; v /= 10) ++width;
  std::vector<Occupation> occupations(n);
  for (std::size_t v = 0; v < n; ++v) {
    std::string digits = std::to_string(v);
    occupations[v].code = "O" + std::string(width - digits.size(), '0') + digits;
  }
  return occupations;
}

FlowCounts empty_network(std::size_t n) {
  FlowCounts fc;
  fc.occupations = index_codes(n);
  fc.counts = CountGrid(n, n, 0);
  fc.entry_counts.assign(n, 0);
  fc.exit_counts.assign(n, 0);
  return fc;
}

}  // namespace

int planted_block_of(std::size_t v, std::size_t n, int c) {
  const std::size_t cu = static_cast<std::size_t>(c);
  const std::size_t base = n / cu;
  const std::size_t extra = n % cu;  // first `extra` blocks get one more node
  const std::size_t split = extra * (base + 1);
  if (v < split) return static_cast<int>(v / (base + 1));
  return static_cast<int>(extra + (v - split) / base);
}

FlowCounts planted_blocks(std::size_t n, int c, double p_in, double p_out,
                          std::uint64_t seed) {
  if (n < 2) throw InputError("need at least 2 occupations");
  if (c < 1 || static_cast<std::size_t>(c) > n)
    throw InputError("community count must lie in [1, n]");
  if (!(p_in >= 0.0 && p_in <= 1.0 && p_out >= 0.0 && p_out <= 1.0))
    throw InputError("probabilities must lie in [0,1]");
  if (!(p_in > p_out)) throw InputError("p_in must exceed p_out");

  FlowCounts fc = empty_network(n);
  Rng rng(seed);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      if (i == j) continue;
      const bool intra = planted_block_of(i, n, c) == planted_block_of(j, n, c);
      const double p = intra ? p_in : p_out;
      if (rng.uniform() < p)
        fc.counts(i, j) = 1 + static_cast<std::int64_t>(rng.below(5));
    }
  return fc;
}

FlowCounts nested_flow(std::size_t n, double gamma, std::uint64_t seed) {
  if (n < 2) throw InputError("need at least 2 occupations");
  if (!(gamma > 0.0)) throw InputError("gamma must be positive");

  // Profile: origin k connects to the first f(k) occupations, f shaped from
  // dense toward the exact strict triangle as gamma grows. Weights are kept
  // near-uniform so no supported link falls under the usual binarization
  // cutoff for n up to ~80.
  const double exponent = std::isinf(gamma) ? 1.0 : std::max(0.0, 1.0 - 1.0 / gamma);
  FlowCounts fc = empty_network(n);
  Rng rng(seed);
  for (std::size_t k = 0; k < n; ++k) {
    const double frac = static_cast<double>(n - k) / static_cast<double>(n);
    const auto f = static_cast<std::size_t>(std::max<long long>(
        1, std::llround(static_cast<double>(n) * std::pow(frac, exponent))));
    for (std::size_t i = 0; i < std::min(f, n); ++i)
      fc.counts(i, k) = 8 + static_cast<std::int64_t>(rng.below(3));
  }
  return fc;
}

FlowCounts uniform_complete(std::size_t n, std::int64_t weight) {
  if (n < 2) throw InputError("need at least 2 occupations");
  if (weight < 1) throw InputError("weight must be positive");
  FlowCounts fc = empty_network(n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i)
      if (i != j) fc.counts(i, j) = weight;
  return fc;
}

FlowCounts degree_preserving_null(const FlowCounts& base, std::size_t n_swaps,
                                  std::uint64_t seed, bool* too_few_edges) {
  const std::size_t n = base.size();
  if (too_few_edges) *too_few_edges = false;

  struct Edge {
    std::size_t origin, dest;
  };
  std::vector<Edge> edges;
  Grid<std::uint8_t> exists(n, n, 0);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i)
      if (i != j && base.counts(i, j) > 0) {
        edges.push_back({j, i});
        exists(i, j) = 1;
      }
  if (edges.size() < 2) {
    if (too_few_edges) *too_few_edges = true;
    return base;
  }

  Rng rng(seed);
  for (std::size_t attempt = 0; attempt < n_swaps; ++attempt) {
    const std::size_t e1 = rng.below(edges.size());
    const std::size_t e2 = rng.below(edges.size());
    const auto [a, b] = edges[e1];
    const auto [c, d] = edges[e2];
    if (a == c || b == d) continue;      // degenerate swap
    if (a == d || c == b) continue;      // would create a self-loop
    if (exists(d, a) || exists(b, c)) continue;  // would duplicate a link
    exists(b, a) = 0;
    exists(d, c) = 0;
    exists(d, a) = 1;
    exists(b, c) = 1;
    edges[e1].dest = d;
    edges[e2].dest = b;
  }

  // Redistribute each origin's off-diagonal total over its new support in
  // near-equal integer shares; self-loop counts stay as they were.
  FlowCounts out = base;
  for (std::size_t j = 0; j < n; ++j) {
    std::int64_t off_total = 0;
    std::vector<std::size_t> dests;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == j) continue;
      off_total += base.counts(i, j);
      out.counts(i, j) = 0;
      if (exists(i, j)) dests.push_back(i);
    }
    if (dests.empty()) continue;
    const std::int64_t share = off_total / static_cast<std::int64_t>(dests.size());
    std::int64_t remainder = off_total % static_cast<std::int64_t>(dests.size());
    for (std::size_t i : dests) {
      out.counts(i, j) = share + (remainder > 0 ? 1 : 0);
      if (remainder > 0) --remainder;
    }
  }
  return out;
}

}  // namespace laborflow
