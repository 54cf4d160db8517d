#include "laborflow/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "laborflow/rng.hpp"
#include "laborflow/structure.hpp"

namespace laborflow {

const char* strategy_name(Strategy s) {
  return s == Strategy::skills_only ? "skills_only" : "informed";
}

namespace {

void check_similarity(const TransitionMatrix& P, const Matrix& D) {
  const std::size_t n = P.size();
  if (D.rows() != n || D.cols() != n)
    throw InputError("similarity matrix does not align with the occupation set");
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(D(i, i) - 1.0) > 1e-9)
      throw InputError("similarity matrix must have a unit diagonal");
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(D(i, j) - D(j, i)) > 1e-9)
        throw InputError("similarity matrix must be symmetric");
  }
}

// Add `delta` flow on (origin -> dest) and renormalize that column only.
void add_and_renormalize(TransitionMatrix& P, std::size_t origin, std::size_t dest,
                         double delta) {
  P.probs(dest, origin) = delta;
  double sum = 0.0;
  for (std::size_t i = 0; i < P.size(); ++i) sum += P.probs(i, origin);
  for (std::size_t i = 0; i < P.size(); ++i) P.probs(i, origin) /= sum;
}

std::vector<std::size_t> unlinked_destinations(const TransitionMatrix& P,
                                               std::size_t origin) {
  std::vector<std::size_t> dests;
  for (std::size_t i = 0; i < P.size(); ++i)
    if (i != origin && P.probs(i, origin) == 0.0) dests.push_back(i);
  return dests;
}

// Self-loop-excluded view used by walks and metric-stability scoring.
TransitionMatrix analysis_view(const TransitionMatrix& P, bool with_self_loops) {
  if (with_self_loops || P.self_loops == SelfLoops::excluded) return P;
  return strip_self_loops(P);
}

void attach_evaluation(PolicyOutcome& outcome, const TransitionMatrix& before,
                       const PolicyOptions& options) {
  const std::vector<std::size_t>* starts =
      options.start_set.empty() ? nullptr : &options.start_set;
  outcome.coverage_before =
      random_walk_coverage(before, options.steps, options.n_seeds, options.seed0,
                           !options.with_self_loops, starts);
  outcome.coverage_after =
      random_walk_coverage(outcome.modified, options.steps, options.n_seeds,
                           options.seed0, !options.with_self_loops, starts);
  const AccessTransferScores fc_before = fitness_complexity(
      analysis_view(before, false), options.fc_iterations);
  const AccessTransferScores fc_after = fitness_complexity(
      analysis_view(outcome.modified, false), options.fc_iterations);
  const MetricStability stability = metric_stability(fc_before, fc_after);
  outcome.rho_accessibility = stability.rho_accessibility;
  outcome.rho_transferability = stability.rho_transferability;
}

}  // namespace

PolicyOutcome skills_only_strategy(const TransitionMatrix& P, const Matrix& D,
                                   const PolicyOptions& options) {
  if (!(options.delta > 0.0 && options.delta < 1.0))
    throw InputError("delta must lie in (0,1)");
  check_similarity(P, D);

  PolicyOutcome outcome;
  outcome.strategy = Strategy::skills_only;
  outcome.modified = P;
  for (std::size_t origin = 0; origin < P.size(); ++origin) {
    const std::vector<std::size_t> candidates = unlinked_destinations(P, origin);
    if (candidates.empty()) {
      outcome.skipped.push_back(P.occupations[origin].code);
      continue;
    }
    std::size_t chosen = candidates.front();
    for (std::size_t c : candidates)
      if (D(origin, c) > D(origin, chosen)) chosen = c;  // ties -> lowest code
    add_and_renormalize(outcome.modified, origin, chosen, options.delta);
    outcome.added_links.push_back({P.occupations[origin].code,
                                   P.occupations[chosen].code, options.delta});
  }
  attach_evaluation(outcome, P, options);
  return outcome;
}

PolicyOutcome informed_strategy(const TransitionMatrix& P, const Matrix& D,
                                const std::vector<std::optional<double>>& transferability,
                                const PolicyOptions& options) {
  if (!(options.delta > 0.0 && options.delta < 1.0))
    throw InputError("delta must lie in (0,1)");
  if (!(options.percentile > 0.0 && options.percentile < 1.0))
    throw InputError("percentile must lie in (0,1)");
  if (options.top_n < 1) throw InputError("top_n must be at least 1");
  check_similarity(P, D);
  if (transferability.size() != P.size())
    throw InputError("transferability vector does not align with the occupation set");

  // Global threshold: the requested quantile (nearest-rank) of all
  // off-diagonal pairwise similarities.
  std::vector<double> pairwise;
  for (std::size_t i = 0; i < P.size(); ++i)
    for (std::size_t j = i + 1; j < P.size(); ++j) pairwise.push_back(D(i, j));
  std::sort(pairwise.begin(), pairwise.end());
  const auto rank = static_cast<std::size_t>(std::max<long long>(
      0, std::llround(std::ceil(options.percentile * static_cast<double>(pairwise.size()))) - 1));
  const double threshold = pairwise.empty() ? 0.0 : pairwise[std::min(rank, pairwise.size() - 1)];

  PolicyOutcome outcome;
  outcome.strategy = Strategy::informed;
  outcome.modified = P;
  outcome.percentile_threshold = threshold;
  for (std::size_t origin = 0; origin < P.size(); ++origin) {
    std::vector<std::size_t> unlinked = unlinked_destinations(P, origin);
    if (unlinked.empty()) {
      outcome.skipped.push_back(P.occupations[origin].code);
      continue;
    }
    // Order by similarity (descending), then code, so the fallback and all
    // tie-breaks are deterministic.
    std::sort(unlinked.begin(), unlinked.end(), [&](std::size_t a, std::size_t b) {
      if (D(origin, a) != D(origin, b)) return D(origin, a) > D(origin, b);
      return a < b;
    });
    std::vector<std::size_t> candidates;
    for (std::size_t c : unlinked)
      if (D(origin, c) > threshold) candidates.push_back(c);
    if (candidates.empty())
      candidates.assign(unlinked.begin(),
                        unlinked.begin() + std::min<std::size_t>(
                                               unlinked.size(),
                                               static_cast<std::size_t>(options.top_n)));
    std::size_t chosen = candidates.front();
    double best_t = transferability[chosen] ? *transferability[chosen]
                                            : -std::numeric_limits<double>::infinity();
    for (std::size_t c : candidates) {
      const double t = transferability[c] ? *transferability[c]
                                          : -std::numeric_limits<double>::infinity();
      if (t > best_t) {
        best_t = t;
        chosen = c;
      }
    }
    add_and_renormalize(outcome.modified, origin, chosen, options.delta);
    outcome.added_links.push_back({P.occupations[origin].code,
                                   P.occupations[chosen].code, options.delta});
  }
  attach_evaluation(outcome, P, options);
  return outcome;
}

std::vector<double> random_walk_coverage(const TransitionMatrix& P, int steps,
                                         int n_seeds, std::uint64_t seed0,
                                         bool exclude_self_loops,
                                         const std::vector<std::size_t>* start_set) {
  if (steps < 1) throw InputError("steps must be at least 1");
  if (n_seeds < 1) throw InputError("n_seeds must be at least 1");
  const TransitionMatrix walk_matrix =
      exclude_self_loops && P.self_loops == SelfLoops::included ? strip_self_loops(P) : P;
  const std::size_t n = P.size();

  std::vector<std::size_t> starts;
  if (start_set) starts = *start_set;
  else {
    starts.resize(n);
    std::iota(starts.begin(), starts.end(), 0);
  }

  // Per-column sampling tables: prefix sums over nonzero destinations.
  std::vector<std::vector<std::pair<double, std::size_t>>> cdf(n);
  for (std::size_t j = 0; j < n; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double p = walk_matrix.probs(i, j);
      if (p > 0.0) {
        acc += p;
        cdf[j].emplace_back(acc, i);
      }
    }
  }

  std::vector<double> coverage(n_seeds, 0.0);
  std::vector<char> visited(n, 0);
  for (int s = 0; s < n_seeds; ++s) {
    std::fill(visited.begin(), visited.end(), 0);
    for (std::size_t start : starts) {
      Rng rng(seed0 ^ mix_seed(fnv1a(P.occupations[start].code),
                               static_cast<std::uint64_t>(s)));
      std::size_t at = start;
      visited[at] = 1;
      for (int step = 0; step < steps; ++step) {
        const auto& column = cdf[at];
        if (column.empty()) break;  // all-zero column: halt in place
        const double u = rng.uniform() * column.back().first;
        auto it = std::upper_bound(
            column.begin(), column.end(), u,
            [](double value, const std::pair<double, std::size_t>& entry) {
              return value < entry.first;
            });
        if (it == column.end()) --it;
        at = it->second;
        visited[at] = 1;
      }
    }
    std::size_t count = 0;
    for (char v : visited) count += v;
    coverage[s] = static_cast<double>(count) / static_cast<double>(n);
  }
  return coverage;
}

MetricStability metric_stability(const AccessTransferScores& before,
                                 const AccessTransferScores& after) {
  if (before.occupations != after.occupations)
    throw InputError("score sets cover different occupations");
  std::vector<double> a0, a1, t0, t1;
  for (std::size_t v = 0; v < before.occupations.size(); ++v) {
    if (before.accessibility[v] && after.accessibility[v]) {
      a0.push_back(*before.accessibility[v]);
      a1.push_back(*after.accessibility[v]);
    }
    if (before.transferability[v] && after.transferability[v]) {
      t0.push_back(*before.transferability[v]);
      t1.push_back(*after.transferability[v]);
    }
  }
  MetricStability stability;
  if (a0.size() >= 2) stability.rho_accessibility = spearman(a0, a1);
  if (t0.size() >= 2) stability.rho_transferability = spearman(t0, t1);
  return stability;
}

}  // namespace laborflow
