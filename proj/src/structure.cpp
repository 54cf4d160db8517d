#include "laborflow/structure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <queue>

namespace laborflow {

double probability_distance(double p) {
  const double clamped = std::min(1.0 - 1e-12, std::max(1e-12, p));
  return -std::log(clamped);
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct ShortestPaths {
  std::vector<double> dist;
  std::vector<double> sigma;             // shortest-path counts
  std::vector<std::vector<int>> pred;    // predecessors on shortest paths
  std::vector<int> settle_order;
};

struct Digraph {
  std::vector<std::vector<std::pair<int, double>>> out;  // (head, distance)
};

Digraph distance_graph(const TransitionMatrix& Pt) {
  const std::size_t n = Pt.size();
  Digraph g;
  g.out.resize(n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i)
      if (i != j && Pt.probs(i, j) > 0.0)
        g.out[j].emplace_back(static_cast<int>(i), probability_distance(Pt.probs(i, j)));
  return g;
}

ShortestPaths dijkstra_counting(const Digraph& g, int source) {
  const std::size_t n = g.out.size();
  ShortestPaths sp;
  sp.dist.assign(n, kInf);
  sp.sigma.assign(n, 0.0);
  sp.pred.assign(n, {});
  sp.dist[source] = 0.0;
  sp.sigma[source] = 1.0;

  using Entry = std::pair<double, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  std::vector<char> settled(n, 0);
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (settled[u]) continue;
    settled[u] = 1;
    sp.settle_order.push_back(u);
    for (const auto& [v, w] : g.out[u]) {
      const double candidate = d + w;
      if (candidate < sp.dist[v]) {
        sp.dist[v] = candidate;
        sp.sigma[v] = sp.sigma[u];
        sp.pred[v].assign(1, u);
        heap.emplace(candidate, v);
      } else if (candidate == sp.dist[v]) {
        sp.sigma[v] += sp.sigma[u];
        sp.pred[v].push_back(u);
      }
    }
  }
  return sp;
}

}  // namespace

std::vector<double> betweenness(const TransitionMatrix& Pt) {
  if (Pt.self_loops != SelfLoops::excluded)
    throw InputError("betweenness expects a self-loop-free matrix");
  const std::size_t n = Pt.size();
  std::vector<double> bc(n, 0.0);
  if (n < 3) return bc;

  const Digraph g = distance_graph(Pt);
  std::vector<double> delta(n);
  for (std::size_t s = 0; s < n; ++s) {
    ShortestPaths sp = dijkstra_counting(g, static_cast<int>(s));
    std::fill(delta.begin(), delta.end(), 0.0);
    for (auto it = sp.settle_order.rbegin(); it != sp.settle_order.rend(); ++it) {
      const int w = *it;
      for (int v : sp.pred[w])
        delta[v] += sp.sigma[v] / sp.sigma[w] * (1.0 + delta[w]);
      if (w != static_cast<int>(s)) bc[w] += delta[w];
    }
  }
  const double scale = static_cast<double>(n - 1) * static_cast<double>(n - 2);
  for (double& b : bc) b /= scale;
  return bc;
}

ClosenessResult closeness(const TransitionMatrix& Pt) {
  if (Pt.self_loops != SelfLoops::excluded)
    throw InputError("closeness expects a self-loop-free matrix");
  const std::size_t n = Pt.size();
  ClosenessResult result;
  result.closeness.assign(n, 0.0);
  result.harmonic.assign(n, 0.0);
  if (n < 2) return result;

  const Digraph g = distance_graph(Pt);
  for (std::size_t s = 0; s < n; ++s) {
    ShortestPaths sp = dijkstra_counting(g, static_cast<int>(s));
    double total = 0.0, inverse = 0.0;
    std::size_t reachable = 0;
    for (std::size_t v = 0; v < n; ++v) {
      if (v == s || sp.dist[v] == kInf) continue;
      total += sp.dist[v];
      inverse += 1.0 / sp.dist[v];
      ++reachable;
    }
    if (reachable > 0 && total > 0.0)
      result.closeness[s] = static_cast<double>(reachable) / total;
    result.harmonic[s] = inverse / static_cast<double>(n - 1);
  }
  return result;
}

namespace {

std::vector<double> fractional_ranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

std::optional<double> spearman(const std::vector<double>& x,
                               const std::vector<double>& y) {
  if (x.size() != y.size()) throw InputError("spearman inputs differ in length");
  if (x.size() < 2) throw InputError("spearman needs at least 2 points");
  const std::vector<double> rx = fractional_ranks(x);
  const std::vector<double> ry = fractional_ranks(y);
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;  // no rank variance
  return sxy / std::sqrt(sxx * syy);
}

double skill_similarity(const SkillMatrix& skills, std::size_t i, std::size_t j) {
  const std::size_t d = skills.skills.size();
  double dot = 0.0, ni = 0.0, nj = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    dot += skills.weights(i, k) * skills.weights(j, k);
    ni += skills.weights(i, k) * skills.weights(i, k);
    nj += skills.weights(j, k) * skills.weights(j, k);
  }
  if (ni <= 0.0) throw InputError("zero skill vector: " + skills.occupations[i].code);
  if (nj <= 0.0) throw InputError("zero skill vector: " + skills.occupations[j].code);
  return dot / (std::sqrt(ni) * std::sqrt(nj));
}

Matrix skill_similarity_matrix(const SkillMatrix& skills) {
  const std::size_t n = skills.occupations.size();
  Matrix sim(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    sim(i, i) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double s = skill_similarity(skills, i, j);
      sim(i, j) = s;
      sim(j, i) = s;
    }
  }
  return sim;
}

SkillMatrix aggregate_skills(const SkillMatrix& sources,
                             const std::vector<std::pair<std::string, std::string>>& mapping) {
  std::map<std::string, std::vector<std::size_t>> sources_of;
  for (const auto& [source, target] : mapping) {
    const auto idx = sources.index_of(source);
    if (!idx) throw InputError("mapped source not present: " + source);
    sources_of[target].push_back(*idx);
  }
  if (sources_of.empty()) throw InputError("empty skill mapping");

  SkillMatrix out;
  out.skills = sources.skills;
  for (const auto& [target, _] : sources_of) out.occupations.push_back({target, ""});
  out.weights = Matrix(out.occupations.size(), out.skills.size(), 0.0);

  std::size_t row = 0;
  for (const auto& [target, idxs] : sources_of) {
    for (std::size_t k = 0; k < out.skills.size(); ++k) {
      double sum = 0.0;
      for (std::size_t s : idxs) sum += sources.weights(s, k);
      out.weights(row, k) = sum / static_cast<double>(idxs.size());
    }
    ++row;
  }
  for (std::size_t v = 0; v < out.occupations.size(); ++v) {
    double norm = 0.0;
    for (std::size_t k = 0; k < out.skills.size(); ++k)
      norm += out.weights(v, k);
    if (norm <= 0.0) out.zero_rows.push_back(out.occupations[v].code);
  }
  return out;
}

InterIntraScores inter_intra_scores(const SkillMatrix& skills,
                                    const CommunityAssignment& communities) {
  if (communities.occupations != skills.occupations)
    throw InputError("community assignment does not cover the skill matrix");
  const std::size_t n = skills.occupations.size();

  std::vector<char> usable(n, 1);
  for (std::size_t v = 0; v < n; ++v) {
    double norm = 0.0;
    for (std::size_t k = 0; k < skills.skills.size(); ++k)
      norm += skills.weights(v, k) * skills.weights(v, k);
    usable[v] = norm > 0.0;
  }

  InterIntraScores scores;
  scores.d_intra.resize(n);
  scores.d_inter.resize(n);
  scores.d_p.resize(n);
  scores.d_r.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!usable[i]) continue;
    double intra_sum = 0.0, inter_sum = 0.0;
    std::size_t intra_n = 0, inter_n = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || !usable[j]) continue;
      const double s = skill_similarity(skills, i, j);
      if (communities.membership[i] == communities.membership[j]) {
        intra_sum += s;
        ++intra_n;
      } else {
        inter_sum += s;
        ++inter_n;
      }
    }
    if (intra_n > 0) scores.d_intra[i] = intra_sum / static_cast<double>(intra_n);
    if (inter_n > 0) scores.d_inter[i] = inter_sum / static_cast<double>(inter_n);
    if (scores.d_intra[i] && scores.d_inter[i]) {
      scores.d_p[i] = *scores.d_intra[i] * *scores.d_inter[i];
      if (*scores.d_inter[i] > 0.0)
        scores.d_r[i] = *scores.d_intra[i] / *scores.d_inter[i];
    }
  }
  return scores;
}

SizeCorrelations size_correlations(const AccessTransferScores& scores,
                                   const std::vector<double>& sizes,
                                   const std::vector<char>* filter) {
  if (sizes.size() != scores.occupations.size())
    throw InputError("sizes do not align with the occupation set");
  std::vector<double> a, sa, t, st;
  for (std::size_t v = 0; v < sizes.size(); ++v) {
    if (filter && !(*filter)[v]) continue;
    if (scores.accessibility[v]) {
      a.push_back(*scores.accessibility[v]);
      sa.push_back(sizes[v]);
    }
    if (scores.transferability[v]) {
      t.push_back(*scores.transferability[v]);
      st.push_back(sizes[v]);
    }
  }
  SizeCorrelations result;
  if (a.size() >= 2) result.rho_accessibility = spearman(a, sa);
  if (t.size() >= 2) result.rho_transferability = spearman(t, st);
  return result;
}

}  // namespace laborflow
