#include "laborflow/complexity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace laborflow {

namespace {

// Rank permutation with index tie-break, used to detect rank stabilization.
std::vector<std::size_t> rank_order(const std::vector<double>& values,
                                    const std::vector<char>& defined) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (defined[i]) idx.push_back(i);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (values[a] != values[b]) return values[a] > values[b];
    return a < b;
  });
  return idx;
}

}  // namespace

AccessTransferScores fitness_complexity(const TransitionMatrix& Pt,
                                        std::size_t n_iter,
                                        FitnessComplexityTrace* trace) {
  if (Pt.self_loops != SelfLoops::excluded)
    throw InputError("fitness_complexity expects a self-loop-free matrix");
  if (n_iter < 1) throw InputError("n_iter must be at least 1");
  const std::size_t n = Pt.size();
  if (n == 0) throw InputError("empty transition matrix");

  AccessTransferScores scores;
  scores.occupations = Pt.occupations;
  scores.iterations = n_iter;

  // Occupations with no inflow get no accessibility score; occupations with
  // no outflow get no transferability score. They stay in the matrix in
  // their other role.
  std::vector<char> has_in(n, 0), has_out(n, 0);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i)
      if (Pt.probs(i, j) > 0.0) {
        has_in[i] = 1;
        has_out[j] = 1;
      }
  for (std::size_t v = 0; v < n; ++v) {
    if (!has_in[v]) scores.no_inflow.push_back(Pt.occupations[v].code);
    if (!has_out[v]) scores.no_outflow.push_back(Pt.occupations[v].code);
  }
  std::size_t n_f = 0, n_q = 0;
  for (std::size_t v = 0; v < n; ++v) {
    n_f += has_in[v];
    n_q += has_out[v];
  }
  if (n_f == 0 || n_q == 0)
    throw NumericError("no occupation has both ends of a transition");

  std::vector<double> f(n, 0.0), q(n, 0.0);
  for (std::size_t v = 0; v < n; ++v) {
    if (has_in[v]) f[v] = 1.0 / static_cast<double>(n_f);
    if (has_out[v]) q[v] = 1.0 / static_cast<double>(n_q);
  }

  std::vector<std::size_t> f_rank = rank_order(f, has_in);
  std::vector<std::size_t> q_rank = rank_order(q, has_out);
  std::size_t last_rank_change = 0;

  std::vector<double> f_next(n), q_next(n);
  for (std::size_t it = 1; it <= n_iter; ++it) {
    // F~(i) = sum_j P(i,j) Q(j); origins without a score contribute nothing.
    double f_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!has_in[i]) {
        f_next[i] = 0.0;
        continue;
      }
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (has_out[j] && Pt.probs(i, j) > 0.0) s += Pt.probs(i, j) * q[j];
      f_next[i] = s;
      f_sum += s;
    }
    // Q~(j) = 1 / sum_i P(i,j) / F(i); destinations without a score are
    // skipped, i.e. treated as imposing no difficulty.
    double q_sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (!has_out[j]) {
        q_next[j] = 0.0;
        continue;
      }
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        if (has_in[i] && Pt.probs(i, j) > 0.0) s += Pt.probs(i, j) / f[i];
      q_next[j] = s > 0.0 ? 1.0 / s : 0.0;
      q_sum += q_next[j];
    }

    for (std::size_t v = 0; v < n; ++v) {
      if (has_in[v]) f[v] = f_next[v] / f_sum;
      if (has_out[v]) q[v] = q_next[v] / q_sum;
    }
    if (trace) {
      double sf = 0.0, sq = 0.0;
      for (std::size_t v = 0; v < n; ++v) {
        if (has_in[v]) sf += f[v];
        if (has_out[v]) sq += q[v];
      }
      trace->sum_accessibility.push_back(sf);
      trace->sum_complexity.push_back(sq);
    }

    std::vector<std::size_t> f_rank_new = rank_order(f, has_in);
    std::vector<std::size_t> q_rank_new = rank_order(q, has_out);
    if (f_rank_new != f_rank || q_rank_new != q_rank) last_rank_change = it;
    f_rank = std::move(f_rank_new);
    q_rank = std::move(q_rank_new);
  }

  scores.rank_stable_at = last_rank_change;
  scores.converged = last_rank_change < n_iter;

  scores.accessibility.resize(n);
  scores.complexity.resize(n);
  scores.transferability.resize(n);
  for (std::size_t v = 0; v < n; ++v) {
    if (has_in[v]) scores.accessibility[v] = f[v];
    if (has_out[v]) {
      scores.complexity[v] = q[v];
      scores.transferability[v] = 1.0 / q[v];
    }
  }
  return scores;
}

MeanShiftResult mean_shift_1d(const std::vector<double>& values, double bandwidth) {
  if (values.size() < 2) throw InputError("mean-shift needs at least 2 values");
  if (!(bandwidth > 0.0)) throw InputError("bandwidth must be positive");
  for (double v : values)
    if (!(v > 0.0)) throw InputError("mean-shift values must be positive");

  const std::size_t n = values.size();
  std::vector<double> logs(n);
  for (std::size_t i = 0; i < n; ++i) logs[i] = std::log10(values[i]);
  const double radius = bandwidth / 2.0;

  // Iterate every point to its mode under the flat kernel.
  std::vector<double> point_mode(n);
  for (std::size_t i = 0; i < n; ++i) {
    double m = logs[i];
    for (int it = 0; it < 10000; ++it) {
      double sum = 0.0;
      std::size_t count = 0;
      for (double y : logs)
        if (std::abs(y - m) <= radius) {
          sum += y;
          ++count;
        }
      const double next = sum / static_cast<double>(count);
      const double shift = std::abs(next - m);
      m = next;
      if (shift < 1e-7) break;
    }
    point_mode[i] = m;
  }

  // Merge modes closer than half a bandwidth.
  std::vector<double> modes_log;
  std::vector<int> cluster_of(n, -1);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return point_mode[a] < point_mode[b]; });
  for (std::size_t k : order) {
    int found = -1;
    for (std::size_t c = 0; c < modes_log.size(); ++c)
      if (std::abs(point_mode[k] - modes_log[c]) <= radius) {
        found = static_cast<int>(c);
        break;
      }
    if (found < 0) {
      modes_log.push_back(point_mode[k]);
      found = static_cast<int>(modes_log.size()) - 1;
    }
    cluster_of[k] = found;
  }

  MeanShiftResult result;
  result.cluster_of = cluster_of;
  result.cluster_sizes.assign(modes_log.size(), 0);
  for (int c : cluster_of) ++result.cluster_sizes[c];
  for (double m : modes_log) result.modes.push_back(std::pow(10.0, m));

  if (modes_log.size() >= 2) {
    // Two largest clusters; ties resolved toward the lower mode.
    std::vector<std::size_t> by_size(modes_log.size());
    std::iota(by_size.begin(), by_size.end(), 0);
    std::sort(by_size.begin(), by_size.end(), [&](std::size_t a, std::size_t b) {
      if (result.cluster_sizes[a] != result.cluster_sizes[b])
        return result.cluster_sizes[a] > result.cluster_sizes[b];
      return modes_log[a] < modes_log[b];
    });
    std::size_t lo = by_size[0], hi = by_size[1];
    if (modes_log[lo] > modes_log[hi]) std::swap(lo, hi);

    double lower_edge = -std::numeric_limits<double>::infinity();
    double upper_edge = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (cluster_of[i] == static_cast<int>(lo))
        lower_edge = std::max(lower_edge, logs[i]);
      if (cluster_of[i] == static_cast<int>(hi))
        upper_edge = std::min(upper_edge, logs[i]);
    }
    const double mid = (lower_edge + upper_edge) / 2.0;
    result.threshold_log10 = mid;
    result.threshold = std::pow(10.0, mid);
  }
  return result;
}

const char* taxonomy_name(Taxonomy t) {
  switch (t) {
    case Taxonomy::Hub: return "Hub";
    case Taxonomy::Condenser: return "Condenser";
    case Taxonomy::Diffuser: return "Diffuser";
    case Taxonomy::Channel: return "Channel";
  }
  return "?";
}

std::optional<Taxonomy> taxonomy_from_name(std::string_view name) {
  if (name == "Hub") return Taxonomy::Hub;
  if (name == "Condenser") return Taxonomy::Condenser;
  if (name == "Diffuser") return Taxonomy::Diffuser;
  if (name == "Channel") return Taxonomy::Channel;
  return std::nullopt;
}

TaxonomyLabels classify_taxonomy(const AccessTransferScores& scores,
                                 double theta_A, double theta_T) {
  if (!(theta_A > 0.0) || !(theta_T > 0.0))
    throw InputError("taxonomy thresholds must be positive");
  TaxonomyLabels labels;
  labels.occupations = scores.occupations;
  labels.theta_A = theta_A;
  labels.theta_T = theta_T;
  labels.labels.resize(scores.occupations.size());
  for (std::size_t v = 0; v < scores.occupations.size(); ++v) {
    if (!scores.accessibility[v] || !scores.transferability[v]) continue;
    const bool high_a = *scores.accessibility[v] >= theta_A;
    const bool high_t = *scores.transferability[v] >= theta_T;
    labels.labels[v] = high_a ? (high_t ? Taxonomy::Hub : Taxonomy::Condenser)
                              : (high_t ? Taxonomy::Diffuser : Taxonomy::Channel);
  }
  return labels;
}

namespace {

// Sum of pair contributions along one axis (rows when `rows` is true).
double nodf_axis(const BinaryGrid& M, bool rows) {
  const std::size_t n = rows ? M.rows() : M.cols();
  const std::size_t m = rows ? M.cols() : M.rows();
  auto at = [&](std::size_t line, std::size_t k) {
    return rows ? M(line, k) : M(k, line);
  };
  std::vector<std::size_t> fill(n, 0);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t k = 0; k < m; ++k)
      if (at(a, k)) ++fill[a];

  double sum = 0.0;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b) continue;
      if (fill[a] <= fill[b] || fill[b] == 0) continue;  // needs decreasing fill
      std::size_t overlap = 0;
      for (std::size_t k = 0; k < m; ++k)
        if (at(a, k) && at(b, k)) ++overlap;
      sum += 100.0 * static_cast<double>(overlap) / static_cast<double>(fill[b]);
    }
  return sum;
}

}  // namespace

double nodf(const BinaryGrid& M) {
  const std::size_t r = M.rows(), c = M.cols();
  if (r < 2 && c < 2) return 0.0;
  const double pairs = static_cast<double>(r * (r - 1)) / 2.0 +
                       static_cast<double>(c * (c - 1)) / 2.0;
  if (pairs <= 0.0) return 0.0;
  return (nodf_axis(M, true) + nodf_axis(M, false)) / pairs;
}

BinaryGrid binarize_for_nestedness(const TransitionMatrix& Pt, double cutoff) {
  if (!(cutoff > 0.0)) throw InputError("cutoff must be positive");
  BinaryGrid b(Pt.probs.rows(), Pt.probs.cols(), 0);
  for (std::size_t i = 0; i < Pt.probs.rows(); ++i)
    for (std::size_t j = 0; j < Pt.probs.cols(); ++j)
      b(i, j) = Pt.probs(i, j) > cutoff ? 1 : 0;
  return b;
}

NestedOrdering nested_ordering(const AccessTransferScores& scores) {
  const std::size_t n = scores.occupations.size();
  NestedOrdering ordering;
  ordering.row_order.resize(n);
  ordering.col_order.resize(n);
  std::iota(ordering.row_order.begin(), ordering.row_order.end(), 0);
  std::iota(ordering.col_order.begin(), ordering.col_order.end(), 0);

  auto code = [&](std::size_t v) -> const std::string& {
    return scores.occupations[v].code;
  };
  std::stable_sort(ordering.row_order.begin(), ordering.row_order.end(),
                   [&](std::size_t a, std::size_t b) {
                     const auto& fa = scores.accessibility[a];
                     const auto& fb = scores.accessibility[b];
                     if (fa.has_value() != fb.has_value()) return fa.has_value();
                     if (fa && fb && *fa != *fb) return *fa > *fb;
                     return code(a) < code(b);
                   });
  std::stable_sort(ordering.col_order.begin(), ordering.col_order.end(),
                   [&](std::size_t a, std::size_t b) {
                     const auto& ta = scores.transferability[a];
                     const auto& tb = scores.transferability[b];
                     if (ta.has_value() != tb.has_value()) return ta.has_value();
                     if (ta && tb && *ta != *tb) return *ta < *tb;
                     return code(a) < code(b);
                   });
  return ordering;
}

PerBlockNodf per_block_nodf(const BinaryGrid& M, const CommunityAssignment& communities) {
  if (M.rows() != communities.membership.size() || !M.square())
    throw InputError("matrix does not align with the community assignment");
  PerBlockNodf result;
  result.per_community.resize(communities.n_communities);
  double sum = 0.0;
  std::size_t defined = 0;
  for (int c = 0; c < communities.n_communities; ++c) {
    std::vector<std::size_t> members;
    for (std::size_t v = 0; v < communities.membership.size(); ++v)
      if (communities.membership[v] == c) members.push_back(v);
    if (members.size() < 2) continue;  // undefined for singletons
    BinaryGrid sub(members.size(), members.size(), 0);
    for (std::size_t a = 0; a < members.size(); ++a)
      for (std::size_t b = 0; b < members.size(); ++b)
        sub(a, b) = M(members[a], members[b]);
    const double value = nodf(sub);
    result.per_community[c] = value;
    sum += value;
    ++defined;
  }
  if (defined > 0) result.mean = sum / static_cast<double>(defined);
  return result;
}

ConfusionMatrix taxonomy_confusion(const TaxonomyLabels& a, const TaxonomyLabels& b) {
  if (a.occupations != b.occupations) {
    std::set<std::string> in_a, in_b;
    for (const auto& o : a.occupations) in_a.insert(o.code);
    for (const auto& o : b.occupations) in_b.insert(o.code);
    std::string diff;
    for (const auto& c : in_a)
      if (!in_b.count(c)) diff += " -" + c;
    for (const auto& c : in_b)
      if (!in_a.count(c)) diff += " +" + c;
    throw InputError("occupation sets differ:" + diff);
  }
  ConfusionMatrix cm;
  for (std::size_t v = 0; v < a.occupations.size(); ++v) {
    if (!a.labels[v] || !b.labels[v]) continue;
    ++cm.counts[static_cast<int>(*a.labels[v])][static_cast<int>(*b.labels[v])];
    ++cm.total;
  }
  return cm;
}

}  // namespace laborflow
