#include "laborflow/community.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "laborflow/rng.hpp"

namespace laborflow {

namespace {

struct Strengths {
  std::vector<double> out;  // per origin-role node
  std::vector<double> in;   // per destination-role node
  double total = 0.0;
};

Strengths strengths_of(const FlowCounts& flows) {
  const std::size_t n = flows.size();
  Strengths s;
  s.out.assign(n, 0.0);
  s.in.assign(n, 0.0);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t i = 0; i < n; ++i) {
      const double w = static_cast<double>(flows.counts(a, i));
      s.out[i] += w;
      s.in[a] += w;
      s.total += w;
    }
  return s;
}

void check_membership(const FlowCounts& flows, const std::vector<int>& membership) {
  if (membership.size() != flows.size())
    throw InputError("membership does not cover the occupation set");
  for (int m : membership)
    if (m < 0) throw InputError("membership contains a negative label");
}

}  // namespace

double barber_modularity(const FlowCounts& flows, const std::vector<int>& membership) {
  check_membership(flows, membership);
  const Strengths s = strengths_of(flows);
  if (s.total <= 0.0) throw InputError("flow network has no links");
  const std::size_t n = flows.size();
  const int c = 1 + *std::max_element(membership.begin(), membership.end());

  double intra = 0.0;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t i = 0; i < n; ++i)
      if (membership[i] == membership[a])
        intra += static_cast<double>(flows.counts(a, i));

  std::vector<double> out_mass(c, 0.0), in_mass(c, 0.0);
  for (std::size_t v = 0; v < n; ++v) {
    out_mass[membership[v]] += s.out[v];
    in_mass[membership[v]] += s.in[v];
  }
  double null_mass = 0.0;
  for (int k = 0; k < c; ++k) null_mass += out_mass[k] * in_mass[k] / s.total;

  return (intra - null_mass) / s.total;
}

namespace {

// One BRIM run: alternating argmax relabeling on the bipartite lift plus a
// greedy merge pass, tracking the two-role modularity per sweep.
class BrimRun {
 public:
  BrimRun(const FlowCounts& flows, const Strengths& s, int c_max)
      : n_(flows.size()), c_(c_max), b_(n_, n_, 0.0) {
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t a = 0; a < n_; ++a)
        b_(i, a) = static_cast<double>(flows.counts(a, i)) -
                   s.out[i] * s.in[a] / s.total;
    e_ = s.total;
  }

  void run(Rng& rng, int max_sweeps, std::vector<double>* sweep_q) {
    origin_label_.resize(n_);
    dest_label_.resize(n_);
    for (std::size_t v = 0; v < n_; ++v) {
      origin_label_[v] = static_cast<int>(rng.below(static_cast<std::uint64_t>(c_)));
      dest_label_[v] = static_cast<int>(rng.below(static_cast<std::uint64_t>(c_)));
    }
    sweep(max_sweeps, sweep_q);
    while (merge_best_pair()) {
      if (sweep_q) sweep_q->push_back(two_role_q());
      sweep(max_sweeps, sweep_q);
    }
  }

  double two_role_q() const {
    double q = 0.0;
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t a = 0; a < n_; ++a)
        if (origin_label_[i] == dest_label_[a]) q += b_(i, a);
    return q / e_;
  }

  const std::vector<int>& origin_labels() const { return origin_label_; }
  const std::vector<int>& dest_labels() const { return dest_label_; }

 private:
  void relabel(std::vector<int>& labels, const std::vector<int>& fixed, bool rows) {
    std::vector<double> gain(c_);
    for (std::size_t v = 0; v < n_; ++v) {
      std::fill(gain.begin(), gain.end(), 0.0);
      for (std::size_t w = 0; w < n_; ++w)
        gain[fixed[w]] += rows ? b_(v, w) : b_(w, v);
      int best = 0;
      for (int k = 1; k < c_; ++k)
        if (gain[k] > gain[best]) best = k;
      if (gain[labels[v]] == gain[best]) continue;  // keep current label on ties
      labels[v] = best;
    }
  }

  void sweep(int max_sweeps, std::vector<double>* sweep_q) {
    double q = two_role_q();
    for (int s = 0; s < max_sweeps; ++s) {
      relabel(origin_label_, dest_label_, /*rows=*/true);
      relabel(dest_label_, origin_label_, /*rows=*/false);
      const double next = two_role_q();
      if (sweep_q) sweep_q->push_back(next);
      if (next - q <= 1e-12) break;
      q = next;
    }
  }

  // Merge the community pair with the largest modularity gain, if any.
  bool merge_best_pair() {
    Matrix block(c_, c_, 0.0);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t a = 0; a < n_; ++a)
        block(origin_label_[i], dest_label_[a]) += b_(i, a);
    double best_gain = 1e-12;
    int best_k = -1, best_l = -1;
    for (int k = 0; k < c_; ++k)
      for (int l = k + 1; l < c_; ++l) {
        const double g = (block(k, l) + block(l, k)) / e_;
        if (g > best_gain) {
          best_gain = g;
          best_k = k;
          best_l = l;
        }
      }
    if (best_k < 0) return false;
    for (std::size_t v = 0; v < n_; ++v) {
      if (origin_label_[v] == best_l) origin_label_[v] = best_k;
      if (dest_label_[v] == best_l) dest_label_[v] = best_k;
    }
    return true;
  }

  std::size_t n_;
  int c_;
  Matrix b_;
  double e_ = 0.0;
  std::vector<int> origin_label_, dest_label_;
};

std::vector<int> reconcile_roles(const FlowCounts& flows,
                                 const std::vector<int>& origin_label,
                                 const std::vector<int>& dest_label) {
  const std::size_t n = flows.size();
  std::vector<int> membership(n);
  for (std::size_t v = 0; v < n; ++v) {
    const auto out = flows.out_total(v);
    const auto in = flows.in_total(v);
    membership[v] = out >= in ? origin_label[v] : dest_label[v];
  }
  return membership;
}

int compact_labels(std::vector<int>& membership) {
  std::vector<int> remap(1 + *std::max_element(membership.begin(), membership.end()), -1);
  int next = 0;
  for (int& m : membership) {
    if (remap[m] < 0) remap[m] = next++;
    m = remap[m];
  }
  return next;
}

// Single-node relabeling sweeps on the reconciled membership: move a node to
// the community that maximizes the shared-label modularity, repeat until no
// move helps. Uses incremental gains, so a sweep costs O(n^2).
void refine_reconciled(const FlowCounts& flows, const Strengths& s,
                       std::vector<int>& membership) {
  const std::size_t n = flows.size();
  const int c = 1 + *std::max_element(membership.begin(), membership.end());
  std::vector<double> out_mass(c, 0.0), in_mass(c, 0.0);
  for (std::size_t v = 0; v < n; ++v) {
    out_mass[membership[v]] += s.out[v];
    in_mass[membership[v]] += s.in[v];
  }
  std::vector<double> flow_to(c), flow_from(c);
  for (int sweep = 0; sweep < 100; ++sweep) {
    bool moved = false;
    for (std::size_t v = 0; v < n; ++v) {
      const int from = membership[v];
      std::fill(flow_to.begin(), flow_to.end(), 0.0);
      std::fill(flow_from.begin(), flow_from.end(), 0.0);
      for (std::size_t w = 0; w < n; ++w) {
        if (w == v) continue;
        flow_to[membership[w]] += static_cast<double>(flows.counts(w, v));
        flow_from[membership[w]] += static_cast<double>(flows.counts(v, w));
      }
      // Strength products with v removed from its community.
      const double out_rest = out_mass[from] - s.out[v];
      const double in_rest = in_mass[from] - s.in[v];
      int best = from;
      double best_gain = 1e-12;
      for (int k = 0; k < c; ++k) {
        if (k == from) continue;
        const double intra_gain =
            flow_to[k] + flow_from[k] - flow_to[from] - flow_from[from];
        const double null_now = out_mass[from] * in_mass[from] +
                                out_mass[k] * in_mass[k];
        const double null_then = out_rest * in_rest +
                                 (out_mass[k] + s.out[v]) * (in_mass[k] + s.in[v]);
        const double gain = (intra_gain - (null_then - null_now) / s.total) / s.total;
        if (gain > best_gain) {
          best_gain = gain;
          best = k;
        }
      }
      if (best != from) {
        out_mass[from] -= s.out[v];
        in_mass[from] -= s.in[v];
        out_mass[best] += s.out[v];
        in_mass[best] += s.in[v];
        membership[v] = best;
        moved = true;
      }
    }
    if (!moved) break;
  }
}

// Role reconciliation can leave a partition whose shared-label modularity is
// improvable by fusing communities (the two-role optimum may split roles in
// ways a single label per occupation cannot express). Greedily merge pairs
// while the reconciled modularity gains.
void merge_reconciled(const FlowCounts& flows, const Strengths& s,
                      std::vector<int>& membership) {
  const std::size_t n = flows.size();
  int c = 1 + *std::max_element(membership.begin(), membership.end());
  while (c > 1) {
    std::vector<double> out_mass(c, 0.0), in_mass(c, 0.0);
    Matrix w(c, c, 0.0);
    for (std::size_t v = 0; v < n; ++v) {
      out_mass[membership[v]] += s.out[v];
      in_mass[membership[v]] += s.in[v];
    }
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t i = 0; i < n; ++i)
        w(membership[i], membership[a]) += static_cast<double>(flows.counts(a, i));

    double best_gain = 1e-12;
    int best_k = -1, best_l = -1;
    for (int k = 0; k < c; ++k)
      for (int l = k + 1; l < c; ++l) {
        const double gain =
            (w(k, l) + w(l, k) -
             (out_mass[k] * in_mass[l] + out_mass[l] * in_mass[k]) / s.total) /
            s.total;
        if (gain > best_gain) {
          best_gain = gain;
          best_k = k;
          best_l = l;
        }
      }
    if (best_k < 0) break;
    for (int& m : membership)
      if (m == best_l) m = best_k;
    c = compact_labels(membership);
  }
}

}  // namespace

CommunityAssignment brim(const FlowCounts& flows, const BrimOptions& options,
                         BrimTrace* trace) {
  if (options.c_max < 1) throw InputError("c_max must be at least 1");
  const Strengths s = strengths_of(flows);
  if (s.total <= 0.0) throw InputError("flow network has no links");

  CommunityAssignment best;
  best.occupations = flows.occupations;
  best.modularity = -std::numeric_limits<double>::infinity();

  BrimRun run(flows, s, options.c_max);
  for (int r = 0; r < options.restarts; ++r) {
    Rng rng(mix_seed(options.seed, static_cast<std::uint64_t>(r)));
    std::vector<double> sweep_q;
    run.run(rng, options.max_sweeps, trace ? &sweep_q : nullptr);
    if (trace) trace->sweep_q.push_back(std::move(sweep_q));

    std::vector<int> membership =
        reconcile_roles(flows, run.origin_labels(), run.dest_labels());
    compact_labels(membership);
    refine_reconciled(flows, s, membership);
    merge_reconciled(flows, s, membership);
    refine_reconciled(flows, s, membership);
    const int n_comm = compact_labels(membership);
    const double q = barber_modularity(flows, membership);
    if (q > best.modularity) {
      best.membership = std::move(membership);
      best.modularity = q;
      best.n_communities = n_comm;
    }
  }
  return best;
}

InterCommunityShare inter_community_share(const TransitionMatrix& P,
                                          const CommunityAssignment& communities) {
  if (communities.occupations != P.occupations)
    throw InputError("community assignment does not cover the occupation set");
  const std::size_t n = P.size();
  const std::vector<int>& m = communities.membership;

  InterCommunityShare result;
  result.outside_share.assign(n, 0.0);
  double off_diag = 0.0, cross = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double col_off = 0.0, col_cross = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == j) continue;
      col_off += P.probs(i, j);
      if (m[i] != m[j]) col_cross += P.probs(i, j);
    }
    off_diag += col_off;
    cross += col_cross;
    result.outside_share[j] = col_off > 0.0 ? col_cross / col_off : 0.0;
  }
  result.inter_share = off_diag > 0.0 ? cross / off_diag : 0.0;
  return result;
}

}  // namespace laborflow
