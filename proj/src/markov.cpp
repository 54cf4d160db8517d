#include "laborflow/markov.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

namespace laborflow {

namespace {

std::vector<double> multiply(const Matrix& P, const std::vector<double>& x) {
  const std::size_t n = P.rows();
  std::vector<double> y(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double xj = x[j];
    if (xj == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) y[i] += P(i, j) * xj;
  }
  return y;
}

// Iterative Tarjan SCC over the support graph, then keep the classes with no
// outgoing edges (the closed communicating classes of the chain).
std::vector<std::vector<std::string>> closed_classes_of(const TransitionMatrix& P) {
  const std::size_t n = P.size();
  std::vector<std::vector<int>> adj(n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i)
      if (i != j && P.probs(i, j) > 0.0) adj[j].push_back(static_cast<int>(i));

  std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
  std::vector<int> stack, call_node, call_edge;
  std::vector<char> on_stack(n, 0);
  int next_index = 0, n_comp = 0;

  for (std::size_t start = 0; start < n; ++start) {
    if (index[start] >= 0) continue;
    call_node.push_back(static_cast<int>(start));
    call_edge.push_back(0);
    index[start] = low[start] = next_index++;
    stack.push_back(static_cast<int>(start));
    on_stack[start] = 1;
    while (!call_node.empty()) {
      const int v = call_node.back();
      if (call_edge.back() < static_cast<int>(adj[v].size())) {
        const int w = adj[v][call_edge.back()++];
        if (index[w] < 0) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = 1;
          call_node.push_back(w);
          call_edge.push_back(0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
      } else {
        if (low[v] == index[v]) {
          int w;
          do {
            w = stack.back();
            stack.pop_back();
            on_stack[w] = 0;
            comp[w] = n_comp;
          } while (w != v);
          ++n_comp;
        }
        call_node.pop_back();
        call_edge.pop_back();
        if (!call_node.empty())
          low[call_node.back()] = std::min(low[call_node.back()], low[v]);
      }
    }
  }

  std::vector<char> has_exit(n_comp, 0);
  for (std::size_t j = 0; j < n; ++j)
    for (int i : adj[j])
      if (comp[i] != comp[j]) has_exit[comp[j]] = 1;

  std::vector<std::vector<std::string>> closed;
  for (int c = 0; c < n_comp; ++c) {
    if (has_exit[c]) continue;
    std::vector<std::string> members;
    for (std::size_t v = 0; v < n; ++v)
      if (comp[v] == c) members.push_back(P.occupations[v].code);
    std::sort(members.begin(), members.end());
    closed.push_back(std::move(members));
  }
  std::sort(closed.begin(), closed.end());
  return closed;
}

}  // namespace

StationaryResult stationary_distribution(const TransitionMatrix& P, double tol,
                                         std::size_t max_iter) {
  const std::size_t n = P.size();
  if (n == 0) throw InputError("empty transition matrix");

  StationaryResult result;
  std::vector<double> x(n, 1.0 / static_cast<double>(n));
  for (std::size_t it = 0; it < max_iter; ++it) {
    std::vector<double> y = multiply(P.probs, x);
    double diff = 0.0;
    for (std::size_t i = 0; i < n; ++i) diff = std::max(diff, std::abs(y[i] - x[i]));
    x = std::move(y);
    result.iterations = it + 1;
    if (diff < tol) {
      result.converged = true;
      break;
    }
  }
  double sum = 0.0;
  for (double v : x) sum += v;
  if (sum > 0.0)
    for (double& v : x) v /= sum;
  result.distribution = std::move(x);
  result.closed_classes = closed_classes_of(P);
  return result;
}

namespace {

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

SpectralGapResult spectral_gap(const TransitionMatrix& P, double tol,
                               std::size_t max_iter) {
  const std::size_t n = P.size();
  if (n == 0) throw InputError("empty transition matrix");

  SpectralGapResult result;
  if (n == 1) {
    result.lambda2_modulus = 0.0;
    result.halftime = 1.0;
    result.converged = true;
    return result;
  }

  // Deflate the Perron root: W = P - xbar * 1^T has the spectrum of P with
  // the leading eigenvalue 1 replaced by 0 (the all-ones vector is the left
  // eigenvector of a column-stochastic matrix).
  const StationaryResult stat = stationary_distribution(P, tol, max_iter);
  const std::vector<double>& xbar = stat.distribution;
  auto apply_deflated = [&](const std::vector<double>& v) {
    std::vector<double> y = multiply(P.probs, v);
    double mass = 0.0;
    for (double x : v) mass += x;
    for (std::size_t i = 0; i < n; ++i) y[i] -= xbar[i] * mass;
    return y;
  };

  // Power iteration on the deflated matrix. A rank-1 residual test catches a
  // real simple dominant eigenvalue; a two-term recurrence fit catches pairs
  // of equal modulus (complex conjugates or +/- pairs).
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = 1.0 + static_cast<double>(i % 7) / 8.0 - (i % 3 == 0 ? 0.4 : 0.0);
  {
    const double s = norm2(v);
    for (double& x : v) x /= s;
  }

  double modulus = 0.0;
  for (std::size_t it = 0; it < max_iter; ++it) {
    std::vector<double> w1 = apply_deflated(v);
    const double n1 = norm2(w1);
    if (n1 < 1e-300) {
      // Deflated operator annihilated the vector: remaining spectrum is 0.
      modulus = 0.0;
      result.converged = true;
      break;
    }

    // Rank-1 test: w1 ~ mu * v.
    double mu = 0.0;
    for (std::size_t i = 0; i < n; ++i) mu += v[i] * w1[i];
    double resid1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = w1[i] - mu * v[i];
      resid1 += r * r;
    }
    resid1 = std::sqrt(resid1);
    if (resid1 <= tol * std::max(1.0, n1)) {
      modulus = std::abs(mu);
      result.converged = true;
      break;
    }

    // Rank-2 test: w2 ~ a * w1 + b * v, dominant pair = roots of
    // z^2 - a z - b.
    std::vector<double> w2 = apply_deflated(w1);
    double s11 = 0.0, s10 = 0.0, s00 = 0.0, r1 = 0.0, r0 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      s11 += w1[i] * w1[i];
      s10 += w1[i] * v[i];
      s00 += v[i] * v[i];
      r1 += w2[i] * w1[i];
      r0 += w2[i] * v[i];
    }
    const double det = s11 * s00 - s10 * s10;
    if (det > 1e-30) {
      const double a = (r1 * s00 - r0 * s10) / det;
      const double b = (r0 * s11 - r1 * s10) / det;
      double resid2 = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double r = w2[i] - a * w1[i] - b * v[i];
        resid2 += r * r;
      }
      resid2 = std::sqrt(resid2);
      const std::complex<double> disc =
          std::sqrt(std::complex<double>(a * a + 4.0 * b, 0.0));
      const double root = std::max(std::abs((a + disc) / 2.0),
                                   std::abs((a - disc) / 2.0));
      modulus = root;
      if (resid2 <= tol * std::max(1.0, norm2(w2))) {
        result.converged = true;
        break;
      }
    } else {
      modulus = std::abs(mu);
    }

    for (double& x : w1) x /= n1;
    v = std::move(w1);
  }

  result.lambda2_modulus = std::min(modulus, 1.0);
  if (result.lambda2_modulus >= 1.0 - 1e-12) {
    result.lambda2_modulus = std::max(result.lambda2_modulus, 0.0);
    result.halftime = std::numeric_limits<double>::infinity();
  } else {
    result.halftime = 1.0 / (1.0 - result.lambda2_modulus);
  }
  return result;
}

SteadyStateReport deviation_report(const std::vector<double>& observed_shares,
                                   const TransitionMatrix& P) {
  const std::size_t n = P.size();
  if (observed_shares.size() != n)
    throw InputError("observed shares do not align with the occupation set");
  double sum = 0.0;
  for (double v : observed_shares) sum += v;
  if (std::abs(sum - 1.0) > 1e-9)
    throw InputError("observed shares must sum to 1");

  SteadyStateReport report;
  const StationaryResult stat = stationary_distribution(P);
  const SpectralGapResult gap = spectral_gap(P);
  report.stationary = stat.distribution;
  report.stationary_converged = stat.converged;
  report.gap_converged = gap.converged;
  report.closed_classes = stat.closed_classes;
  report.lambda2_modulus = gap.lambda2_modulus;
  report.halftime = gap.halftime;

  report.deviations_pct.resize(n);
  std::size_t defined = 0, exceeding = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double xbar = report.stationary[i];
    if (xbar <= 0.0) continue;
    const double dev = 100.0 * (observed_shares[i] - xbar) / xbar;
    report.deviations_pct[i] = dev;
    ++defined;
    if (std::abs(dev) > 10.0) ++exceeding;
  }
  report.share_exceeding_10pct =
      defined > 0 ? static_cast<double>(exceeding) / static_cast<double>(defined)
                  : 0.0;
  return report;
}

}  // namespace laborflow
