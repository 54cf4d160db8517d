// Test-only reference implementations, kept independent of the library's
// algorithmic paths: dense linear solves instead of power iteration,
// characteristic-polynomial roots instead of deflation, exhaustive path
// enumeration instead of Dijkstra/Brandes, and direct-definition NODF and
// rank computations.
#pragma once

#include <complex>
#include <vector>

#include "laborflow/flows.hpp"
#include "laborflow/types.hpp"

namespace oracles {

/// Stationary vector via Gaussian elimination on (P - I) with the last row
/// replaced by the normalization constraint.
std::vector<double> stationary_dense(const laborflow::Matrix& P);

/// All eigenvalues via the Faddeev-LeVerrier characteristic polynomial and
/// Durand-Kerner root iteration in extended precision.
std::vector<std::complex<double>> eigenvalues_dense(const laborflow::Matrix& P);

/// Second-largest eigenvalue modulus from the full spectrum.
double lambda2_modulus_dense(const laborflow::Matrix& P);

/// Betweenness/closeness by enumerating every simple path; path lengths are
/// accumulated edge-by-edge exactly like a left-to-right walk.
struct PathCentrality {
  std::vector<double> betweenness;  // normalized by (n-1)(n-2)
  std::vector<double> closeness;
  std::vector<double> harmonic;
};
PathCentrality centrality_bruteforce(const laborflow::TransitionMatrix& Pt);

/// Spearman via midrank counting and a textbook two-pass Pearson.
double spearman_bruteforce(const std::vector<double>& x, const std::vector<double>& y);

/// NODF straight from its definition with explicit set intersections.
double nodf_bruteforce(const laborflow::BinaryGrid& M);

/// Two-pass centered least squares.
struct OlsFit {
  double alpha;
  double beta;
};
OlsFit ols_bruteforce(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace oracles
