#pragma once

#include <cstdint>

#include "qdsm/designs.hpp"

namespace qdsm {

struct SearchConfig {
  int d = 2;
  int K = 2;
  int t = 2;
  std::uint64_t seed = 0;
  int max_iters = 200000;
  double tol = 1e-9;
  int restarts = 4;
  /// Levenberg-Marquardt polish of the entrywise design residual after the
  /// gradient phase. Needed to reach certification-grade residuals; only
  /// runs when d^t is within the size cap.
  bool polish = true;
};

struct SearchResult {
  QuantumDesign design;
  double residual = 0.0;  // frame-potential gap of the returned design
  int iterations = 0;     // gradient iterations in the winning restart
  bool converged = false;
  int winning_restart = -1;
};

/// Minimize the t-th frame potential over K unit vectors in dimension d by
/// projected gradient descent with adaptive step (halve on increase, grow
/// 1.1x on decrease), fresh Haar initialization per restart. Converged iff
/// the potential gap against the Welch bound is <= tol. Non-convergence is
/// reported, not thrown.
SearchResult search_design(const SearchConfig& config);

/// Euclidean (conjugate-coordinate) gradient of the frame potential,
/// before tangent projection: g_j = 2t sum_{k != j} |s_jk|^{2(t-1)}
/// conj(s_jk) psi_k.
std::vector<Vector> frame_potential_gradient(const std::vector<Vector>& vecs,
                                             int t);

}  // namespace qdsm
