#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "qdsm/designs.hpp"
#include "qdsm/qcore.hpp"

namespace qdsm {

/// Sentinel for the min-entropy order.
inline constexpr double kAlphaInf = std::numeric_limits<double>::infinity();

/// Parameters of the entropic lower bounds: L outcomes per measurement,
/// IC order a >= 2, Renyi order alpha > 0 (kAlphaInf allowed), and the
/// average a-th order IC c_a in [L^{1-a}, 1].
struct BoundParams {
  int L = 2;
  int a = 2;
  double alpha = 2.0;
  double c_a = 1.0;
};

/// Throws unless L >= 2, a >= 2, alpha > 0 and c_a within
/// [L^{1-a} - 1e-12, 1 + 1e-12]. Returns c_a clamped to the closed range.
double validate_bound_params(const BoundParams& params);

/// Renyi entropy in nats: Shannon at alpha = 1, -ln max p at alpha = inf.
double renyi_entropy(const ProbabilityDistribution& p, double alpha);

/// I_a(P) = sum_i p_i^a.
double index_coincidence(const ProbabilityDistribution& p, int a);

struct PxSolution {
  double p = 0.0;
  double p_s = 0.0;
};

/// Unique root of p^a + (L-1)((1-p)/(L-1))^a = c_a on [1/L, 1], by
/// bisection to 1e-13. Endpoint inputs return exact endpoints.
PxSolution solve_px(int L, int a, double c_a);

/// The one-large/rest-equal boundary distribution (p, p_s, ..., p_s).
ProbabilityDistribution dist_px(int L, int a, double c_a);

/// Support size L' = ceil(c_a^{1/(1-a)}) with 1e-9 integer snap.
int py_support(int a, double c_a);

/// The several-equal/one-remainder boundary distribution
/// (p, ..., p, p_s) of nonzero length L' (trailing zeros omitted).
ProbabilityDistribution dist_py(int a, double c_a);

struct Theorem1Bounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// Sharp entropy range at fixed I_a: the boundary roles of P_x and P_y
/// exchange at alpha = a.
Theorem1Bounds theorem1_bounds(int L, int a, double c_a, double alpha);

/// The multi-distribution lower bound function Q_alpha(L, c_a); requires
/// alpha >= a, returns -ln p at alpha = inf.
double q_alpha(int L, int a, double c_a, double alpha);

/// Ketterer-Guehne bound alpha/(a(1-alpha)) ln c_a; alpha = 1 unsupported.
double bound_ket(int L, int a, double c_a, double alpha);

/// Rastegin bound [(alpha-a) ln p + ln c_a]/(1-alpha); alpha = 1 unsupported.
double bound_ras(int L, int a, double c_a, double alpha);

/// State-independent IC bound B_a = L^{1-a} d^a D_d^{(a)} of a
/// design-derived POVM with L outcomes.
double design_ic_bound(int L, int d, int a);

struct AverageIc {
  double value = 0.0;
  /// False when a exceeds the set's certified strength; the design identity
  /// is then no longer guaranteed.
  bool within_strength = true;
};

/// Measured average IC (1/Theta) sum_theta I_a(Born(povm_theta, rho)).
AverageIc average_ic_from_state(const DsmSet& dsm, const DensityOperator& rho,
                                int a);

struct BoundReport {
  std::optional<double> q1;     // Theorem 1 lower bound; single POVM only
  std::optional<double> q2;     // Theorem 2 (Q_alpha); alpha >= a only
  std::optional<double> q_ras;  // alpha >= a only
  std::optional<double> q_ket;  // alpha >= a only
  BoundParams params;
  double p = 0.0;
  double p_s = 0.0;
  int L_prime = 0;
  bool ordering_ok = true;
};

/// Assemble all four bounds. q1 is reported only for theta = 1 (Theorem 1
/// bounds a single distribution, not an average). Checks the ordering
/// q1 >= q2 >= q_ras >= q_ket - 1e-10 where defined.
BoundReport compare_bounds(const BoundParams& params, int theta = 1);

struct IcoBest {
  int a_star = 0;
  double value = 0.0;
};

/// Best icosahedron bound: maximizes q_alpha(2, a, 2/(a+1), alpha) over
/// a in {2..5} with a <= alpha; ties go to the smaller a.
IcoBest ico_best_bound(double alpha);

struct DiagramRow {
  enum class Kind { sample, ub, lb };
  double c = 0.0;
  double h = 0.0;
  double alpha = 0.0;
  Kind kind = Kind::sample;
};

/// IC-entropy diagram data: Dirichlet samples plus the P_x / P_y boundary
/// curves on a c-grid.
std::vector<DiagramRow> info_diagram_samples(
    int L, int a, int n_samples, std::uint64_t seed,
    const std::vector<double>& alphas, int boundary_resolution = 512);

}  // namespace qdsm
