#pragma once

#include <cstdint>
#include <vector>

#include "qdsm/designs.hpp"
#include "qdsm/qcore.hpp"

namespace qdsm {

/// Measurements available on one subsystem: Theta POVMs with selection
/// weights and certified design strengths.
struct LocalMeasurements {
  std::vector<Povm> povms;
  std::vector<double> weights;
  std::vector<int> strengths;
};

/// Local measurement scheme for an N-partite system. All subsystems share
/// the same number of settings Theta and outcomes L.
struct LocalScheme {
  std::vector<LocalMeasurements> subsystems;

  int n_subsystems() const { return static_cast<int>(subsystems.size()); }
  int n_settings() const {
    return static_cast<int>(subsystems.front().povms.size());
  }
  int n_outcomes() const {
    return subsystems.front().povms.front().size();
  }
  int joint_dim() const;
};

/// Throws unless every POVM is valid, the subsystems share Theta and L,
/// and all weights are positive.
void validate_scheme(const LocalScheme& scheme);

/// Exponents a_n >= 2 with sum_n 1/a_n = 1 (within 1e-12).
struct ExponentVector {
  std::vector<int> a;
};

void validate_exponents(const ExponentVector& exps, int n_subsystems,
                        bool require_even);

/// Correlation measure J(rho) = sum_{i,theta} tr(J_{i|theta} rho) with
/// J_{i|theta} the tensor product of weighted local effects sharing the
/// outcome index.
double correlation_j(const LocalScheme& scheme, const DensityOperator& rho);

/// Shifted correlation measure: local effects are replaced by their
/// traceless parts M - (1/K) I and terms enter by absolute value.
double correlation_jtilde(const LocalScheme& scheme,
                          const DensityOperator& rho);

/// Separability bound of Theorem 3:
/// prod_n [sum_theta w^{a_n} B_{a_n,theta}]^{1/a_n}.
double theorem3_rhs(const LocalScheme& scheme, const ExponentVector& exps);

/// Separability bound of Theorem 4, with the modified IC bounds.
double theorem4_rhs(const LocalScheme& scheme, const ExponentVector& exps);

/// Modified IC bound B~_a = sum_{r=0}^{a} C(a,r) (-K)^{r-a} B_r with
/// B_0 = L, B_1 = 1 and B_r the design IC bound for r >= 2. Requires even a.
double modified_ic_bound(int L, int d, int a, int K);

/// sin(b)sin(f)|0000> + cos(b)|1100> + sin(b)cos(f)|1010>.
DensityOperator state_psi_beta_phi(double beta, double phi);

/// x |psi_f><psi_f| + (1-x) I/16 with psi_f = sin(f)|0000> + cos(f)|1111>.
DensityOperator state_rho_x_phi(double x, double phi);

/// Two-qubit isotropic state x |Phi+><Phi+| + (1-x) I/4.
DensityOperator state_isotropic(double x);

enum class StateFamily { psi_beta_phi, rho_x_phi, isotropic };
enum class Criterion { theorem3, theorem4 };

struct ScanPoint {
  double param1 = 0.0;
  double param2 = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool violated = false;
};

/// Evaluate the criterion over a parameter grid of the state family.
/// psi_beta_phi and rho_x_phi use grid1 x grid2 points over their natural
/// ranges; isotropic uses grid1 points over x in [0, 1] (param2 = 0).
std::vector<ScanPoint> detect_scan(StateFamily family,
                                   const LocalScheme& scheme,
                                   const ExponentVector& exps, int grid1,
                                   int grid2, Criterion criterion);

/// Empirical maximum of the correlation measure over sampled pure product
/// states with Bloch-sphere hill-climbing refinement (qubit factors).
/// A sound implementation never exceeds the corresponding theorem RHS.
double separable_oracle(const LocalScheme& scheme, const ExponentVector& exps,
                        int n_samples, std::uint64_t seed,
                        Criterion criterion);

/// The icosahedron 12-outcome POVM on each of n qubits, w = 1.
LocalScheme icosahedron_single_scheme(int n_qubits);

/// Two qubits: the three MUB bases on side A, their entrywise conjugates
/// on side B, w = 1.
LocalScheme mub_conjugate_scheme();

}  // namespace qdsm
