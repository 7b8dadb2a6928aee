#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qdsm/rng.hpp"

namespace qdsm {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Largest tensor-power dimension (d^t) the dense projector paths accept.
inline constexpr int kDefaultSizeCap = 4096;

/// Finite probability distribution: nonnegative entries summing to 1
/// within 1e-12.
class ProbabilityDistribution {
 public:
  explicit ProbabilityDistribution(RealVector probs);

  const RealVector& probs() const { return probs_; }
  int size() const { return static_cast<int>(probs_.size()); }
  double operator[](int i) const { return probs_(i); }

 private:
  RealVector probs_;
};

/// Hermitian, unit-trace, positive semidefinite matrix.
class DensityOperator {
 public:
  explicit DensityOperator(Matrix m);

  /// Rank-1 projector |psi><psi| from a unit vector.
  static DensityOperator pure(const Vector& psi);
  static DensityOperator maximally_mixed(int d);

  const Matrix& matrix() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }
  double purity() const { return (m_ * m_).trace().real(); }

 private:
  Matrix m_;
};

/// Positive effects summing to the identity (within 1e-10 entrywise).
class Povm {
 public:
  Povm(int dim, std::vector<Matrix> effects,
       std::vector<std::string> labels = {});

  int dim() const { return dim_; }
  int size() const { return static_cast<int>(effects_.size()); }
  const std::vector<Matrix>& effects() const { return effects_; }
  const std::vector<std::string>& labels() const { return labels_; }

 private:
  int dim_;
  std::vector<Matrix> effects_;
  std::vector<std::string> labels_;
};

/// Kronecker product in list order.
Matrix tensor_product(const std::vector<Matrix>& operators);

/// Kronecker power A^{\otimes t}.
Matrix tensor_power(const Matrix& a, int t);
Vector tensor_power(const Vector& v, int t);

/// Born rule: probs[i] = tr(effects[i] rho). Negative float noise within
/// -1e-12 is clamped to zero; anything more negative is an error.
ProbabilityDistribution born_probabilities(const Povm& povm,
                                           const DensityOperator& rho);

/// Orthogonal projector onto the symmetric subspace of (C^d)^{\otimes t},
/// built as the average of all t! tensor-factor permutation operators.
Matrix sym_projector(int d, int t, int size_cap = kDefaultSizeCap);

/// Entry a-1 holds tr(rho^a) for a = 1..max_a.
RealVector purity_moments(const DensityOperator& rho, int max_a);

enum class FtMethod { cycle_index, projector };

/// F_t(rho) = tr(P_sym rho^{\otimes t}). The cycle_index method evaluates
/// the permutation-cycle expansion (1/t!) sum_sigma prod_c tr(rho^{|c|});
/// the projector method forms the dense operators and is subject to the
/// size cap. Both agree to 1e-10.
double f_t(const DensityOperator& rho, int t,
           FtMethod method = FtMethod::cycle_index,
           int size_cap = kDefaultSizeCap);

/// Haar-random pure state (deterministic in the seed).
DensityOperator haar_random_state(int d, std::uint64_t seed);

/// Dirichlet-weighted mixture of `rank` Haar-random pure states.
DensityOperator random_density(int d, int rank, std::uint64_t seed);

}  // namespace qdsm
