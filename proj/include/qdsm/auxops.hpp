#pragma once

#include <cstdint>
#include <vector>

#include "qdsm/designs.hpp"
#include "qdsm/qcore.hpp"
#include "qdsm/rng.hpp"

namespace qdsm {

/// Theta orthonormal bases of C^d, stored as column matrices.
struct BasisSet {
  int dim = 0;
  std::vector<Matrix> bases;

  int n_bases() const { return static_cast<int>(bases.size()); }
};

/// Throws unless every basis is orthonormal within 1e-12.
void validate_basis_set(const BasisSet& bs);

/// Multi-basis unbiasedness U = (Theta-1)(d-1)
/// - (2/Theta) sum_{a<b} sum_{i,j} (|<a_i|b_j>|^2 - 1/d)^2, in
/// [0, (Theta-1)(d-1)]; maximal exactly on mutually unbiased bases.
double unbiasedness(const BasisSet& bs);

/// Choi vector |A> = (A x I) sum_i |i>|i>*; satisfies <A|B> = tr(A^dag B).
Vector choi_vector(const Matrix& a);

struct ViewOperator {
  int order = 0;
  Matrix matrix;  // d^{2a} x d^{2a}, Hermitian PSD
};

/// Gram sum of Choi vectors of the shifted a-fold effect powers
/// M^{otimes a} - (1/L^a) I.
ViewOperator view_operator(const DsmSet& dsm, int a,
                           int size_cap = kDefaultSizeCap);

/// Largest eigenvalue by power iteration with trace shift; cross-checked
/// against a dense eigensolve when the dimension is <= 64.
double operator_norm(const Matrix& hermitian);

struct IcHighReport {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// Higher-order IC inequality: sum_theta I_{2a} <= ||G^a|| [(tr rho^2)^a
/// + (2 F_a(rho) - 1)/(d^a (1-h))].
IcHighReport high_order_ic_check(const DsmSet& dsm, const DensityOperator& rho,
                                 int a, int size_cap = kDefaultSizeCap);

/// Numerically exact maximum of sum_theta I_a over pure qubit states for
/// arbitrary projective qubit bases: Fibonacci-lattice scan plus pattern
/// search. Valid as an IC upper bound because the IC is convex in rho.
double generic_ic_bound(const std::vector<Matrix>& bases, int a);

struct TripleResult {
  double unbiasedness = 0.0;
  /// Smallest x at which the isotropic state is flagged entangled;
  /// +infinity when no x in [0, 1] is flagged.
  double x_critical = 0.0;
};

/// Theorem-3 detection of isotropic states with a given basis triple on
/// side A and its entrywise conjugates on side B (a = 2, w = 1). The first
/// grid x with a violation is refined by bisection to 1e-6.
TripleResult evaluate_basis_triple(const BasisSet& bs,
                                   const std::vector<double>& x_grid);

/// Haar-random triples of qubit bases through evaluate_basis_triple.
std::vector<TripleResult> random_bases_experiment(
    int n_sets, std::uint64_t seed, const std::vector<double>& x_grid);

/// The three qubit MUBs as a BasisSet.
BasisSet mub_triple();

/// One Haar-random orthonormal basis of C^d.
Matrix haar_random_basis(int d, SplitRng& rng);

}  // namespace qdsm
