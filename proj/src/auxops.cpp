#include "qdsm/auxops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "qdsm/entdetect.hpp"
#include "qdsm/eur.hpp"

namespace qdsm {

void validate_basis_set(const BasisSet& bs) {
  if (bs.dim < 2) throw std::invalid_argument("BasisSet: dim must be >= 2");
  if (bs.bases.empty()) throw std::invalid_argument("BasisSet: no bases");
  for (std::size_t b = 0; b < bs.bases.size(); ++b) {
    const Matrix& m = bs.bases[b];
    if (m.rows() != bs.dim || m.cols() != bs.dim) {
      throw std::invalid_argument("BasisSet: basis " + std::to_string(b) +
                                  " has wrong shape");
    }
    double dev = (m.adjoint() * m - Matrix::Identity(bs.dim, bs.dim))
                     .cwiseAbs()
                     .maxCoeff();
    if (dev > 1e-12) {
      throw std::invalid_argument("BasisSet: basis " + std::to_string(b) +
                                  " not orthonormal (deviation " +
                                  std::to_string(dev) + ")");
    }
  }
}

double unbiasedness(const BasisSet& bs) {
  validate_basis_set(bs);
  const int n_bases = bs.n_bases();
  if (n_bases < 2) {
    throw std::invalid_argument("unbiasedness: need at least two bases");
  }
  const int d = bs.dim;
  double penalty = 0.0;
  for (int a = 0; a < n_bases; ++a) {
    for (int b = a + 1; b < n_bases; ++b) {
      Matrix overlaps = bs.bases[a].adjoint() * bs.bases[b];
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
          double dev = std::norm(overlaps(i, j)) - 1.0 / d;
          penalty += dev * dev;
        }
      }
    }
  }
  return (n_bases - 1) * (d - 1) - 2.0 / n_bases * penalty;
}

Vector choi_vector(const Matrix& a) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("choi_vector: matrix must be square");
  }
  const Eigen::Index d = a.rows();
  Vector v(d * d);
  // (A x I) sum_i |i>|i>* lays A out row-major.
  for (Eigen::Index i = 0; i < d; ++i) {
    v.segment(i * d, d) = a.row(i).transpose();
  }
  return v;
}

ViewOperator view_operator(const DsmSet& dsm, int a, int size_cap) {
  if (a < 2) throw std::invalid_argument("view_operator: a must be >= 2");
  if (dsm.povms.empty()) {
    throw std::invalid_argument("view_operator: empty DSM set");
  }
  const int d = dsm.povms.front().dim();
  const double dim_2a = std::pow(static_cast<double>(d), 2 * a);
  if (dim_2a > static_cast<double>(size_cap)) {
    throw std::length_error("view_operator: d^{2a} = " +
                            std::to_string(dim_2a) + " exceeds size cap");
  }
  const int dim_a = static_cast<int>(std::pow(static_cast<double>(d), a) + 0.5);
  const int l = dsm.outcomes_per_povm;
  const double shift = std::pow(static_cast<double>(l), -a);

  Matrix g = Matrix::Zero(dim_a * dim_a, dim_a * dim_a);
  for (const Povm& povm : dsm.povms) {
    for (const Matrix& effect : povm.effects()) {
      Matrix shifted = tensor_power(effect, a) -
                       shift * Matrix::Identity(dim_a, dim_a);
      Vector v = choi_vector(shifted);
      g.noalias() += v * v.adjoint();
    }
  }
  g = 0.5 * (g + Matrix(g.adjoint()));
  return {a, std::move(g)};
}

double operator_norm(const Matrix& hermitian) {
  if (hermitian.rows() != hermitian.cols() || hermitian.rows() == 0) {
    throw std::invalid_argument("operator_norm: matrix must be square");
  }
  double herm_dev = (hermitian - hermitian.adjoint()).cwiseAbs().maxCoeff();
  if (herm_dev > 1e-10) {
    throw std::invalid_argument("operator_norm: matrix not Hermitian");
  }
  const Eigen::Index n = hermitian.rows();
  // A trace-only shift leaves the most-negative eigenvalue dominant for
  // indefinite matrices with small trace, so anchor the shift at the
  // Frobenius norm: the shifted operator is then positive semidefinite and
  // its dominant eigenvalue is lambda_max + shift.
  const double shift =
      hermitian.norm() + std::abs(hermitian.trace().real());
  if (shift == 0.0) return 0.0;  // the zero matrix
  Matrix shifted = hermitian + shift * Matrix::Identity(n, n);

  SplitRng rng(0x9d5f0c3a2e7b11ULL);
  Vector v = rng.haar_vector(static_cast<int>(n));
  double lambda = 0.0;
  bool converged = false;
  for (long iter = 0; iter < 100000; ++iter) {
    Vector w = shifted * v;
    double norm = w.norm();
    if (norm == 0.0) {  // v landed in the kernel; restart direction
      v = rng.haar_vector(static_cast<int>(n));
      continue;
    }
    v = w / norm;
    Vector bv = shifted * v;
    lambda = (v.adjoint() * bv)(0).real();
    // Hermitian residual bound: some eigenvalue lies within ||Bv - mu v||.
    if ((bv - lambda * v).norm() <= 1e-11 * std::abs(lambda)) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw std::runtime_error("operator_norm: power iteration did not converge");
  }
  double result = lambda - shift;
  if (n <= 64) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian, Eigen::EigenvaluesOnly);
    double dense = es.eigenvalues().maxCoeff();
    if (std::abs(result - dense) > 1e-9 * std::max(1.0, std::abs(dense))) {
      throw std::runtime_error(
          "operator_norm: power iteration disagrees with dense eigensolve (" +
          std::to_string(result) + " vs " + std::to_string(dense) + ")");
    }
  }
  return result;
}

IcHighReport high_order_ic_check(const DsmSet& dsm, const DensityOperator& rho,
                                 int a, int size_cap) {
  if (a < 2 || a > dsm.strength) {
    throw std::invalid_argument(
        "high_order_ic_check: a must lie in [2, strength]");
  }
  const int d = dsm.povms.front().dim();
  double lhs = 0.0;
  for (const Povm& povm : dsm.povms) {
    lhs += index_coincidence(born_probabilities(povm, rho), 2 * a);
  }
  double g_norm = operator_norm(view_operator(dsm, a, size_cap).matrix);
  double d_pow_a = std::pow(static_cast<double>(d), a);
  double h = 1.0 / (design_constant(d, a) * d_pow_a);
  double purity = rho.purity();
  double f_a = f_t(rho, a, FtMethod::cycle_index, size_cap);
  double rhs = g_norm * (std::pow(purity, a) +
                         (2.0 * f_a - 1.0) / (d_pow_a * (1.0 - h)));
  return {lhs, rhs, lhs <= rhs + 1e-10};
}

namespace {

double ic_sum(const std::vector<Matrix>& bases, const Vector& psi, int a) {
  double total = 0.0;
  for (const Matrix& basis : bases) {
    Vector amp = basis.adjoint() * psi;
    for (Eigen::Index i = 0; i < amp.size(); ++i) {
      double p = std::norm(amp(i));
      double term = 1.0;
      for (int q = 0; q < a; ++q) term *= p;
      total += term;
    }
  }
  return total;
}

Vector bloch_angles_state(double theta, double phi) {
  Vector psi(2);
  psi << std::cos(theta / 2.0), std::polar(std::sin(theta / 2.0), phi);
  return psi;
}

}  // namespace

double generic_ic_bound(const std::vector<Matrix>& bases, int a) {
  if (a < 2) throw std::invalid_argument("generic_ic_bound: a must be >= 2");
  if (bases.empty()) {
    throw std::invalid_argument("generic_ic_bound: no bases");
  }
  for (const Matrix& b : bases) {
    if (b.rows() != 2 || b.cols() != 2) {
      throw std::invalid_argument(
          "generic_ic_bound: only qubit maximization is supported");
    }
  }

  // Fibonacci lattice over the Bloch sphere.
  constexpr int kLattice = 10000;
  const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
  double best = -1.0;
  double best_theta = 0.0, best_phi = 0.0;
  for (int k = 0; k < kLattice; ++k) {
    double z = 1.0 - 2.0 * (k + 0.5) / kLattice;
    double theta = std::acos(z);
    double phi = golden_angle * k;
    double v = ic_sum(bases, bloch_angles_state(theta, phi), a);
    if (v > best) {
      best = v;
      best_theta = theta;
      best_phi = phi;
    }
  }
  // Pattern search refinement.
  double step = 2.0 * std::numbers::pi / std::sqrt(double(kLattice));
  while (step > 1e-10) {
    bool improved = false;
    for (auto [dt, dp] : {std::pair{step, 0.0}, std::pair{-step, 0.0},
                          std::pair{0.0, step}, std::pair{0.0, -step}}) {
      double v = ic_sum(bases,
                        bloch_angles_state(best_theta + dt, best_phi + dp), a);
      if (v > best) {
        best = v;
        best_theta += dt;
        best_phi += dp;
        improved = true;
      }
    }
    if (!improved) step *= 0.5;
  }
  return best;
}

BasisSet mub_triple() {
  const double r = 1.0 / std::sqrt(2.0);
  BasisSet bs;
  bs.dim = 2;
  Matrix z(2, 2), x(2, 2), y(2, 2);
  z << 1, 0, 0, 1;
  x << r, r, r, -r;
  y << r, r, std::complex<double>(0, r), std::complex<double>(0, -r);
  bs.bases = {z, x, y};
  validate_basis_set(bs);
  return bs;
}

Matrix haar_random_basis(int d, SplitRng& rng) {
  Matrix z(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      z(i, j) = rng.complex_normal() / std::sqrt(2.0);
    }
  }
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR();
  for (int i = 0; i < d; ++i) {
    std::complex<double> diag = r(i, i);
    q.col(i) *= diag / std::abs(diag);
  }
  return q;
}

TripleResult evaluate_basis_triple(const BasisSet& bs,
                                   const std::vector<double>& x_grid) {
  validate_basis_set(bs);
  if (x_grid.size() < 2) {
    throw std::invalid_argument("evaluate_basis_triple: grid too small");
  }
  if (bs.dim != 2) {
    throw std::invalid_argument("evaluate_basis_triple: qubit bases only");
  }

  TripleResult result;
  result.unbiasedness = unbiasedness(bs);

  std::vector<Matrix> conj_bases;
  conj_bases.reserve(bs.bases.size());
  for (const Matrix& b : bs.bases) conj_bases.push_back(b.conjugate());
  double bound_a = generic_ic_bound(bs.bases, 2);
  double bound_b = generic_ic_bound(conj_bases, 2);
  const double rhs = std::sqrt(bound_a) * std::sqrt(bound_b);

  // Side A measures in the bases, side B in their conjugates, w = 1.
  LocalScheme scheme;
  LocalMeasurements side_a, side_b;
  for (std::size_t k = 0; k < bs.bases.size(); ++k) {
    std::vector<Matrix> eff_a, eff_b;
    for (int i = 0; i < 2; ++i) {
      Vector v = bs.bases[k].col(i);
      eff_a.push_back(v * v.adjoint());
      eff_b.push_back((v * v.adjoint()).conjugate());
    }
    side_a.povms.emplace_back(2, std::move(eff_a));
    side_b.povms.emplace_back(2, std::move(eff_b));
    side_a.weights.push_back(1.0);
    side_b.weights.push_back(1.0);
    side_a.strengths.push_back(1);
    side_b.strengths.push_back(1);
  }
  scheme.subsystems = {std::move(side_a), std::move(side_b)};

  auto correlation = [&](double x) {
    return correlation_j(scheme, state_isotropic(x));
  };

  double first_violation = std::numeric_limits<double>::quiet_NaN();
  double bracket_lo = 0.0;
  for (double x : x_grid) {
    if (correlation(x) > rhs) {
      first_violation = x;
      break;
    }
    bracket_lo = x;
  }
  if (std::isnan(first_violation)) {
    result.x_critical = std::numeric_limits<double>::infinity();
    return result;
  }
  double lo = bracket_lo, hi = first_violation;
  while (hi - lo > 1e-6) {
    double mid = 0.5 * (lo + hi);
    (correlation(mid) > rhs ? hi : lo) = mid;
  }
  result.x_critical = 0.5 * (lo + hi);
  return result;
}

std::vector<TripleResult> random_bases_experiment(
    int n_sets, std::uint64_t seed, const std::vector<double>& x_grid) {
  if (n_sets < 1) {
    throw std::invalid_argument("random_bases_experiment: need n_sets >= 1");
  }
  SplitRng root(seed);
  std::vector<TripleResult> results;
  results.reserve(n_sets);
  for (int s = 0; s < n_sets; ++s) {
    SplitRng rng = root.derive(s);
    BasisSet bs;
    bs.dim = 2;
    for (int b = 0; b < 3; ++b) bs.bases.push_back(haar_random_basis(2, rng));
    results.push_back(evaluate_basis_triple(bs, x_grid));
  }
  return results;
}

}  // namespace qdsm
