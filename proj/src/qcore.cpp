#include "qdsm/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qdsm {

namespace {

void check_hermitian(const Matrix& m, double tol, const char* what) {
  double dev = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (dev > tol) {
    throw std::invalid_argument(std::string(what) +
                                ": not Hermitian (deviation " +
                                std::to_string(dev) + ")");
  }
}

double min_eigenvalue(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace

ProbabilityDistribution::ProbabilityDistribution(RealVector probs)
    : probs_(std::move(probs)) {
  if (probs_.size() == 0) {
    throw std::invalid_argument("ProbabilityDistribution: empty vector");
  }
  if (probs_.minCoeff() < 0.0) {
    throw std::invalid_argument("ProbabilityDistribution: negative entry " +
                                std::to_string(probs_.minCoeff()));
  }
  double s = probs_.sum();
  if (std::abs(s - 1.0) > 1e-12) {
    throw std::invalid_argument("ProbabilityDistribution: sum " +
                                std::to_string(s) + " != 1");
  }
}

DensityOperator::DensityOperator(Matrix m) : m_(std::move(m)) {
  if (m_.rows() == 0 || m_.rows() != m_.cols()) {
    throw std::invalid_argument("DensityOperator: matrix must be square");
  }
  check_hermitian(m_, 1e-12, "DensityOperator");
  double tr = m_.trace().real();
  if (std::abs(tr - 1.0) > 1e-12) {
    throw std::invalid_argument("DensityOperator: trace " +
                                std::to_string(tr) + " != 1");
  }
  if (min_eigenvalue(m_) < -1e-10) {
    throw std::invalid_argument("DensityOperator: negative eigenvalue " +
                                std::to_string(min_eigenvalue(m_)));
  }
}

DensityOperator DensityOperator::pure(const Vector& psi) {
  double n = psi.norm();
  if (std::abs(n - 1.0) > 1e-10) {
    throw std::invalid_argument("DensityOperator::pure: vector norm " +
                                std::to_string(n) + " != 1");
  }
  Matrix m = psi * psi.adjoint();
  // Symmetrize away the last bits of rounding noise.
  m = 0.5 * (m + Matrix(m.adjoint()));
  return DensityOperator(std::move(m));
}

DensityOperator DensityOperator::maximally_mixed(int d) {
  return DensityOperator(Matrix::Identity(d, d) / static_cast<double>(d));
}

Povm::Povm(int dim, std::vector<Matrix> effects,
           std::vector<std::string> labels)
    : dim_(dim), effects_(std::move(effects)), labels_(std::move(labels)) {
  if (dim_ < 1) throw std::invalid_argument("Povm: dim must be positive");
  if (effects_.empty()) throw std::invalid_argument("Povm: no effects");
  if (!labels_.empty() && labels_.size() != effects_.size()) {
    throw std::invalid_argument("Povm: label count mismatch");
  }
  Matrix sum = Matrix::Zero(dim_, dim_);
  for (std::size_t i = 0; i < effects_.size(); ++i) {
    const Matrix& e = effects_[i];
    if (e.rows() != dim_ || e.cols() != dim_) {
      throw std::invalid_argument("Povm: effect " + std::to_string(i) +
                                  " has wrong dimension");
    }
    check_hermitian(e, 1e-10, "Povm effect");
    if (min_eigenvalue(e) < -1e-10) {
      throw std::invalid_argument("Povm: effect " + std::to_string(i) +
                                  " not positive semidefinite");
    }
    sum += e;
  }
  double dev = (sum - Matrix::Identity(dim_, dim_)).cwiseAbs().maxCoeff();
  if (dev > 1e-10) {
    throw std::invalid_argument("Povm: effects sum deviates from identity by " +
                                std::to_string(dev));
  }
}

Matrix tensor_product(const std::vector<Matrix>& operators) {
  if (operators.empty()) {
    throw std::invalid_argument("tensor_product: empty operator list");
  }
  Matrix result = operators.front();
  if (result.rows() != result.cols()) {
    throw std::invalid_argument("tensor_product: operators must be square");
  }
  for (std::size_t k = 1; k < operators.size(); ++k) {
    const Matrix& b = operators[k];
    if (b.rows() != b.cols()) {
      throw std::invalid_argument("tensor_product: operators must be square");
    }
    Matrix next(result.rows() * b.rows(), result.cols() * b.cols());
    for (Eigen::Index i = 0; i < result.rows(); ++i) {
      for (Eigen::Index j = 0; j < result.cols(); ++j) {
        next.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) =
            result(i, j) * b;
      }
    }
    result = std::move(next);
  }
  return result;
}

Matrix tensor_power(const Matrix& a, int t) {
  if (t < 1) throw std::invalid_argument("tensor_power: t must be >= 1");
  Matrix r = a;
  for (int k = 1; k < t; ++k) r = tensor_product({r, a});
  return r;
}

Vector tensor_power(const Vector& v, int t) {
  if (t < 1) throw std::invalid_argument("tensor_power: t must be >= 1");
  Vector r = v;
  for (int k = 1; k < t; ++k) {
    Vector next(r.size() * v.size());
    for (Eigen::Index i = 0; i < r.size(); ++i) {
      next.segment(i * v.size(), v.size()) = r(i) * v;
    }
    r = std::move(next);
  }
  return r;
}

ProbabilityDistribution born_probabilities(const Povm& povm,
                                           const DensityOperator& rho) {
  if (povm.dim() != rho.dim()) {
    throw std::invalid_argument("born_probabilities: dimension mismatch (" +
                                std::to_string(povm.dim()) + " vs " +
                                std::to_string(rho.dim()) + ")");
  }
  RealVector p(povm.size());
  for (int i = 0; i < povm.size(); ++i) {
    double v = (povm.effects()[i] * rho.matrix()).trace().real();
    if (v < 0.0) {
      if (v < -1e-12) {
        throw std::invalid_argument(
            "born_probabilities: probability " + std::to_string(v) +
            " below tolerance at outcome " + std::to_string(i));
      }
      v = 0.0;
    }
    p(i) = v;
  }
  p /= p.sum();  // remove residual rounding so the invariant holds exactly
  return ProbabilityDistribution(std::move(p));
}

Matrix sym_projector(int d, int t, int size_cap) {
  if (d < 2) throw std::invalid_argument("sym_projector: d must be >= 2");
  if (t < 1) throw std::invalid_argument("sym_projector: t must be >= 1");
  double dimf = std::pow(static_cast<double>(d), t);
  if (dimf > static_cast<double>(size_cap)) {
    throw std::length_error("sym_projector: d^t = " + std::to_string(dimf) +
                            " exceeds size cap " + std::to_string(size_cap));
  }
  int dim = static_cast<int>(dimf + 0.5);

  std::vector<int> digits(t);
  std::vector<int> perm(t);
  std::iota(perm.begin(), perm.end(), 0);
  Matrix p = Matrix::Zero(dim, dim);
  long n_perms = 0;
  do {
    ++n_perms;
    for (int x = 0; x < dim; ++x) {
      int xx = x;
      for (int k = t - 1; k >= 0; --k) {
        digits[k] = xx % d;
        xx /= d;
      }
      // P_sigma maps factor k of the input to factor perm[k] of the output.
      int y = 0;
      for (int k = 0; k < t; ++k) {
        int src = perm[k];
        y = y * d + digits[src];
      }
      p(y, x) += 1.0;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return p / static_cast<double>(n_perms);
}

RealVector purity_moments(const DensityOperator& rho, int max_a) {
  if (max_a < 1) throw std::invalid_argument("purity_moments: max_a >= 1");
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix(),
                                           Eigen::EigenvaluesOnly);
  RealVector lam = es.eigenvalues();
  RealVector out(max_a);
  out(0) = 1.0;
  RealVector pow_lam = lam;
  for (int a = 2; a <= max_a; ++a) {
    pow_lam = pow_lam.cwiseProduct(lam);
    out(a - 1) = pow_lam.sum();
  }
  return out;
}

double f_t(const DensityOperator& rho, int t, FtMethod method, int size_cap) {
  if (t < 1) throw std::invalid_argument("f_t: t must be >= 1");
  if (method == FtMethod::projector) {
    Matrix proj = sym_projector(rho.dim(), t, size_cap);
    Matrix rho_t = tensor_power(rho.matrix(), t);
    return (proj * rho_t).trace().real();
  }
  // Cycle-index expansion: direct enumeration of S_t.
  RealVector moments = purity_moments(rho, t);
  std::vector<int> perm(t);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<char> seen(t);
  long double total = 0.0L;
  long n_perms = 0;
  do {
    ++n_perms;
    std::fill(seen.begin(), seen.end(), 0);
    long double prod = 1.0L;
    for (int s = 0; s < t; ++s) {
      if (seen[s]) continue;
      int len = 0;
      int cur = s;
      while (!seen[cur]) {
        seen[cur] = 1;
        cur = perm[cur];
        ++len;
      }
      prod *= moments(len - 1);
    }
    total += prod;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(total / n_perms);
}

DensityOperator haar_random_state(int d, std::uint64_t seed) {
  if (d < 2) throw std::invalid_argument("haar_random_state: d must be >= 2");
  SplitRng rng(seed);
  return DensityOperator::pure(rng.haar_vector(d));
}

DensityOperator random_density(int d, int rank, std::uint64_t seed) {
  if (d < 2) throw std::invalid_argument("random_density: d must be >= 2");
  if (rank < 1 || rank > d) {
    throw std::invalid_argument("random_density: rank must be in [1, d]");
  }
  SplitRng rng(seed);
  Eigen::VectorXd w = rng.dirichlet(rank);
  Matrix m = Matrix::Zero(d, d);
  for (int k = 0; k < rank; ++k) {
    Vector psi = rng.haar_vector(d);
    m += w(k) * (psi * psi.adjoint());
  }
  m = 0.5 * (m + Matrix(m.adjoint()));
  m /= m.trace().real();
  return DensityOperator(std::move(m));
}

}  // namespace qdsm
