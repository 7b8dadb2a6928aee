#include "qdsm/design_search.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "qdsm/rng.hpp"

namespace qdsm {

namespace {

std::vector<Vector> haar_start(int d, int k, SplitRng& rng) {
  std::vector<Vector> v;
  v.reserve(k);
  for (int i = 0; i < k; ++i) v.push_back(rng.haar_vector(d));
  return v;
}

struct GradientOutcome {
  std::vector<Vector> vecs;
  double potential = 0.0;
  int iterations = 0;
};

GradientOutcome gradient_descent(std::vector<Vector> vecs, int t,
                                 double target, double tol, int max_iters) {
  double potential = frame_potential(vecs, t);
  double step = 0.01;
  int it = 0;
  for (; it < max_iters; ++it) {
    if (potential - target <= tol) break;
    std::vector<Vector> grad = frame_potential_gradient(vecs, t);
    std::vector<Vector> next(vecs.size());
    for (std::size_t j = 0; j < vecs.size(); ++j) {
      Vector g = grad[j] - vecs[j].dot(grad[j]) * vecs[j];  // tangent part
      next[j] = (vecs[j] - step * g).normalized();
    }
    double next_potential = frame_potential(next, t);
    if (next_potential < potential) {
      vecs = std::move(next);
      potential = next_potential;
      step *= 1.1;
    } else {
      step *= 0.5;
      if (step < 1e-18) break;  // numerically stalled
    }
  }
  return {std::move(vecs), potential, it};
}

// Entrywise residual of sum_k |psi_k><psi_k|^{\otimes t} against
// K D P_sym, flattened to a real vector. Inputs are raw parameter blocks
// (re, im per vector), normalized inside so radial directions are flat.
class ResidualMap {
 public:
  ResidualMap(int d, int k, int t)
      : d_(d),
        k_(k),
        t_(t),
        dim_(static_cast<int>(std::pow(double(d), t) + 0.5)),
        target_(static_cast<double>(k) * design_constant(d, t) *
                sym_projector(d, t)) {}

  int n_params() const { return 2 * d_ * k_; }
  int n_residuals() const { return 2 * dim_ * dim_; }

  std::vector<Vector> unpack(const Eigen::VectorXd& params) const {
    std::vector<Vector> vecs(k_, Vector(d_));
    for (int j = 0; j < k_; ++j) {
      for (int m = 0; m < d_; ++m) {
        vecs[j](m) = std::complex<double>(params(2 * (j * d_ + m)),
                                          params(2 * (j * d_ + m) + 1));
      }
      vecs[j].normalize();
    }
    return vecs;
  }

  static Eigen::VectorXd pack(const std::vector<Vector>& vecs) {
    const int d = static_cast<int>(vecs.front().size());
    Eigen::VectorXd params(2 * d * static_cast<int>(vecs.size()));
    for (std::size_t j = 0; j < vecs.size(); ++j) {
      for (int m = 0; m < d; ++m) {
        params(2 * (j * d + m)) = vecs[j](m).real();
        params(2 * (j * d + m) + 1) = vecs[j](m).imag();
      }
    }
    return params;
  }

  Eigen::VectorXd operator()(const Eigen::VectorXd& params) const {
    std::vector<Vector> vecs = unpack(params);
    Matrix sum = Matrix::Zero(dim_, dim_);
    for (const Vector& psi : vecs) {
      Vector w = tensor_power(psi, t_);
      sum.noalias() += w * w.adjoint();
    }
    sum -= target_;
    Eigen::VectorXd r(n_residuals());
    for (int i = 0; i < dim_; ++i) {
      for (int j = 0; j < dim_; ++j) {
        r(2 * (i * dim_ + j)) = sum(i, j).real();
        r(2 * (i * dim_ + j) + 1) = sum(i, j).imag();
      }
    }
    return r;
  }

 private:
  int d_, k_, t_, dim_;
  Matrix target_;
};

// Levenberg-Marquardt with forward-difference Jacobian. The parameter count
// is tiny (2dK <= 96 for our design sizes), so dense solves are fine.
std::vector<Vector> lm_polish(const std::vector<Vector>& start, int d, int k,
                              int t) {
  ResidualMap map(d, k, t);
  Eigen::VectorXd params = ResidualMap::pack(start);
  Eigen::VectorXd r = map(params);
  double cost = r.squaredNorm();
  double lambda = 1e-6;
  const int n = map.n_params();

  for (int iter = 0; iter < 30 && cost > 1e-28; ++iter) {
    Eigen::MatrixXd jac(map.n_residuals(), n);
    const double h = 1e-6;
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd plus = params, minus = params;
      plus(i) += h;
      minus(i) -= h;
      jac.col(i) = (map(plus) - map(minus)) / (2.0 * h);
    }
    Eigen::MatrixXd jtj = jac.transpose() * jac;
    Eigen::VectorXd jtr = jac.transpose() * r;
    bool accepted = false;
    while (lambda < 1e10) {
      Eigen::MatrixXd a = jtj;
      a.diagonal().array() += lambda;
      Eigen::VectorXd delta = a.ldlt().solve(-jtr);
      Eigen::VectorXd p_next = params + delta;
      Eigen::VectorXd r_next = map(p_next);
      double cost_next = r_next.squaredNorm();
      if (cost_next < cost) {
        params = std::move(p_next);
        r = std::move(r_next);
        cost = cost_next;
        lambda = std::max(lambda * 0.3, 1e-12);
        accepted = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!accepted) break;
  }
  return map.unpack(params);
}

}  // namespace

std::vector<Vector> frame_potential_gradient(const std::vector<Vector>& vecs,
                                             int t) {
  const int k = static_cast<int>(vecs.size());
  std::vector<Vector> grad(k);
  for (int j = 0; j < k; ++j) {
    Vector g = Vector::Zero(vecs[j].size());
    // The k = j term is radial at unit norm; keeping it makes the raw
    // Euclidean gradient exact, and the tangent projection removes it.
    for (int m = 0; m < k; ++m) {
      std::complex<double> s = vecs[j].dot(vecs[m]);  // <psi_j|psi_m>
      double mag = std::norm(s);
      double w = 1.0;
      for (int q = 0; q < t - 1; ++q) w *= mag;
      g += w * std::conj(s) * vecs[m];
    }
    grad[j] = 2.0 * t * g;
  }
  return grad;
}

SearchResult search_design(const SearchConfig& config) {
  if (config.d < 2 || config.K < 2 || config.t < 1) {
    throw std::invalid_argument("search_design: need d >= 2, K >= 2, t >= 1");
  }
  if (config.tol <= 0.0) {
    throw std::invalid_argument("search_design: tol must be positive");
  }
  if (config.max_iters < 1 || config.restarts < 1) {
    throw std::invalid_argument(
        "search_design: max_iters and restarts must be >= 1");
  }

  const double welch = static_cast<double>(config.K) * config.K *
                       design_constant(config.d, config.t);
  const bool can_polish =
      config.polish &&
      std::pow(static_cast<double>(config.d), config.t) <=
          static_cast<double>(kDefaultSizeCap);

  SplitRng root(config.seed);
  SearchResult best;
  best.residual = std::numeric_limits<double>::infinity();

  for (int restart = 0; restart < config.restarts; ++restart) {
    SplitRng rng = root.derive(restart);
    std::vector<Vector> vecs = haar_start(config.d, config.K, rng);
    GradientOutcome out = gradient_descent(std::move(vecs), config.t, welch,
                                           config.tol, config.max_iters);
    double gap = out.potential - welch;
    if (can_polish && gap <= 1e-4) {
      // Close enough for the quadratic basin: polish the entrywise residual.
      out.vecs = lm_polish(out.vecs, config.d, config.K, config.t);
      gap = frame_potential(out.vecs, config.t) - welch;
    }
    if (gap < best.residual) {
      best.residual = gap;
      best.iterations = out.iterations;
      best.winning_restart = restart;
      best.design.dim = config.d;
      best.design.strength = config.t;
      best.design.vectors = std::move(out.vecs);
    }
    if (best.residual <= config.tol) break;
  }

  for (Vector& v : best.design.vectors) v.normalize();
  best.design.name = "search_d" + std::to_string(config.d) + "_K" +
                     std::to_string(config.K) + "_t" +
                     std::to_string(config.t);
  best.converged = best.residual <= config.tol;
  return best;
}

}  // namespace qdsm
