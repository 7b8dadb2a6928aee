#include "qdsm/entdetect.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "qdsm/eur.hpp"
#include "qdsm/rng.hpp"

namespace qdsm {

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) {
    r *= static_cast<double>(n - k + i) / static_cast<double>(i);
  }
  return r;
}

// Joint correlation operators J_{i|theta}, optionally with traceless-shifted
// local effects. One matrix per (theta, i), dimension prod_n d_n.
std::vector<Matrix> joint_operators(const LocalScheme& scheme, bool shifted) {
  const int n = scheme.n_subsystems();
  const int n_theta = scheme.n_settings();
  const int n_out = scheme.n_outcomes();
  std::vector<Matrix> ops;
  ops.reserve(static_cast<std::size_t>(n_theta) * n_out);
  for (int theta = 0; theta < n_theta; ++theta) {
    for (int i = 0; i < n_out; ++i) {
      std::vector<Matrix> factors;
      factors.reserve(n);
      for (int sub = 0; sub < n; ++sub) {
        const LocalMeasurements& lm = scheme.subsystems[sub];
        const Povm& povm = lm.povms[theta];
        Matrix eff = povm.effects()[i];
        if (shifted) {
          eff -= Matrix::Identity(povm.dim(), povm.dim()) /
                 static_cast<double>(povm.size());
        }
        factors.push_back(lm.weights[theta] * eff);
      }
      ops.push_back(tensor_product(factors));
    }
  }
  return ops;
}

double correlation_from_ops(const std::vector<Matrix>& ops,
                            const DensityOperator& rho, bool absolute) {
  if (ops.front().rows() != rho.dim()) {
    throw std::invalid_argument("correlation: dimension mismatch (" +
                                std::to_string(ops.front().rows()) + " vs " +
                                std::to_string(rho.dim()) + ")");
  }
  double total = 0.0;
  for (const Matrix& op : ops) {
    double v = (op * rho.matrix()).trace().real();
    total += absolute ? std::abs(v) : v;
  }
  return total;
}

Vector basis_state_4q(int idx) {
  Vector v = Vector::Zero(16);
  v(idx) = 1.0;
  return v;
}

}  // namespace

int LocalScheme::joint_dim() const {
  int d = 1;
  for (const LocalMeasurements& lm : subsystems) d *= lm.povms.front().dim();
  return d;
}

void validate_scheme(const LocalScheme& scheme) {
  if (scheme.subsystems.empty()) {
    throw std::invalid_argument("LocalScheme: no subsystems");
  }
  const std::size_t n_theta = scheme.subsystems.front().povms.size();
  const int n_out = scheme.subsystems.front().povms.front().size();
  for (std::size_t sub = 0; sub < scheme.subsystems.size(); ++sub) {
    const LocalMeasurements& lm = scheme.subsystems[sub];
    if (lm.povms.empty()) {
      throw std::invalid_argument("LocalScheme: subsystem " +
                                  std::to_string(sub) + " has no POVMs");
    }
    if (lm.povms.size() != n_theta) {
      throw std::invalid_argument(
          "LocalScheme: subsystems disagree on the number of settings");
    }
    if (lm.weights.size() != n_theta || lm.strengths.size() != n_theta) {
      throw std::invalid_argument("LocalScheme: subsystem " +
                                  std::to_string(sub) +
                                  " weight/strength count mismatch");
    }
    for (std::size_t theta = 0; theta < n_theta; ++theta) {
      if (lm.povms[theta].size() != n_out) {
        throw std::invalid_argument(
            "LocalScheme: all POVMs must share the outcome count");
      }
      if (!(lm.weights[theta] > 0.0)) {
        throw std::invalid_argument("LocalScheme: weights must be positive");
      }
    }
  }
}

void validate_exponents(const ExponentVector& exps, int n_subsystems,
                        bool require_even) {
  if (static_cast<int>(exps.a.size()) != n_subsystems) {
    throw std::invalid_argument("ExponentVector: need one exponent per "
                                "subsystem");
  }
  double inv_sum = 0.0;
  for (int a : exps.a) {
    if (a < 2) throw std::invalid_argument("ExponentVector: a_n must be >= 2");
    if (require_even && a % 2 != 0) {
      throw std::invalid_argument(
          "ExponentVector: Theorem 4 requires even exponents");
    }
    inv_sum += 1.0 / a;
  }
  if (std::abs(inv_sum - 1.0) > 1e-12) {
    throw std::invalid_argument("ExponentVector: sum of 1/a_n is " +
                                std::to_string(inv_sum) + ", must be 1");
  }
}

double correlation_j(const LocalScheme& scheme, const DensityOperator& rho) {
  validate_scheme(scheme);
  return correlation_from_ops(joint_operators(scheme, false), rho, false);
}

double correlation_jtilde(const LocalScheme& scheme,
                          const DensityOperator& rho) {
  validate_scheme(scheme);
  return correlation_from_ops(joint_operators(scheme, true), rho, true);
}

namespace {

double theorem_rhs(const LocalScheme& scheme, const ExponentVector& exps,
                   bool modified) {
  validate_scheme(scheme);
  validate_exponents(exps, scheme.n_subsystems(), modified);
  const int n_out = scheme.n_outcomes();
  double product = 1.0;
  for (int sub = 0; sub < scheme.n_subsystems(); ++sub) {
    const LocalMeasurements& lm = scheme.subsystems[sub];
    const int a = exps.a[sub];
    double sum = 0.0;
    for (std::size_t theta = 0; theta < lm.povms.size(); ++theta) {
      if (a > lm.strengths[theta]) {
        throw std::invalid_argument(
            "theorem rhs: exponent " + std::to_string(a) +
            " exceeds design strength " +
            std::to_string(lm.strengths[theta]) + " of subsystem " +
            std::to_string(sub) + " setting " + std::to_string(theta));
      }
      const int d = lm.povms[theta].dim();
      double b = modified
                     ? modified_ic_bound(n_out, d, a, lm.povms[theta].size())
                     : design_ic_bound(n_out, d, a);
      sum += std::pow(lm.weights[theta], a) * b;
    }
    product *= std::pow(sum, 1.0 / a);
  }
  return product;
}

}  // namespace

double theorem3_rhs(const LocalScheme& scheme, const ExponentVector& exps) {
  return theorem_rhs(scheme, exps, false);
}

double theorem4_rhs(const LocalScheme& scheme, const ExponentVector& exps) {
  return theorem_rhs(scheme, exps, true);
}

double modified_ic_bound(int L, int d, int a, int K) {
  if (a < 2 || a % 2 != 0) {
    throw std::invalid_argument("modified_ic_bound: a must be even and >= 2");
  }
  if (L < 2 || d < 2 || K < 1) {
    throw std::invalid_argument("modified_ic_bound: bad arguments");
  }
  double total = 0.0;
  for (int r = 0; r <= a; ++r) {
    double b;
    if (r == 0) {
      b = L;  // sum_i p_i^0
    } else if (r == 1) {
      b = 1.0;  // sum_i p_i
    } else {
      b = design_ic_bound(L, d, r);
    }
    double shift = 1.0;
    for (int q = 0; q < a - r; ++q) shift *= -1.0 / K;
    total += binomial(a, r) * shift * b;
  }
  return total;
}

DensityOperator state_psi_beta_phi(double beta, double phi) {
  Vector psi = std::sin(beta) * std::sin(phi) * basis_state_4q(0b0000) +
               std::cos(beta) * basis_state_4q(0b1100) +
               std::sin(beta) * std::cos(phi) * basis_state_4q(0b1010);
  psi.normalize();
  return DensityOperator::pure(psi);
}

DensityOperator state_rho_x_phi(double x, double phi) {
  if (x < 0.0 || x > 1.0) {
    throw std::invalid_argument("state_rho_x_phi: x must lie in [0, 1]");
  }
  Vector psi = std::sin(phi) * basis_state_4q(0b0000) +
               std::cos(phi) * basis_state_4q(0b1111);
  psi.normalize();
  Matrix m = x * (psi * psi.adjoint()).eval() +
             (1.0 - x) / 16.0 * Matrix::Identity(16, 16);
  return DensityOperator(std::move(m));
}

DensityOperator state_isotropic(double x) {
  if (x < 0.0 || x > 1.0) {
    throw std::invalid_argument("state_isotropic: x must lie in [0, 1]");
  }
  Vector phi_plus = Vector::Zero(4);
  phi_plus(0) = phi_plus(3) = 1.0 / std::sqrt(2.0);
  Matrix m = x * (phi_plus * phi_plus.adjoint()).eval() +
             (1.0 - x) / 4.0 * Matrix::Identity(4, 4);
  return DensityOperator(std::move(m));
}

std::vector<ScanPoint> detect_scan(StateFamily family,
                                   const LocalScheme& scheme,
                                   const ExponentVector& exps, int grid1,
                                   int grid2, Criterion criterion) {
  validate_scheme(scheme);
  const bool modified = criterion == Criterion::theorem4;
  validate_exponents(exps, scheme.n_subsystems(), modified);
  if (grid1 < 2 || (family != StateFamily::isotropic && grid2 < 2)) {
    throw std::invalid_argument("detect_scan: grid must have >= 2 points");
  }

  const double rhs = modified ? theorem4_rhs(scheme, exps)
                              : theorem3_rhs(scheme, exps);
  const std::vector<Matrix> ops = joint_operators(scheme, modified);
  constexpr double kViolationTol = 1e-12;
  const double half_pi = std::numbers::pi / 2.0;

  auto evaluate = [&](const DensityOperator& rho, double p1,
                      double p2) -> ScanPoint {
    double lhs = correlation_from_ops(ops, rho, modified);
    return {p1, p2, lhs, rhs, lhs > rhs + kViolationTol};
  };

  std::vector<ScanPoint> points;
  if (family == StateFamily::isotropic) {
    points.reserve(grid1);
    for (int i = 0; i < grid1; ++i) {
      double x = static_cast<double>(i) / (grid1 - 1);
      points.push_back(evaluate(state_isotropic(x), x, 0.0));
    }
    return points;
  }

  points.reserve(static_cast<std::size_t>(grid1) * grid2);
  for (int i = 0; i < grid1; ++i) {
    double p1 = (family == StateFamily::rho_x_phi)
                    ? static_cast<double>(i) / (grid1 - 1)     // x in [0, 1]
                    : half_pi * i / (grid1 - 1);               // beta
    for (int j = 0; j < grid2; ++j) {
      double p2 = half_pi * j / (grid2 - 1);  // phi
      DensityOperator rho = (family == StateFamily::rho_x_phi)
                                ? state_rho_x_phi(p1, p2)
                                : state_psi_beta_phi(p1, p2);
      points.push_back(evaluate(rho, p1, p2));
    }
  }
  return points;
}

namespace {

// Product-state correlation evaluated from local outcome probabilities:
// J = sum_{i,theta} prod_n w p^{(n)}_{i|theta} (shifted and absolute for
// Theorem 4). Much cheaper than joint traces inside the hill climb.
class ProductCorrelation {
 public:
  ProductCorrelation(const LocalScheme& scheme, bool shifted)
      : scheme_(scheme),
        shifted_(shifted),
        n_(scheme.n_subsystems()),
        n_theta_(scheme.n_settings()),
        n_out_(scheme.n_outcomes()),
        probs_(static_cast<std::size_t>(n_) * n_theta_ * n_out_, 0.0) {}

  void set_factor(int sub, const Vector& psi) {
    const LocalMeasurements& lm = scheme_.subsystems[sub];
    for (int theta = 0; theta < n_theta_; ++theta) {
      const Povm& povm = lm.povms[theta];
      const double shift = shifted_ ? 1.0 / povm.size() : 0.0;
      for (int i = 0; i < n_out_; ++i) {
        double p = (psi.adjoint() * povm.effects()[i] * psi)(0).real();
        at(sub, theta, i) = lm.weights[theta] * (p - shift);
      }
    }
  }

  double value() const {
    double total = 0.0;
    for (int theta = 0; theta < n_theta_; ++theta) {
      for (int i = 0; i < n_out_; ++i) {
        double prod = 1.0;
        for (int sub = 0; sub < n_; ++sub) prod *= at(sub, theta, i);
        total += shifted_ ? std::abs(prod) : prod;
      }
    }
    return total;
  }

 private:
  double& at(int sub, int theta, int i) {
    return probs_[(static_cast<std::size_t>(sub) * n_theta_ + theta) * n_out_ +
                  i];
  }
  double at(int sub, int theta, int i) const {
    return probs_[(static_cast<std::size_t>(sub) * n_theta_ + theta) * n_out_ +
                  i];
  }

  const LocalScheme& scheme_;
  bool shifted_;
  int n_, n_theta_, n_out_;
  std::vector<double> probs_;
};

Vector qubit_state(double theta, double phi) {
  Vector psi(2);
  psi << std::cos(theta / 2.0),
      std::polar(std::sin(theta / 2.0), phi);
  return psi;
}

}  // namespace

double separable_oracle(const LocalScheme& scheme, const ExponentVector& exps,
                        int n_samples, std::uint64_t seed,
                        Criterion criterion) {
  validate_scheme(scheme);
  const bool shifted = criterion == Criterion::theorem4;
  validate_exponents(exps, scheme.n_subsystems(), shifted);
  if (n_samples < 1) {
    throw std::invalid_argument("separable_oracle: need n_samples >= 1");
  }
  const int n = scheme.n_subsystems();
  for (const LocalMeasurements& lm : scheme.subsystems) {
    if (lm.povms.front().dim() != 2) {
      throw std::invalid_argument(
          "separable_oracle: qubit subsystems only (Bloch refinement)");
    }
  }

  SplitRng root(seed);
  double best = -std::numeric_limits<double>::infinity();
  for (int sample = 0; sample < n_samples; ++sample) {
    SplitRng rng = root.derive(sample);
    // Angles (theta, phi) per factor.
    std::vector<std::array<double, 2>> angles(n);
    ProductCorrelation corr(scheme, shifted);
    for (int sub = 0; sub < n; ++sub) {
      Vector psi = rng.haar_vector(2);
      Eigen::Vector3d b = bloch_vector(psi);
      angles[sub] = {std::acos(std::clamp(b.z(), -1.0, 1.0)),
                     std::atan2(b.y(), b.x())};
      corr.set_factor(sub, qubit_state(angles[sub][0], angles[sub][1]));
    }
    double value = corr.value();
    // Coordinate-wise hill climb on the Bloch angles.
    double step = 0.2;
    for (int iter = 0; iter < 200; ++iter) {
      for (int sub = 0; sub < n; ++sub) {
        for (int coord = 0; coord < 2; ++coord) {
          for (double dir : {+1.0, -1.0}) {
            std::array<double, 2> trial = angles[sub];
            trial[coord] += dir * step;
            corr.set_factor(sub, qubit_state(trial[0], trial[1]));
            double v = corr.value();
            if (v > value) {
              value = v;
              angles[sub] = trial;
            } else {
              corr.set_factor(sub,
                              qubit_state(angles[sub][0], angles[sub][1]));
            }
          }
        }
      }
      step *= 0.95;
    }
    best = std::max(best, value);
  }
  return best;
}

LocalScheme icosahedron_single_scheme(int n_qubits) {
  if (n_qubits < 1) {
    throw std::invalid_argument("icosahedron_single_scheme: need >= 1 qubit");
  }
  QuantumDesign design = builtin_design(BuiltinDesign::icosahedron);
  DsmSet dsm = group_to_povms(design, single_group(design));
  LocalScheme scheme;
  for (int q = 0; q < n_qubits; ++q) {
    scheme.subsystems.push_back(
        {{dsm.povms.front()}, {1.0}, {design.strength}});
  }
  validate_scheme(scheme);
  return scheme;
}

LocalScheme mub_conjugate_scheme() {
  QuantumDesign design = builtin_design(BuiltinDesign::mub_qubit);
  LocalMeasurements side_a, side_b;
  for (int basis = 0; basis < 3; ++basis) {
    std::vector<Matrix> eff_a, eff_b;
    for (int i = 0; i < 2; ++i) {
      const Vector& v = design.vectors[2 * basis + i];
      Matrix proj = v * v.adjoint();
      eff_a.push_back(proj);
      eff_b.push_back(proj.conjugate());
    }
    side_a.povms.emplace_back(2, std::move(eff_a));
    side_b.povms.emplace_back(2, std::move(eff_b));
    side_a.weights.push_back(1.0);
    side_b.weights.push_back(1.0);
    side_a.strengths.push_back(design.strength);
    side_b.strengths.push_back(design.strength);
  }
  LocalScheme scheme;
  scheme.subsystems = {std::move(side_a), std::move(side_b)};
  validate_scheme(scheme);
  return scheme;
}

}  // namespace qdsm
