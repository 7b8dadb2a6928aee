#include "qdsm/eur.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qdsm {

namespace {

double pow_int(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

constexpr double kRangeSlack = 1e-12;
constexpr double kBisectTol = 1e-13;

}  // namespace

double validate_bound_params(const BoundParams& params) {
  if (params.L < 2) throw std::invalid_argument("BoundParams: L must be >= 2");
  if (params.a < 2) throw std::invalid_argument("BoundParams: a must be >= 2");
  if (!(params.alpha > 0.0)) {
    throw std::invalid_argument("BoundParams: alpha must be positive");
  }
  double lo = pow_int(1.0 / params.L, params.a - 1);  // L^{1-a}
  if (params.c_a < lo - kRangeSlack || params.c_a > 1.0 + kRangeSlack) {
    throw std::invalid_argument("BoundParams: c_a = " +
                                std::to_string(params.c_a) +
                                " outside [L^{1-a}, 1]");
  }
  return std::clamp(params.c_a, lo, 1.0);
}

double renyi_entropy(const ProbabilityDistribution& p, double alpha) {
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("renyi_entropy: alpha must be positive");
  }
  const RealVector& probs = p.probs();
  if (std::isinf(alpha)) {
    return -std::log(probs.maxCoeff());
  }
  if (alpha == 1.0) {
    double h = 0.0;
    for (Eigen::Index i = 0; i < probs.size(); ++i) {
      if (probs(i) > 0.0) h -= probs(i) * std::log(probs(i));
    }
    return h;
  }
  // Factor out the largest entry so p^alpha never underflows wholesale.
  double pmax = probs.maxCoeff();
  double s = 0.0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    if (probs(i) > 0.0) s += std::pow(probs(i) / pmax, alpha);
  }
  return (alpha * std::log(pmax) + std::log(s)) / (1.0 - alpha);
}

double index_coincidence(const ProbabilityDistribution& p, int a) {
  if (a < 2) throw std::invalid_argument("index_coincidence: a must be >= 2");
  double s = 0.0;
  for (Eigen::Index i = 0; i < p.probs().size(); ++i) {
    s += pow_int(p.probs()(i), a);
  }
  return s;
}

PxSolution solve_px(int L, int a, double c_a) {
  BoundParams params{L, a, 2.0, c_a};
  double c = validate_bound_params(params);

  const double uniform = 1.0 / L;
  if (c >= 1.0) return {1.0, 0.0};
  double c_lo = pow_int(uniform, a - 1);
  if (c <= c_lo) return {uniform, uniform};

  // p^a + (1-p)^a/(L-1)^{a-1} is monotone increasing on [1/L, 1].
  auto excess = [&](double p) {
    return pow_int(p, a) +
           pow_int((1.0 - p) / (L - 1), a) * (L - 1) - c;
  };
  double lo = uniform, hi = 1.0;
  while (hi - lo > kBisectTol) {
    double mid = 0.5 * (lo + hi);
    (excess(mid) < 0.0 ? lo : hi) = mid;
  }
  double p = 0.5 * (lo + hi);
  return {p, (1.0 - p) / (L - 1)};
}

ProbabilityDistribution dist_px(int L, int a, double c_a) {
  PxSolution sol = solve_px(L, a, c_a);
  RealVector probs(L);
  probs(0) = sol.p;
  for (int i = 1; i < L; ++i) probs(i) = sol.p_s;
  probs /= probs.sum();
  return ProbabilityDistribution(std::move(probs));
}

namespace {

// Support size plus the exact-uniform flag: a support count within 1e-9 of
// an integer snaps to it, and the distribution is then exactly uniform (the
// constraint map has zero derivative there, so bisection would smear the
// rounding error by a square root).
std::pair<int, bool> py_support_snap(int a, double c_a) {
  if (a < 2) throw std::invalid_argument("py_support: a must be >= 2");
  if (!(c_a > 0.0) || c_a > 1.0 + kRangeSlack) {
    throw std::invalid_argument("py_support: c_a must lie in (0, 1]");
  }
  double raw = std::pow(std::min(c_a, 1.0), 1.0 / (1.0 - a));
  double snapped = std::round(raw);
  if (std::abs(raw - snapped) <= 1e-9 && snapped >= 1.0) {
    return {static_cast<int>(snapped), true};
  }
  return {static_cast<int>(std::ceil(raw)), false};
}

}  // namespace

int py_support(int a, double c_a) { return py_support_snap(a, c_a).first; }

ProbabilityDistribution dist_py(int a, double c_a) {
  const auto [lp, exact_uniform] = py_support_snap(a, c_a);
  if (lp == 1) {
    RealVector probs(1);
    probs(0) = 1.0;
    return ProbabilityDistribution(std::move(probs));
  }
  if (exact_uniform) {
    RealVector probs = RealVector::Constant(lp, 1.0 / lp);
    return ProbabilityDistribution(std::move(probs));
  }
  double c = std::min(c_a, 1.0);
  // (L'-1) p^a + (1 - (L'-1)p)^a = c is monotone increasing in p on
  // [1/L', 1/(L'-1)].
  auto excess = [&](double p) {
    return (lp - 1) * pow_int(p, a) + pow_int(1.0 - (lp - 1) * p, a) - c;
  };
  double lo = 1.0 / lp, hi = 1.0 / (lp - 1);
  if (excess(lo) > 0.0) {
    // c just below L'^{1-a} after rounding: uniform case.
    RealVector probs = RealVector::Constant(lp, 1.0 / lp);
    return ProbabilityDistribution(std::move(probs));
  }
  while (hi - lo > kBisectTol) {
    double mid = 0.5 * (lo + hi);
    (excess(mid) < 0.0 ? lo : hi) = mid;
  }
  double p = 0.5 * (lo + hi);
  double p_s = 1.0 - (lp - 1) * p;
  RealVector probs(lp);
  for (int i = 0; i < lp - 1; ++i) probs(i) = p;
  probs(lp - 1) = p_s;
  probs /= probs.sum();
  return ProbabilityDistribution(std::move(probs));
}

Theorem1Bounds theorem1_bounds(int L, int a, double c_a, double alpha) {
  BoundParams params{L, a, alpha, c_a};
  double c = validate_bound_params(params);
  double h_x = renyi_entropy(dist_px(L, a, c), alpha);
  double h_y = renyi_entropy(dist_py(a, c), alpha);
  if (alpha <= a) return {h_y, h_x};
  return {h_x, h_y};
}

double q_alpha(int L, int a, double c_a, double alpha) {
  if (alpha < a) {
    throw std::invalid_argument("q_alpha: requires alpha >= a");
  }
  BoundParams params{L, a, alpha, c_a};
  double c = validate_bound_params(params);
  PxSolution sol = solve_px(L, a, c);
  if (std::isinf(alpha)) return -std::log(sol.p);

  double ratio = sol.p_s / sol.p;
  double g = std::pow(static_cast<double>(L - 1),
                      static_cast<double>(a) / alpha);
  double first = alpha * std::log(sol.p) / (1.0 - alpha);
  double second = std::log(static_cast<double>(L)) /
                  ((1.0 - alpha) * std::log1p(g)) *
                  std::log1p(g * pow_int(ratio, a));
  return first + second;
}

double bound_ket(int L, int a, double c_a, double alpha) {
  BoundParams params{L, a, alpha, c_a};
  double c = validate_bound_params(params);
  if (alpha == 1.0) {
    throw std::invalid_argument("bound_ket: unsupported at alpha = 1");
  }
  if (std::isinf(alpha)) return -std::log(c) / a;
  return alpha / (a * (1.0 - alpha)) * std::log(c);
}

double bound_ras(int L, int a, double c_a, double alpha) {
  BoundParams params{L, a, alpha, c_a};
  double c = validate_bound_params(params);
  if (alpha == 1.0) {
    throw std::invalid_argument("bound_ras: unsupported at alpha = 1");
  }
  PxSolution sol = solve_px(L, a, c);
  if (std::isinf(alpha)) return -std::log(sol.p);
  return ((alpha - a) * std::log(sol.p) + std::log(c)) / (1.0 - alpha);
}

double design_ic_bound(int L, int d, int a) {
  if (L < 2 || d < 2 || a < 2) {
    throw std::invalid_argument("design_ic_bound: need L, d, a >= 2");
  }
  return pow_int(1.0 / L, a - 1) * pow_int(static_cast<double>(d), a) *
         design_constant(d, a);
}

AverageIc average_ic_from_state(const DsmSet& dsm, const DensityOperator& rho,
                                int a) {
  if (a < 2) {
    throw std::invalid_argument("average_ic_from_state: a must be >= 2");
  }
  if (dsm.povms.empty()) {
    throw std::invalid_argument("average_ic_from_state: empty DSM set");
  }
  double total = 0.0;
  for (const Povm& povm : dsm.povms) {
    total += index_coincidence(born_probabilities(povm, rho), a);
  }
  return {total / dsm.n_settings(), a <= dsm.strength};
}

BoundReport compare_bounds(const BoundParams& params, int theta) {
  double c = validate_bound_params(params);
  if (theta < 1) throw std::invalid_argument("compare_bounds: theta >= 1");
  BoundReport report;
  report.params = params;
  report.params.c_a = c;

  PxSolution sol = solve_px(params.L, params.a, c);
  report.p = sol.p;
  report.p_s = sol.p_s;
  report.L_prime = py_support(params.a, c);

  if (theta == 1) {
    report.q1 = theorem1_bounds(params.L, params.a, c, params.alpha).lower;
  }
  if (params.alpha >= params.a) {
    report.q2 = q_alpha(params.L, params.a, c, params.alpha);
    report.q_ras = bound_ras(params.L, params.a, c, params.alpha);
    report.q_ket = bound_ket(params.L, params.a, c, params.alpha);
    const double tol = 1e-10;
    if (report.q1 && *report.q1 < *report.q2 - tol) report.ordering_ok = false;
    if (*report.q2 < *report.q_ras - tol) report.ordering_ok = false;
    if (*report.q_ras < *report.q_ket - tol) report.ordering_ok = false;
  }
  return report;
}

IcoBest ico_best_bound(double alpha) {
  if (alpha < 2.0) {
    throw std::invalid_argument("ico_best_bound: alpha must be >= 2");
  }
  IcoBest best;
  for (int a = 2; a <= 5; ++a) {
    if (alpha < a) break;
    double value = q_alpha(2, a, 2.0 / (a + 1), alpha);
    if (best.a_star == 0 || value > best.value) {
      best.a_star = a;
      best.value = value;
    }
  }
  return best;
}

std::vector<DiagramRow> info_diagram_samples(
    int L, int a, int n_samples, std::uint64_t seed,
    const std::vector<double>& alphas, int boundary_resolution) {
  if (L < 2 || a < 2) {
    throw std::invalid_argument("info_diagram_samples: need L, a >= 2");
  }
  if (n_samples < 1 || boundary_resolution < 2) {
    throw std::invalid_argument(
        "info_diagram_samples: need samples >= 1 and resolution >= 2");
  }
  std::vector<DiagramRow> rows;
  rows.reserve(static_cast<std::size_t>(n_samples + 2 * boundary_resolution) *
               alphas.size());
  SplitRng rng(seed);
  for (int s = 0; s < n_samples; ++s) {
    ProbabilityDistribution p(rng.dirichlet(L));
    double c = index_coincidence(p, a);
    for (double alpha : alphas) {
      rows.push_back({c, renyi_entropy(p, alpha), alpha,
                      DiagramRow::Kind::sample});
    }
  }
  const double c_lo = pow_int(1.0 / L, a - 1);
  for (int g = 0; g < boundary_resolution; ++g) {
    double c = c_lo + (1.0 - c_lo) * g / (boundary_resolution - 1);
    for (double alpha : alphas) {
      Theorem1Bounds b = theorem1_bounds(L, a, c, alpha);
      rows.push_back({c, b.upper, alpha, DiagramRow::Kind::ub});
      rows.push_back({c, b.lower, alpha, DiagramRow::Kind::lb});
    }
  }
  return rows;
}

}  // namespace qdsm
