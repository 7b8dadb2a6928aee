#include "qdsm/selftest.hpp"

#include <cmath>
#include <sstream>

#include "qdsm/auxops.hpp"
#include "qdsm/design_search.hpp"
#include "qdsm/designs.hpp"
#include "qdsm/entdetect.hpp"
#include "qdsm/eur.hpp"
#include "qdsm/qcore.hpp"
#include "qdsm/rng.hpp"

namespace qdsm {

namespace {

class Checker {
 public:
  explicit Checker(std::string name) { result_.name = std::move(name); }

  void check(bool ok, const std::string& what) {
    ++result_.checks;
    if (!ok) {
      ++result_.failures;
      result_.messages.push_back(what);
    }
  }

  void near(double value, double expected, double tol,
            const std::string& what) {
    std::ostringstream os;
    os << what << ": " << value << " vs " << expected;
    check(std::abs(value - expected) <= tol, os.str());
  }

  SuiteResult take() { return std::move(result_); }

 private:
  SuiteResult result_;
};

double factorial_ratio_trace(int d, int t) {
  // (t+d-1)! / (t! (d-1)!)
  double r = 1.0;
  for (int j = 1; j <= t; ++j) {
    r *= static_cast<double>(d - 1 + j) / static_cast<double>(j);
  }
  return r;
}

}  // namespace

SuiteResult selftest_qcore(std::uint64_t seed) {
  Checker c("qcore");
  SplitRng rng(seed);

  // f_t route agreement and range, over random states and small (d, t).
  for (int rep = 0; rep < 12; ++rep) {
    int d = 2 + static_cast<int>(rng.next_u64() % 3);  // 2..4
    int rank = 1 + static_cast<int>(rng.next_u64() % d);
    DensityOperator rho = random_density(d, rank, rng.next_u64());
    for (int t = 1; t <= 5; ++t) {
      if (std::pow(double(d), t) > kDefaultSizeCap) continue;
      double cycle = f_t(rho, t, FtMethod::cycle_index);
      double proj = f_t(rho, t, FtMethod::projector);
      c.near(cycle, proj, 1e-10, "f_t route mismatch");
      double lower = factorial_ratio_trace(d, t) / std::pow(double(d), t);
      c.check(cycle >= lower - 1e-10 && cycle <= 1.0 + 1e-10,
              "f_t outside [lower, 1]");
    }
  }

  // Symmetric projector: idempotent, Hermitian, integer trace.
  for (auto [d, t] : {std::pair{2, 2}, {2, 5}, {3, 3}, {4, 2}}) {
    Matrix p = sym_projector(d, t);
    c.check((p * p - p).cwiseAbs().maxCoeff() <= 1e-10,
            "sym_projector not idempotent");
    c.check((p - p.adjoint()).cwiseAbs().maxCoeff() <= 1e-10,
            "sym_projector not Hermitian");
    double tr = p.trace().real();
    c.near(tr, std::round(tr), 1e-9, "sym_projector trace not integral");
    c.near(tr, factorial_ratio_trace(d, t), 1e-9, "sym_projector trace");
  }

  // Born probabilities are valid distributions.
  QuantumDesign ico = builtin_design(BuiltinDesign::icosahedron);
  DsmSet single = group_to_povms(ico, single_group(ico));
  for (int rep = 0; rep < 20; ++rep) {
    DensityOperator rho = random_density(2, 1 + (rep % 2), rng.next_u64());
    ProbabilityDistribution p =
        born_probabilities(single.povms.front(), rho);
    c.check(p.probs().minCoeff() >= 0.0, "negative Born probability");
    c.near(p.probs().sum(), 1.0, 1e-12, "Born probabilities sum");
  }
  return c.take();
}

SuiteResult selftest_designs(
    std::uint64_t seed,
    const std::optional<std::filesystem::path>& extra_design) {
  Checker c("designs");
  SplitRng rng(seed);

  // Builtins certify at every strength up to their claim.
  for (BuiltinDesign which :
       {BuiltinDesign::icosahedron, BuiltinDesign::mub_qubit,
        BuiltinDesign::snub_cube_7}) {
    QuantumDesign d = builtin_design(which);
    for (int a = 1; a <= d.strength; ++a) {
      DesignReport report = verify_design(d, a, 1e-8);
      c.check(report.pass, d.name + " fails verification at t = " +
                               std::to_string(a));
    }
  }

  // POVM groupings resolve to identity.
  QuantumDesign ico = builtin_design(BuiltinDesign::icosahedron);
  for (const auto& groups :
       {antipodal_pairs(ico), single_group(ico)}) {
    DsmSet dsm = group_to_povms(ico, groups);
    for (const Povm& povm : dsm.povms) {
      Matrix sum = Matrix::Zero(2, 2);
      for (const Matrix& e : povm.effects()) sum += e;
      c.check((sum - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-10,
              "POVM effects do not sum to identity");
    }
  }

  // Frame potential respects the Welch bound on random vector sets.
  for (int rep = 0; rep < 10; ++rep) {
    int k = 4 + static_cast<int>(rng.next_u64() % 8);
    std::vector<Vector> vecs;
    for (int i = 0; i < k; ++i) vecs.push_back(rng.haar_vector(2));
    for (int t = 1; t <= 4; ++t) {
      double fp = frame_potential(vecs, t);
      double welch = double(k) * k * design_constant(2, t);
      c.check(fp >= welch - 1e-9, "frame potential below Welch bound");
    }
  }

  // Round-trip through the design file format.
  {
    auto tmp = std::filesystem::temp_directory_path() /
               ("qdsm_selftest_design_" + std::to_string(seed) + ".json");
    save_design(ico, tmp);
    QuantumDesign back = load_design(tmp);
    double dev = 0.0;
    for (int i = 0; i < ico.size(); ++i) {
      dev = std::max(dev, (back.vectors[i] - ico.vectors[i]).cwiseAbs()
                              .maxCoeff());
    }
    c.check(dev <= 1e-15, "design file round trip drifted");
    std::filesystem::remove(tmp);
  }

  if (extra_design) {
    try {
      QuantumDesign d = load_design(*extra_design);
      DesignReport report = verify_design(d, d.strength, 1e-8);
      c.check(report.pass, "design file " + extra_design->string() +
                               " failed certification at claimed strength");
    } catch (const std::exception& e) {
      c.check(false, "design file " + extra_design->string() + ": " +
                         e.what());
    }
  }
  return c.take();
}

SuiteResult selftest_design_search(std::uint64_t seed) {
  Checker c("design_search");

  // Analytic gradient against central finite differences.
  SplitRng rng(seed);
  for (int t : {2, 5}) {
    std::vector<Vector> vecs;
    for (int i = 0; i < 5; ++i) vecs.push_back(rng.haar_vector(2));
    std::vector<Vector> grad = frame_potential_gradient(vecs, t);
    const double h = 1e-6;
    for (int j = 0; j < 2; ++j) {
      for (int m = 0; m < 2; ++m) {
        for (int part = 0; part < 2; ++part) {
          auto shifted = [&](double delta) {
            std::vector<Vector> v = vecs;
            v[j](m) += (part == 0) ? std::complex<double>(delta, 0)
                                   : std::complex<double>(0, delta);
            return frame_potential(v, t);
          };
          double fd = (shifted(h) - shifted(-h)) / (2.0 * h);
          // d/dRe = 2 Re(dPhi/dpsi*), d/dIm = 2 Im(dPhi/dpsi*).
          double an = (part == 0) ? 2.0 * grad[j](m).real()
                                  : 2.0 * grad[j](m).imag();
          c.check(std::abs(fd - an) <= 1e-5 * std::max(1.0, std::abs(fd)),
                  "frame potential gradient mismatch vs finite differences");
        }
      }
    }
  }

  // A 2-design search in d = 2 converges quickly and certifies.
  SearchConfig config;
  config.d = 2;
  config.K = 6;
  config.t = 2;
  config.seed = seed;
  config.max_iters = 20000;
  config.tol = 1e-10;
  config.restarts = 3;
  SearchResult result = search_design(config);
  c.check(result.converged, "6-vector 2-design search did not converge");
  c.check(result.residual >= -1e-12, "frame potential above Welch violated");
  if (result.converged) {
    c.check(verify_design(result.design, 2, 1e-7).pass,
            "search result failed verify_design");
  }
  return c.take();
}

SuiteResult selftest_eur(std::uint64_t seed) {
  Checker c("eur");
  SplitRng rng(seed);

  const std::vector<double> alphas = {0.5, 1.0, 2.0, 3.0, 5.0, kAlphaInf};

  // Theorem 1 sandwich plus IC reproduction on random distributions.
  for (int rep = 0; rep < 400; ++rep) {
    int l = 2 + static_cast<int>(rng.next_u64() % 7);
    int a = 2 + static_cast<int>(rng.next_u64() % 3);
    ProbabilityDistribution p(rng.dirichlet(l));
    double ca = index_coincidence(p, a);
    for (double alpha : alphas) {
      Theorem1Bounds b = theorem1_bounds(l, a, ca, alpha);
      double h = renyi_entropy(p, alpha);
      c.check(h >= b.lower - 1e-9 && h <= b.upper + 1e-9,
              "Theorem 1 sandwich violated");
    }
    c.near(index_coincidence(dist_px(l, a, ca), a), ca, 1e-10,
           "I_a(P_x) != c_a");
    c.near(index_coincidence(dist_py(a, ca), a), ca, 1e-10,
           "I_a(P_y) != c_a");
  }

  // Bound ordering and alpha = a equality on a small grid.
  for (int l : {2, 12, 24}) {
    for (int a : {2, 3, 4}) {
      double c_lo = std::pow(1.0 / l, a - 1);
      for (int g = 1; g <= 8; ++g) {
        double ca = c_lo + (1.0 - c_lo) * g / 9.0;
        for (double alpha : {double(a), a + 0.5, 2.0 * a, 1e6}) {
          BoundReport report = compare_bounds({l, a, alpha, ca});
          c.check(report.ordering_ok, "bound ordering violated");
          if (alpha == double(a)) {
            double closed = std::log(ca) / (1.0 - a);
            c.near(*report.q1, closed, 1e-10, "q1 at alpha = a");
            c.near(*report.q2, closed, 1e-10, "q2 at alpha = a");
            c.near(*report.q_ras, closed, 1e-10, "q_ras at alpha = a");
            c.near(*report.q_ket, closed, 1e-10, "q_ket at alpha = a");
          }
          if (alpha == 1e6) {
            double limit = -std::log(report.p);
            c.near(*report.q2, limit, 1e-4, "q2 at large alpha");
            c.near(*report.q_ras, limit, 1e-4, "q_ras at large alpha");
          }
        }
      }
    }
  }

  // Convexity of Q_alpha in c_a.
  for (int rep = 0; rep < 200; ++rep) {
    int l = 2 + static_cast<int>(rng.next_u64() % 23);
    int a = 2 + static_cast<int>(rng.next_u64() % 3);
    double alpha = a + 6.0 * rng.uniform();
    double c_lo = std::pow(1.0 / l, a - 1);
    double c1 = c_lo + (1.0 - c_lo) * rng.uniform();
    double c2 = c_lo + (1.0 - c_lo) * rng.uniform();
    double lam = rng.uniform();
    double mix = q_alpha(l, a, lam * c1 + (1.0 - lam) * c2, alpha);
    double chord = lam * q_alpha(l, a, c1, alpha) +
                   (1.0 - lam) * q_alpha(l, a, c2, alpha);
    c.check(mix <= chord + 1e-9, "Q_alpha not convex in c_a");
  }

  // Renyi entropy nonincreasing in alpha.
  for (int rep = 0; rep < 100; ++rep) {
    ProbabilityDistribution p(
        rng.dirichlet(2 + static_cast<int>(rng.next_u64() % 7)));
    double prev = renyi_entropy(p, 0.25);
    for (double alpha : {0.5, 1.0, 1.7, 2.0, 3.0, 6.0, 20.0, kAlphaInf}) {
      double h = renyi_entropy(p, alpha);
      c.check(h <= prev + 1e-10, "Renyi entropy increased with alpha");
      prev = h;
    }
  }

  // Measured average IC matches the design identity.
  QuantumDesign ico = builtin_design(BuiltinDesign::icosahedron);
  DsmSet pairs = group_to_povms(ico, antipodal_pairs(ico));
  for (int rep = 0; rep < 50; ++rep) {
    DensityOperator rho = random_density(2, 1 + (rep % 2), rng.next_u64());
    for (int a = 2; a <= 5; ++a) {
      double expected = design_ic_bound(2, 2, a) * f_t(rho, a);
      c.near(average_ic_from_state(pairs, rho, a).value, expected, 1e-10,
             "average IC identity");
    }
  }
  return c.take();
}

SuiteResult selftest_entdetect(std::uint64_t seed) {
  Checker c("entdetect");
  SplitRng rng(seed);

  LocalScheme ico4 = icosahedron_single_scheme(4);
  LocalScheme ico2 = icosahedron_single_scheme(2);
  LocalScheme mub2 = mub_conjugate_scheme();
  ExponentVector a4{{4, 4, 4, 4}};
  ExponentVector a2{{2, 2}};

  const double rhs3_ico2 = theorem3_rhs(ico2, a2);
  const double rhs4_ico2 = theorem4_rhs(ico2, a2);
  const double rhs3_ico4 = theorem3_rhs(ico4, a4);
  const double rhs4_ico4 = theorem4_rhs(ico4, a4);
  const double rhs3_mub = theorem3_rhs(mub2, a2);

  // Separability soundness on random product states and mixtures.
  auto product_state = [&](int n, SplitRng& r) {
    std::vector<Matrix> factors;
    for (int q = 0; q < n; ++q) {
      Vector psi = r.haar_vector(2);
      factors.push_back(psi * psi.adjoint());
    }
    Matrix m = tensor_product(factors);
    m = 0.5 * (m + Matrix(m.adjoint()));
    m /= m.trace().real();
    return DensityOperator(std::move(m));
  };
  for (int rep = 0; rep < 200; ++rep) {
    SplitRng r = rng.derive(rep);
    DensityOperator rho2 = product_state(2, r);
    c.check(correlation_j(ico2, rho2) <= rhs3_ico2 + 1e-10,
            "Theorem 3 violated by a 2-qubit product state (ico)");
    c.check(correlation_jtilde(ico2, rho2) <= rhs4_ico2 + 1e-10,
            "Theorem 4 violated by a 2-qubit product state (ico)");
    c.check(correlation_j(mub2, rho2) <= rhs3_mub + 1e-10,
            "Theorem 3 violated by a 2-qubit product state (mub)");
    DensityOperator rho4 = product_state(4, r);
    c.check(correlation_j(ico4, rho4) <= rhs3_ico4 + 1e-10,
            "Theorem 3 violated by a 4-qubit product state");
    c.check(correlation_jtilde(ico4, rho4) <= rhs4_ico4 + 1e-10,
            "Theorem 4 violated by a 4-qubit product state");
  }
  for (int rep = 0; rep < 30; ++rep) {
    SplitRng r = rng.derive(1000 + rep);
    int n_terms = 2 + static_cast<int>(r.next_u64() % 3);
    Eigen::VectorXd w = r.dirichlet(n_terms);
    Matrix m = Matrix::Zero(16, 16);
    for (int k = 0; k < n_terms; ++k) {
      m += w(k) * product_state(4, r).matrix();
    }
    DensityOperator rho(std::move(m));
    c.check(correlation_j(ico4, rho) <= rhs3_ico4 + 1e-10,
            "Theorem 3 violated by a separable mixture");
    c.check(correlation_jtilde(ico4, rho) <= rhs4_ico4 + 1e-10,
            "Theorem 4 violated by a separable mixture");
  }

  // J-tilde vanishes on the maximally mixed state.
  c.near(correlation_jtilde(ico4, DensityOperator::maximally_mixed(16)), 0.0,
         1e-13, "J-tilde at maximally mixed");

  // Linearity of J, convexity of J-tilde.
  {
    DensityOperator r1 = state_rho_x_phi(0.8, 0.7);
    DensityOperator r2 = state_psi_beta_phi(0.4, 1.1);
    for (double lam : {0.25, 0.5, 0.75}) {
      Matrix m = lam * r1.matrix() + (1.0 - lam) * r2.matrix();
      DensityOperator mix(std::move(m));
      double j_mix = correlation_j(ico4, mix);
      double j_chord = lam * correlation_j(ico4, r1) +
                       (1.0 - lam) * correlation_j(ico4, r2);
      c.near(j_mix, j_chord, 1e-11, "J not linear in rho");
      double jt_mix = correlation_jtilde(ico4, mix);
      double jt_chord = lam * correlation_jtilde(ico4, r1) +
                        (1.0 - lam) * correlation_jtilde(ico4, r2);
      c.check(jt_mix <= jt_chord + 1e-11, "J-tilde not convex in rho");
    }
  }

  // Modified bound nonnegative and equal to the pure-state shifted moment.
  for (int a : {2, 4}) {
    double bound = modified_ic_bound(12, 2, a, 12);
    c.check(bound >= 0.0, "modified IC bound negative");
    for (int rep = 0; rep < 20; ++rep) {
      DensityOperator rho = haar_random_state(2, rng.next_u64());
      ProbabilityDistribution p =
          born_probabilities(ico2.subsystems[0].povms[0], rho);
      double moment = 0.0;
      for (int i = 0; i < p.size(); ++i) {
        moment += std::pow(p[i] - 1.0 / 12.0, a);
      }
      c.near(moment, bound, 1e-12, "shifted moment not state-independent");
    }
  }
  return c.take();
}

SuiteResult selftest_auxops(std::uint64_t seed) {
  Checker c("aux");
  SplitRng rng(seed);

  // Choi vectors reproduce the Hilbert-Schmidt inner product.
  for (int rep = 0; rep < 50; ++rep) {
    int d = 2 + static_cast<int>(rng.next_u64() % 3);
    Matrix a(d, d), b(d, d);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        a(i, j) = rng.complex_normal();
        b(i, j) = rng.complex_normal();
      }
    }
    std::complex<double> lhs = choi_vector(a).dot(choi_vector(b));
    std::complex<double> rhs = (a.adjoint() * b).trace();
    c.check(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)),
            "Choi inner product mismatch");
  }

  // Higher-order IC inequality across builtin DSM sets.
  QuantumDesign ico = builtin_design(BuiltinDesign::icosahedron);
  QuantumDesign mub = builtin_design(BuiltinDesign::mub_qubit);
  std::vector<DsmSet> sets;
  sets.push_back(group_to_povms(ico, antipodal_pairs(ico)));
  sets.push_back(group_to_povms(ico, single_group(ico)));
  sets.push_back(group_to_povms(mub, antipodal_pairs(mub)));
  for (const DsmSet& dsm : sets) {
    for (int a = 2; a <= std::min(3, dsm.strength); ++a) {
      for (int rep = 0; rep < 40; ++rep) {
        DensityOperator rho = random_density(2, 1 + (rep % 2),
                                             rng.next_u64());
        IcHighReport report = high_order_ic_check(dsm, rho, a);
        c.check(report.lhs <= report.rhs + 1e-10,
                "higher-order IC inequality violated");
      }
    }
  }

  // Unbiasedness range and MUB maximality.
  BasisSet mubs = mub_triple();
  c.near(unbiasedness(mubs), 2.0, 1e-10, "U at the MUB triple");
  for (int rep = 0; rep < 50; ++rep) {
    SplitRng r = rng.derive(rep);
    BasisSet bs;
    bs.dim = 2;
    for (int b = 0; b < 3; ++b) bs.bases.push_back(haar_random_basis(2, r));
    double u = unbiasedness(bs);
    c.check(u >= -1e-10 && u <= 2.0 + 1e-10, "U out of range");
  }

  // Operator norm against the dense oracle (the check is built in; just
  // exercise it).
  for (int rep = 0; rep < 20; ++rep) {
    int d = 2 + static_cast<int>(rng.next_u64() % 15);
    Matrix h(d, d);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) h(i, j) = rng.complex_normal();
    }
    h = 0.5 * (h + Matrix(h.adjoint()));
    try {
      operator_norm(h);
      c.check(true, "");
    } catch (const std::exception& e) {
      c.check(false, std::string("operator_norm: ") + e.what());
    }
  }

  // The MUB IC bound reproduces the closed form.
  c.near(generic_ic_bound(mubs.bases, 2), 2.0, 1e-9, "MUB joint IC bound");
  return c.take();
}

std::vector<SuiteResult> selftest_all(
    std::uint64_t seed,
    const std::optional<std::filesystem::path>& extra_design) {
  return {selftest_qcore(seed),
          selftest_designs(seed, extra_design),
          selftest_design_search(seed),
          selftest_eur(seed),
          selftest_entdetect(seed),
          selftest_auxops(seed)};
}

SuiteResult selftest_suite(
    const std::string& name, std::uint64_t seed,
    const std::optional<std::filesystem::path>& extra_design) {
  if (name == "qcore") return selftest_qcore(seed);
  if (name == "designs") return selftest_designs(seed, extra_design);
  if (name == "design_search") return selftest_design_search(seed);
  if (name == "eur") return selftest_eur(seed);
  if (name == "entdetect") return selftest_entdetect(seed);
  if (name == "aux") return selftest_auxops(seed);
  throw std::invalid_argument("unknown selftest suite: " + name);
}

}  // namespace qdsm
