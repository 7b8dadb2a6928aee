// Acceptance suite: one criterion per function, one PASS/FAIL line each.
// Exit code is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "qdsm/auxops.hpp"
#include "qdsm/design_search.hpp"
#include "qdsm/designs.hpp"
#include "qdsm/entdetect.hpp"
#include "qdsm/eur.hpp"
#include "qdsm/qcore.hpp"
#include "qdsm/rng.hpp"

using namespace qdsm;

namespace {

std::string g_cli_path;

struct AcceptanceCriterion {
  int number;
  std::string label;
  double budget_seconds;  // 0 = no budget stated
  std::function<void(std::ostream&)> run;  // throws on failure
};

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Failure(what);
}

void require_near(double value, double expected, double tol,
                  const std::string& what) {
  if (!(std::abs(value - expected) <= tol)) {
    std::ostringstream os;
    os << what << ": " << value << " vs " << expected << " (tol " << tol
       << ")";
    throw Failure(os.str());
  }
}

// ---------------------------------------------------------------------
// 1. Design certification.
void criterion_design_certification(std::ostream& log) {
  QuantumDesign ico = builtin_design(BuiltinDesign::icosahedron);
  for (int t = 2; t <= 5; ++t) {
    DesignReport r = verify_design(ico, t, 1e-9);
    require(r.pass, "icosahedron fails at t = " + std::to_string(t));
    require(r.residual <= 1e-9, "residual above 1e-9 at t = " +
                                    std::to_string(t));
    require_near(r.frame_potential, 144.0 * design_constant(2, t), 1e-9,
                 "frame potential at t = " + std::to_string(t));
  }
  require(!verify_design(ico, 7, 1e-9).pass, "icosahedron passes at t = 7");
  log << "t = 2..5 certified, t = 7 rejected";
}

// 2. Design search.
void criterion_design_search(std::ostream& log) {
  SearchConfig config;
  config.d = 2;
  config.K = 24;
  config.t = 7;
  config.seed = 424242;
  config.tol = 1e-12;
  config.max_iters = 100000;
  config.restarts = 4;
  SearchResult result = search_design(config);
  require(result.converged, "search did not converge");
  require(result.residual <= 1e-8, "potential gap above 1e-8");
  require(verify_design(result.design, 7, 1e-8).pass,
          "search result fails verify_design at t = 7");

  DsmSet povm = group_to_povms(result.design, single_group(result.design));
  SplitRng rng(7);
  double worst = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    DensityOperator rho = DensityOperator::pure(rng.haar_vector(2));
    for (int a = 2; a <= 7; ++a) {
      double expected = 24.0 / ((a + 1) * std::pow(12.0, a));
      double got = average_ic_from_state(povm, rho, a).value;
      worst = std::max(worst, std::abs(got - expected));
    }
  }
  require(worst <= 1e-9, "B_a deviation " + std::to_string(worst));
  log << "gap " << result.residual << ", max |B_a - closed form| = " << worst;
}

// 3. IC identity.
void criterion_ic_identity(std::ostream& log) {
  QuantumDesign ico = builtin_design(BuiltinDesign::icosahedron);
  DsmSet six = group_to_povms(ico, antipodal_pairs(ico));
  QuantumDesign mub = builtin_design(BuiltinDesign::mub_qubit);
  DsmSet mub3 = group_to_povms(mub, antipodal_pairs(mub));

  SplitRng rng(1001);
  double worst_ico = 0.0, worst_mub = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    DensityOperator rho = random_density(2, 1 + rep % 2, rng.next_u64());
    for (int a = 2; a <= 5; ++a) {
      double expected = design_ic_bound(2, 2, a) * f_t(rho, a);
      worst_ico = std::max(
          worst_ico,
          std::abs(average_ic_from_state(six, rho, a).value - expected));
    }
    double total_i2 = 3.0 * average_ic_from_state(mub3, rho, 2).value;
    worst_mub = std::max(worst_mub,
                         std::abs(total_i2 - (1.0 + rho.purity())));
  }
  require(worst_ico <= 1e-10, "icosahedron IC identity drifts " +
                                  std::to_string(worst_ico));
  require(worst_mub <= 1e-10,
          "MUB total I_2 drifts " + std::to_string(worst_mub));
  log << "max deviations: ico " << worst_ico << ", mub " << worst_mub;
}

// 4. Exact values.
void criterion_exact_values(std::ostream& log) {
  const double ln18 = std::log(18.0);
  for (double alpha : {0.5, 1.0, 2.0}) {
    BoundReport r = compare_bounds({24, 2, alpha, 1.0 / 18.0});
    require(r.q1.has_value(), "q1 missing");
    require_near(*r.q1, ln18, 1e-9, "q1 at alpha " + std::to_string(alpha));
  }

  ProbabilityDistribution py = dist_py(3, 1.0 / 288.0);
  require(py.size() == 17, "L' != 17");
  require_near(py[0], (53.0 - std::sqrt(21.0)) / 816.0, 1e-10, "P_y head p");

  const double p_star = (std::sqrt(3.0) + 1.0) / (2.0 * std::sqrt(3.0));
  require_near(solve_px(2, 2, 2.0 / 3.0).p, p_star, 1e-12, "p(2,2,2/3)");
  require_near(solve_px(2, 3, 0.5).p, p_star, 1e-12, "p(2,3,1/2)");
  log << "ln 18, (53-sqrt(21))/816 and (sqrt(3)+1)/(2 sqrt(3)) reproduced";
}

// 5. Bound ordering.
void criterion_bound_ordering(std::ostream& log) {
  long cells = 0;
  for (int l : {2, 12, 24}) {
    for (int a = 2; a <= 5; ++a) {
      double c_lo = std::pow(1.0 / l, a - 1);
      for (int gc = 0; gc < 50; ++gc) {
        double c = c_lo + (1.0 - c_lo) * gc / 49.0;
        std::vector<double> alphas;
        for (double alpha = a; alpha <= 12.0; alpha += 0.5) {
          alphas.push_back(alpha);
        }
        alphas.push_back(kAlphaInf);
        for (double alpha : alphas) {
          BoundReport r = compare_bounds({l, a, alpha, c});
          ++cells;
          require(r.q1 && r.q2 && r.q_ras && r.q_ket, "missing bound");
          require(*r.q1 >= *r.q2 - 1e-10, "q1 < q2");
          require(*r.q2 >= *r.q_ras - 1e-10, "q2 < q_ras");
          require(*r.q_ras >= *r.q_ket - 1e-10, "q_ras < q_ket");
          if (alpha == double(a)) {
            double closed = std::log(c) / (1.0 - a);
            require_near(*r.q1, closed, 1e-10, "q1 at alpha = a");
            require_near(*r.q2, closed, 1e-10, "q2 at alpha = a");
            require_near(*r.q_ras, closed, 1e-10, "q_ras at alpha = a");
            require_near(*r.q_ket, closed, 1e-10, "q_ket at alpha = a");
          }
        }
      }
    }
  }
  log << cells << " grid cells ordered q1 >= q2 >= q_ras >= q_ket";
}

// 6. Figure 2/3 reproduction.
void criterion_figures(std::ostream& log) {
  // Snub cube (Fig. 2): full ordering along the alpha grid.
  for (int a : {2, 3}) {
    double c = design_ic_bound(24, 2, a);
    for (double alpha = a; alpha <= 12.0; alpha += 0.05) {
      BoundReport r = compare_bounds({24, a, alpha, c});
      require(*r.q1 >= *r.q2 - 1e-10 && *r.q2 >= *r.q_ras - 1e-10 &&
                  *r.q_ras >= *r.q_ket - 1e-10,
              "snub-cube ordering broken at alpha " + std::to_string(alpha));
    }
  }

  // Icosahedron (Fig. 3): q2 - q_ket nonnegative with the gap growing.
  for (int a : {2, 3}) {
    double c = 2.0 / (a + 1);
    double prev_gap = -1.0;
    for (double alpha = a; alpha <= 12.0; alpha += 0.05) {
      double gap = q_alpha(2, a, c, alpha) - bound_ket(2, a, c, alpha);
      require(gap >= -1e-10, "q2 below q_ket for the icosahedron");
      require(gap >= prev_gap - 1e-9, "icosahedron gap shrank with alpha");
      prev_gap = gap;
    }
  }

  // The best-exponent switch sits at alpha = 3 on a 0.01 grid.
  double switch_alpha = 0.0;
  for (double alpha = 2.0; alpha <= 4.0 + 1e-9; alpha += 0.01) {
    if (ico_best_bound(alpha).a_star == 3) {
      switch_alpha = alpha;
      break;
    }
  }
  require(std::abs(switch_alpha - 3.0) <= 0.01 + 1e-9,
          "a* switch at " + std::to_string(switch_alpha));
  log << "orderings hold; a* switches at alpha = " << switch_alpha;
}

// 7. Theorem 1 sandwich.
void criterion_sandwich(std::ostream& log) {
  const std::vector<double> alphas = {0.5, 1.0, 2.0, 3.0, 5.0, kAlphaInf};
  long checked = 0;
  for (int l : {2, 3, 24}) {
    for (int a : {2, 3}) {
      SplitRng rng(9000 + 10 * l + a);
      for (int rep = 0; rep < 20000; ++rep) {
        ProbabilityDistribution p(rng.dirichlet(l));
        double c = index_coincidence(p, a);
        for (double alpha : alphas) {
          Theorem1Bounds b = theorem1_bounds(l, a, c, alpha);
          double h = renyi_entropy(p, alpha);
          require(h >= b.lower - 1e-9 && h <= b.upper + 1e-9,
                  "sandwich violated at L=" + std::to_string(l) +
                      " a=" + std::to_string(a));
          ++checked;
        }
      }
    }
  }
  log << checked << " (distribution, alpha) pairs inside the bounds";
}

// 8. Entanglement detection scan.
void criterion_detection_scan(std::ostream& log) {
  LocalScheme scheme = icosahedron_single_scheme(4);
  ExponentVector exps{{4, 4, 4, 4}};
  std::vector<ScanPoint> points = detect_scan(
      StateFamily::rho_x_phi, scheme, exps, 200, 200, Criterion::theorem4);
  require(points.size() == 40000, "grid size");

  const double half_pi = std::numbers::pi / 2.0;
  int inner = 0, inner_violated = 0, low_noise_violations = 0;
  for (const ScanPoint& p : points) {
    if (p.param1 == 1.0 && p.param2 > 0.01 && p.param2 < half_pi - 0.01) {
      ++inner;
      if (p.violated) ++inner_violated;
    }
    if (p.param1 <= 0.33 && p.violated) ++low_noise_violations;
  }
  require(inner > 0, "empty x = 1 row");
  require(inner_violated == inner,
          "x = 1 row: " + std::to_string(inner - inner_violated) +
              " undetected interior points");
  require(low_noise_violations == 0,
          std::to_string(low_noise_violations) + " violations at x <= 0.33");
  log << "x = 1 row fully detected (" << inner
      << " points); no violations at x <= 0.33";
}

// 9. Separability soundness.
void criterion_separability(std::ostream& log) {
  LocalScheme ico2 = icosahedron_single_scheme(2);
  LocalScheme ico4 = icosahedron_single_scheme(4);
  ExponentVector a2{{2, 2}};
  ExponentVector a4{{4, 4, 4, 4}};
  const double rhs3_2 = theorem3_rhs(ico2, a2);
  const double rhs4_2 = theorem4_rhs(ico2, a2);
  const double rhs3_4 = theorem3_rhs(ico4, a4);
  const double rhs4_4 = theorem4_rhs(ico4, a4);

  auto product_state = [](int n, SplitRng& rng) {
    std::vector<Matrix> factors;
    for (int q = 0; q < n; ++q) {
      Vector psi = rng.haar_vector(2);
      factors.push_back(psi * psi.adjoint());
    }
    Matrix m = tensor_product(factors);
    m = 0.5 * (m + Matrix(m.adjoint()));
    m /= m.trace().real();
    return DensityOperator(std::move(m));
  };

  SplitRng root(31337);
  double min_margin = 1e9;
  for (int rep = 0; rep < 5000; ++rep) {
    SplitRng rng = root.derive(rep);
    DensityOperator rho2 = product_state(2, rng);
    min_margin = std::min(min_margin, rhs3_2 - correlation_j(ico2, rho2));
    min_margin =
        std::min(min_margin, rhs4_2 - correlation_jtilde(ico2, rho2));
    DensityOperator rho4 = product_state(4, rng);
    min_margin = std::min(min_margin, rhs3_4 - correlation_j(ico4, rho4));
    min_margin =
        std::min(min_margin, rhs4_4 - correlation_jtilde(ico4, rho4));
  }
  require(min_margin >= -1e-10, "product state margin " +
                                    std::to_string(min_margin));

  double min_mix_margin = 1e9;
  for (int rep = 0; rep < 1000; ++rep) {
    SplitRng rng = root.derive(100000 + rep);
    int terms = 2 + int(rng.next_u64() % 3);
    Eigen::VectorXd w = rng.dirichlet(terms);
    Matrix m = Matrix::Zero(16, 16);
    for (int k = 0; k < terms; ++k) {
      m += w(k) * product_state(4, rng).matrix();
    }
    DensityOperator rho(std::move(m));
    min_mix_margin =
        std::min(min_mix_margin, rhs3_4 - correlation_j(ico4, rho));
    min_mix_margin =
        std::min(min_mix_margin, rhs4_4 - correlation_jtilde(ico4, rho));
  }
  require(min_mix_margin >= -1e-10, "separable mixture margin " +
                                        std::to_string(min_mix_margin));
  log << "min margins: products " << min_margin << ", mixtures "
      << min_mix_margin;
}

// 10. Modified bound oracle.
void criterion_modified_bound(std::ostream& log) {
  QuantumDesign ico = builtin_design(BuiltinDesign::icosahedron);
  DsmSet single = group_to_povms(ico, single_group(ico));
  const Povm& povm = single.povms.front();
  const double bound = modified_ic_bound(12, 2, 4, 12);

  auto shifted_moment = [&](double theta, double phi) {
    Vector psi(2);
    psi << std::cos(theta / 2.0), std::polar(std::sin(theta / 2.0), phi);
    double total = 0.0;
    for (const Matrix& effect : povm.effects()) {
      double p = (psi.adjoint() * effect * psi)(0).real();
      double dev = p - 1.0 / 12.0;
      total += dev * dev * dev * dev;
    }
    return total;
  };

  // Independent maximization: Fibonacci lattice plus pattern search.
  const int lattice = 10000;
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  double best = -1.0, bt = 0.0, bp = 0.0;
  for (int k = 0; k < lattice; ++k) {
    double z = 1.0 - 2.0 * (k + 0.5) / lattice;
    double theta = std::acos(z), phi = golden * k;
    double v = shifted_moment(theta, phi);
    if (v > best) {
      best = v;
      bt = theta;
      bp = phi;
    }
  }
  double step = 0.05;
  while (step > 1e-9) {
    bool improved = false;
    for (auto [dt, dp] : {std::pair{step, 0.0}, std::pair{-step, 0.0},
                          std::pair{0.0, step}, std::pair{0.0, -step}}) {
      double v = shifted_moment(bt + dt, bp + dp);
      if (v > best) {
        best = v;
        bt += dt;
        bp += dp;
        improved = true;
      }
    }
    if (!improved) step *= 0.5;
  }
  require_near(best, bound, 1e-9, "grid+refinement maximum");

  SplitRng rng(515);
  double worst = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    Vector psi = rng.haar_vector(2);
    double total = 0.0;
    for (const Matrix& effect : povm.effects()) {
      double p = (psi.adjoint() * effect * psi)(0).real();
      double dev = p - 1.0 / 12.0;
      total += dev * dev * dev * dev;
    }
    worst = std::max(worst, std::abs(total - bound));
  }
  require(worst <= 1e-10, "state dependence " + std::to_string(worst));
  log << "oracle max " << best << " matches 1/8640; state spread " << worst;
}

// 11. Higher-order IC.
void criterion_higher_order_ic(std::ostream& log) {
  QuantumDesign ico = builtin_design(BuiltinDesign::icosahedron);
  QuantumDesign mub = builtin_design(BuiltinDesign::mub_qubit);
  struct Case {
    DsmSet dsm;
    std::vector<int> orders;
    const char* name;
  };
  std::vector<Case> cases;
  cases.push_back({group_to_povms(ico, antipodal_pairs(ico)), {2, 3},
                   "ico theta=6"});
  cases.push_back({group_to_povms(ico, single_group(ico)), {2, 3},
                   "ico theta=1"});
  cases.push_back({group_to_povms(mub, antipodal_pairs(mub)), {2},
                   "mub theta=3"});

  double min_slack = 1e9;
  for (const Case& c : cases) {
    for (int a : c.orders) {
      // The view operator and its norm are state-independent.
      double g_norm = operator_norm(view_operator(c.dsm, a).matrix);
      SplitRng rng(7000 + a);
      for (int rep = 0; rep < 1000; ++rep) {
        DensityOperator rho = random_density(2, 1 + rep % 2,
                                             rng.next_u64());
        IcHighReport r = high_order_ic_check(c.dsm, rho, a);
        min_slack = std::min(min_slack, r.rhs - r.lhs);
        require(r.holds, std::string("inequality fails for ") + c.name);
      }
      (void)g_norm;
    }
  }
  require(min_slack >= -1e-10, "slack " + std::to_string(min_slack));
  log << "min slack " << min_slack << " across DSM sets and orders";
}

// 12. Unbiasedness trend.
void criterion_unbiasedness(std::ostream& log) {
  std::vector<double> x_grid;
  for (int i = 0; i <= 200; ++i) x_grid.push_back(i / 200.0);

  TripleResult mub = evaluate_basis_triple(mub_triple(), x_grid);
  require(std::abs(mub.x_critical - 1.0 / 3.0) <= 1e-3,
          "MUB x_critical " + std::to_string(mub.x_critical));

  std::vector<TripleResult> triples =
      random_bases_experiment(500, 606060, x_grid);

  // Spearman rank correlation between U and -x_critical.
  auto ranks = [](std::vector<double> values) {
    std::vector<int> order(values.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = int(i);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return values[a] < values[b]; });
    std::vector<double> rank(values.size());
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
      rank[order[pos]] = double(pos);
    }
    return rank;
  };
  std::vector<double> u_values, neg_x;
  for (const TripleResult& t : triples) {
    require(std::isfinite(t.x_critical), "undetecting triple");
    u_values.push_back(t.unbiasedness);
    neg_x.push_back(-t.x_critical);
  }
  std::vector<double> ru = ranks(u_values), rx = ranks(neg_x);
  double mean = (triples.size() - 1) / 2.0;
  double num = 0.0, du = 0.0, dx = 0.0;
  for (std::size_t i = 0; i < triples.size(); ++i) {
    num += (ru[i] - mean) * (rx[i] - mean);
    du += (ru[i] - mean) * (ru[i] - mean);
    dx += (rx[i] - mean) * (rx[i] - mean);
  }
  double spearman = num / std::sqrt(du * dx);
  require(spearman >= 0.5, "Spearman " + std::to_string(spearman));
  log << "Spearman(U, -x_critical) = " << spearman << " over 500 triples; "
      << "MUB x_critical = " << mub.x_critical;
}

// 13. CLI determinism.
void criterion_cli_determinism(std::ostream& log) {
  require(!g_cli_path.empty(), "CLI path not supplied (--cli)");
  auto tmp = std::filesystem::temp_directory_path();
  auto path_a = tmp / "qdsm_acc_a.csv";
  auto path_b = tmp / "qdsm_acc_b.csv";

  auto run = [&](const std::string& args) {
    std::string cmd = "\"" + g_cli_path + "\" " + args + " > /dev/null 2>&1";
    int status = std::system(cmd.c_str());
    require(WEXITSTATUS(status) == 0, "CLI failed: " + args);
  };
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };

  const std::vector<std::string> commands = {
      "eur diagram --L 3 --a 3 --alphas 1,5 --samples 2000 --resolution 64 "
      "--seed 555",
      "eur compare --design snub-cube --a 2 --alpha-min 2 --alpha-max 12 "
      "--steps 50 --seed 555",
      "entdetect scan --family unbiasedness --sets 6 --seed 555",
      "entdetect scan --family rho-x-phi --grid 24 --a 4 --seed 555",
  };
  for (const std::string& cmd : commands) {
    run(cmd + " --out " + path_a.string());
    run(cmd + " --out " + path_b.string());
    require(slurp(path_a) == slurp(path_b),
            "outputs differ for: " + cmd);
    require(slurp(path_a).rfind("alpha", 0) == 0 ||
                slurp(path_a).rfind("c_a", 0) == 0 ||
                slurp(path_a).rfind("U", 0) == 0 ||
                slurp(path_a).rfind("param1", 0) == 0,
            "missing header row");
  }
  std::filesystem::remove(path_a);
  std::filesystem::remove(path_b);
  std::filesystem::remove(path_a.string() + ".manifest.json");
  std::filesystem::remove(path_b.string() + ".manifest.json");
  log << commands.size() << " commands byte-identical across reruns";
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    if (std::string(argv[i]) == "--cli" && i + 1 < argc) {
      g_cli_path = argv[++i];
    }
  }

  std::vector<AcceptanceCriterion> criteria = {
      {1, "design certification", 1.0, criterion_design_certification},
      {2, "design search", 60.0, criterion_design_search},
      {3, "IC identity", 10.0, criterion_ic_identity},
      {4, "exact values", 1.0, criterion_exact_values},
      {5, "bound ordering", 30.0, criterion_bound_ordering},
      {6, "figure 2/3 reproduction", 0.0, criterion_figures},
      {7, "theorem 1 sandwich", 60.0, criterion_sandwich},
      {8, "entanglement detection scan", 300.0, criterion_detection_scan},
      {9, "separability soundness", 120.0, criterion_separability},
      {10, "modified bound oracle", 0.0, criterion_modified_bound},
      {11, "higher-order IC", 60.0, criterion_higher_order_ic},
      {12, "unbiasedness trend", 300.0, criterion_unbiasedness},
      {13, "CLI determinism", 0.0, criterion_cli_determinism},
  };

  int failures = 0;
  for (const AcceptanceCriterion& c : criteria) {
    std::ostringstream detail;
    auto start = std::chrono::steady_clock::now();
    bool ok = true;
    std::string error;
    try {
      c.run(detail);
    } catch (const std::exception& e) {
      ok = false;
      error = e.what();
    }
    std::chrono::duration<double> dt =
        std::chrono::steady_clock::now() - start;
    if (ok && c.budget_seconds > 0.0 && dt.count() > c.budget_seconds) {
      ok = false;
      error = "runtime " + std::to_string(dt.count()) + " s exceeds budget " +
              std::to_string(c.budget_seconds) + " s";
    }
    std::printf("[%s] criterion %2d: %s (%.2f s)%s%s\n",
                ok ? "PASS" : "FAIL", c.number, c.label.c_str(), dt.count(),
                ok ? (detail.str().empty() ? "" : " -- ") : " -- ",
                ok ? detail.str().c_str() : error.c_str());
    if (!ok) ++failures;
  }
  if (failures == 0) {
    std::printf("all %zu criteria passed\n", criteria.size());
  } else {
    std::printf("%d criteria FAILED\n", failures);
  }
  return failures;
}
