// Command-line front end: design verification and search, entropic-bound
// tables, entanglement-detection scans, and the property self-test. Every
// data-producing command writes CSV plus a JSON run manifest and is
// byte-reproducible given the same seed.

#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qdsm/auxops.hpp"
#include "qdsm/design_search.hpp"
#include "qdsm/designs.hpp"
#include "qdsm/entdetect.hpp"
#include "qdsm/eur.hpp"
#include "qdsm/selftest.hpp"

namespace {

constexpr const char* kVersion = "qdsm 1.0.0";
constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitCheckFailed = 2;
constexpr int kExitNoConvergence = 3;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("QDESIGN_SEED")) {
    try {
      return std::stoull(env);
    } catch (...) {
      throw CLI::ValidationError("QDESIGN_SEED",
                                 "must be a decimal unsigned integer");
    }
  }
  return 12345;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path,
            const std::vector<std::string>& header)
      : path_(path), out_(path) {
    if (!out_) {
      throw std::runtime_error("cannot open output file " + path.string());
    }
    for (std::size_t i = 0; i < header.size(); ++i) {
      out_ << (i ? "," : "") << header[i];
    }
    out_ << "\n";
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      out_ << (i ? "," : "") << cells[i];
    }
    out_ << "\n";
  }

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

class ManifestScope {
 public:
  ManifestScope(std::string command, std::uint64_t seed)
      : command_(std::move(command)),
        seed_(seed),
        start_(std::chrono::steady_clock::now()) {}

  void param(const std::string& key, const std::string& value) {
    params_[key] = value;
  }
  void param(const std::string& key, double value) { params_[key] = value; }
  void param(const std::string& key, std::int64_t value) {
    params_[key] = value;
  }
  void output(const std::filesystem::path& p) {
    outputs_.push_back(p.string());
  }

  void write() const {
    if (outputs_.empty()) return;
    nlohmann::json j;
    j["command"] = command_;
    j["parameters"] = params_;
    j["seed"] = seed_;
    j["version"] = kVersion;
    j["outputs"] = outputs_;
    std::chrono::duration<double> dt =
        std::chrono::steady_clock::now() - start_;
    j["wall_time_s"] = dt.count();
    std::filesystem::path path(outputs_.front() + ".manifest.json");
    std::ofstream out(path);
    out << j.dump(2) << "\n";
  }

 private:
  std::string command_;
  std::uint64_t seed_;
  nlohmann::json params_ = nlohmann::json::object();
  std::vector<std::string> outputs_;
  std::chrono::steady_clock::time_point start_;
};

std::string opt_fmt(const std::optional<double>& v) {
  return v ? fmt(*v) : "nan";
}

// ---------------------------------------------------------------- design

int run_design_verify(const std::string& name, const std::string& file,
                      int t, double tol) {
  qdsm::QuantumDesign design =
      file.empty() ? qdsm::builtin_design(qdsm::parse_builtin_design(name))
                   : qdsm::load_design(file);
  qdsm::DesignReport report = qdsm::verify_design(design, t, tol);
  std::cout << "design: " << (file.empty() ? name : file) << "\n"
            << "K = " << design.size() << ", d = " << design.dim
            << ", t = " << t << "\n"
            << "frame_potential = " << fmt(report.frame_potential) << "\n"
            << "welch_bound     = " << fmt(report.welch_bound) << "\n";
  if (report.residual_available) {
    std::cout << "residual        = " << fmt(report.residual) << "\n";
  } else {
    std::cout << "residual        = (skipped: size cap; frame-potential "
                 "criterion only)\n";
  }
  std::cout << (report.pass ? "PASS" : "FAIL") << "\n";
  return report.pass ? kExitOk : kExitCheckFailed;
}

int run_design_search(int d, int k, int t, std::uint64_t seed,
                      const std::string& out, int max_iters, double tol,
                      int restarts) {
  ManifestScope manifest("design search", seed);
  manifest.param("d", std::int64_t(d));
  manifest.param("K", std::int64_t(k));
  manifest.param("t", std::int64_t(t));
  manifest.param("max_iters", std::int64_t(max_iters));
  manifest.param("tol", tol);
  manifest.param("restarts", std::int64_t(restarts));

  qdsm::SearchConfig config;
  config.d = d;
  config.K = k;
  config.t = t;
  config.seed = seed;
  config.max_iters = max_iters;
  config.tol = tol;
  config.restarts = restarts;
  qdsm::SearchResult result = qdsm::search_design(config);
  std::cout << "potential gap = " << fmt(result.residual) << " after "
            << result.iterations << " iterations (restart "
            << result.winning_restart << ")\n";
  if (!result.converged) {
    std::cout << "NOT CONVERGED\n";
    return kExitNoConvergence;
  }
  qdsm::save_design(result.design, out);
  manifest.output(out);
  manifest.write();
  std::cout << "wrote " << out << "\n";
  return kExitOk;
}

int run_design_list() {
  for (const std::string& name : qdsm::builtin_design_names()) {
    qdsm::QuantumDesign d =
        qdsm::builtin_design(qdsm::parse_builtin_design(name));
    std::cout << name << ": K = " << d.size() << ", d = " << d.dim
              << ", t = " << d.strength << "\n";
  }
  return kExitOk;
}

// ------------------------------------------------------------------- eur

struct DesignPreset {
  int L;
  int theta;
  int max_a;
};

DesignPreset eur_preset(const std::string& design) {
  if (design == "snub-cube") return {24, 1, 7};
  if (design == "icosahedron") return {2, 6, 5};
  if (design == "mub-qubit") return {2, 3, 2};
  throw CLI::ValidationError("design", "unknown design preset " + design);
}

int run_eur_compare(const std::string& design, int a, double alpha_min,
                    double alpha_max, int steps, const std::string& out,
                    std::uint64_t seed) {
  DesignPreset preset = eur_preset(design);
  if (a < 2 || a > preset.max_a) {
    throw CLI::ValidationError("a", "must lie in [2, " +
                                        std::to_string(preset.max_a) + "]");
  }
  double c_a = qdsm::design_ic_bound(preset.L, 2, a);

  ManifestScope manifest("eur compare", seed);
  manifest.param("design", design);
  manifest.param("a", std::int64_t(a));
  manifest.param("alpha_min", alpha_min);
  manifest.param("alpha_max", alpha_max);
  manifest.param("steps", std::int64_t(steps));

  CsvWriter csv(out, {"alpha", "q1", "q2", "q_ras", "q_ket"});
  for (int i = 0; i < steps; ++i) {
    double alpha = alpha_min + (alpha_max - alpha_min) * i /
                                   std::max(1, steps - 1);
    qdsm::BoundReport r =
        qdsm::compare_bounds({preset.L, a, alpha, c_a}, preset.theta);
    csv.row({fmt(alpha), opt_fmt(r.q1), opt_fmt(r.q2), opt_fmt(r.q_ras),
             opt_fmt(r.q_ket)});
  }
  manifest.output(csv.path());
  manifest.write();
  return kExitOk;
}

int run_eur_diagram(int l, int a, const std::vector<double>& alphas,
                    int samples, int resolution, const std::string& out,
                    std::uint64_t seed) {
  ManifestScope manifest("eur diagram", seed);
  manifest.param("L", std::int64_t(l));
  manifest.param("a", std::int64_t(a));
  manifest.param("samples", std::int64_t(samples));
  manifest.param("resolution", std::int64_t(resolution));

  std::vector<qdsm::DiagramRow> rows =
      qdsm::info_diagram_samples(l, a, samples, seed, alphas, resolution);
  CsvWriter csv(out, {"c_a", "H_alpha", "alpha", "kind"});
  for (const qdsm::DiagramRow& r : rows) {
    const char* kind = r.kind == qdsm::DiagramRow::Kind::sample ? "sample"
                       : r.kind == qdsm::DiagramRow::Kind::ub   ? "ub"
                                                                : "lb";
    csv.row({fmt(r.c), fmt(r.h), fmt(r.alpha), kind});
  }
  manifest.output(csv.path());
  manifest.write();
  return kExitOk;
}

int run_eur_ico_best(double alpha_min, double alpha_max, double alpha_step,
                     const std::string& out, std::uint64_t seed) {
  ManifestScope manifest("eur ico-best", seed);
  manifest.param("alpha_min", alpha_min);
  manifest.param("alpha_max", alpha_max);
  manifest.param("alpha_step", alpha_step);

  CsvWriter csv(out, {"alpha", "a_star", "value"});
  for (double alpha = alpha_min; alpha <= alpha_max + 1e-12;
       alpha += alpha_step) {
    qdsm::IcoBest best = qdsm::ico_best_bound(alpha);
    csv.row({fmt(alpha), std::to_string(best.a_star), fmt(best.value)});
  }
  manifest.output(csv.path());
  manifest.write();
  return kExitOk;
}

// ------------------------------------------------------------- entdetect

int run_entdetect_scan(const std::string& family, int grid, int a,
                       const std::string& criterion_name, int sets,
                       const std::string& out, std::uint64_t seed) {
  ManifestScope manifest("entdetect scan", seed);
  manifest.param("family", family);
  manifest.param("grid", std::int64_t(grid));
  manifest.param("a", std::int64_t(a));
  manifest.param("criterion", criterion_name);
  manifest.param("sets", std::int64_t(sets));

  if (family == "unbiasedness") {
    std::vector<double> x_grid;
    for (int i = 0; i <= 200; ++i) x_grid.push_back(i / 200.0);
    std::vector<qdsm::TripleResult> results =
        qdsm::random_bases_experiment(sets, seed, x_grid);
    CsvWriter csv(out, {"U", "x_critical"});
    for (const qdsm::TripleResult& r : results) {
      csv.row({fmt(r.unbiasedness), fmt(r.x_critical)});
    }
    manifest.output(csv.path());
    manifest.write();
    return kExitOk;
  }

  qdsm::StateFamily fam;
  if (family == "psi-beta-phi") {
    fam = qdsm::StateFamily::psi_beta_phi;
  } else if (family == "rho-x-phi") {
    fam = qdsm::StateFamily::rho_x_phi;
  } else if (family == "isotropic") {
    fam = qdsm::StateFamily::isotropic;
  } else {
    throw CLI::ValidationError("family", "unknown family " + family);
  }

  qdsm::Criterion criterion = criterion_name == "thm3"
                                  ? qdsm::Criterion::theorem3
                                  : qdsm::Criterion::theorem4;
  qdsm::LocalScheme scheme;
  qdsm::ExponentVector exps;
  if (fam == qdsm::StateFamily::isotropic) {
    scheme = qdsm::mub_conjugate_scheme();
    exps.a = {2, 2};
    criterion = qdsm::Criterion::theorem3;
  } else {
    scheme = qdsm::icosahedron_single_scheme(4);
    exps.a = {a, a, a, a};
  }

  std::vector<qdsm::ScanPoint> points =
      qdsm::detect_scan(fam, scheme, exps, grid, grid, criterion);
  CsvWriter csv(out, {"param1", "param2", "lhs", "rhs", "violated"});
  for (const qdsm::ScanPoint& p : points) {
    csv.row({fmt(p.param1), fmt(p.param2), fmt(p.lhs), fmt(p.rhs),
             p.violated ? "1" : "0"});
  }
  manifest.output(csv.path());
  manifest.write();
  return kExitOk;
}

int run_entdetect_oracle(const std::string& scheme_name, int n, int samples,
                         const std::string& criterion_name,
                         std::uint64_t seed) {
  qdsm::LocalScheme scheme;
  qdsm::ExponentVector exps;
  if (scheme_name == "ico-single") {
    scheme = qdsm::icosahedron_single_scheme(n);
    exps.a.assign(n, n);
  } else if (scheme_name == "mub") {
    if (n != 2) {
      throw CLI::ValidationError("n", "mub scheme is two-qubit only");
    }
    scheme = qdsm::mub_conjugate_scheme();
    exps.a = {2, 2};
  } else {
    throw CLI::ValidationError("scheme", "unknown scheme " + scheme_name);
  }
  qdsm::Criterion criterion = criterion_name == "thm3"
                                  ? qdsm::Criterion::theorem3
                                  : qdsm::Criterion::theorem4;
  double rhs = criterion == qdsm::Criterion::theorem3
                   ? qdsm::theorem3_rhs(scheme, exps)
                   : qdsm::theorem4_rhs(scheme, exps);
  double best = qdsm::separable_oracle(scheme, exps, samples, seed, criterion);
  std::cout << "empirical max over product states = " << fmt(best) << "\n"
            << "theorem rhs                       = " << fmt(rhs) << "\n";
  if (best > rhs + 1e-9) {
    std::cout << "SOUNDNESS VIOLATION\n";
    return kExitCheckFailed;
  }
  std::cout << "sound (margin " << fmt(rhs - best) << ")\n";
  return kExitOk;
}

// -------------------------------------------------------------- selftest

int run_selftest(const std::string& suite, std::uint64_t seed,
                 const std::string& design_file) {
  std::optional<std::filesystem::path> extra;
  if (!design_file.empty()) extra = design_file;
  std::vector<qdsm::SuiteResult> results;
  if (suite == "all") {
    results = qdsm::selftest_all(seed, extra);
  } else {
    results.push_back(qdsm::selftest_suite(suite, seed, extra));
  }
  int failures = 0;
  for (const qdsm::SuiteResult& r : results) {
    std::cout << r.name << ": " << (r.checks - r.failures) << "/" << r.checks
              << " checks passed\n";
    for (const std::string& msg : r.messages) {
      if (!msg.empty()) std::cout << "  FAIL " << msg << "\n";
    }
    failures += r.failures;
  }
  return failures == 0 ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum-design measurements: entropic uncertainty bounds "
               "and entanglement detection"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  bool seed_set = false;
  app.add_option_function<std::uint64_t>(
         "--seed",
         [&](std::uint64_t s) {
           seed = s;
           seed_set = true;
         },
         "Seed for all randomness (default: QDESIGN_SEED or 12345)");

  // design
  CLI::App* design = app.add_subcommand("design", "t-design operations");
  design->require_subcommand(1);

  CLI::App* verify = design->add_subcommand("verify", "certify a design");
  std::string verify_name = "icosahedron", verify_file;
  int verify_t = 2;
  double verify_tol = 1e-9;
  verify->add_option("--name", verify_name, "builtin design name");
  verify->add_option("--file", verify_file, "design file (overrides --name)");
  verify->add_option("--t", verify_t, "strength to test")->required();
  verify->add_option("--tol", verify_tol, "tolerance");

  CLI::App* search = design->add_subcommand("search", "frame-potential search");
  int search_d = 2, search_k = 24, search_t = 7;
  int search_iters = 200000, search_restarts = 4;
  double search_tol = 1e-9;
  std::string search_out = "design.json";
  search->add_option("--d", search_d, "dimension");
  search->add_option("--K", search_k, "number of vectors");
  search->add_option("--t", search_t, "design strength");
  search->add_option("--out", search_out, "output design file");
  search->add_option("--max-iters", search_iters, "iteration budget");
  search->add_option("--tol", search_tol, "potential-gap tolerance");
  search->add_option("--restarts", search_restarts, "restarts");

  CLI::App* list = design->add_subcommand("list", "list builtin designs");

  // eur
  CLI::App* eur = app.add_subcommand("eur", "entropic uncertainty bounds");
  eur->require_subcommand(1);

  CLI::App* compare = eur->add_subcommand("compare", "bound comparison table");
  std::string compare_design = "snub-cube", compare_out = "compare.csv";
  int compare_a = 2, compare_steps = 200;
  double compare_min = 2.0, compare_max = 12.0;
  compare->add_option("--design", compare_design,
                      "snub-cube | icosahedron | mub-qubit");
  compare->add_option("--a", compare_a, "IC order");
  compare->add_option("--alpha-min", compare_min, "first alpha");
  compare->add_option("--alpha-max", compare_max, "last alpha");
  compare->add_option("--steps", compare_steps, "row count");
  compare->add_option("--out", compare_out, "output CSV");

  CLI::App* diagram = eur->add_subcommand("diagram", "IC-entropy diagram data");
  int diagram_l = 3, diagram_a = 3, diagram_samples = 20000;
  int diagram_resolution = 512;
  std::string diagram_alphas = "1,5", diagram_out = "diagram.csv";
  diagram->add_option("--L", diagram_l, "distribution length");
  diagram->add_option("--a", diagram_a, "IC order");
  diagram->add_option("--alphas", diagram_alphas,
                      "comma-separated Renyi orders (inf allowed)");
  diagram->add_option("--samples", diagram_samples, "sample count");
  diagram->add_option("--resolution", diagram_resolution,
                      "boundary grid resolution");
  diagram->add_option("--out", diagram_out, "output CSV");

  CLI::App* ico_best = eur->add_subcommand("ico-best",
                                           "best icosahedron bound vs alpha");
  double ib_min = 2.0, ib_max = 12.0, ib_step = 0.01;
  std::string ib_out = "ico_best.csv", ib_grid;
  ico_best->add_option("--alpha-min", ib_min, "first alpha");
  ico_best->add_option("--alpha-max", ib_max, "last alpha");
  ico_best->add_option("--alpha-step", ib_step, "alpha step");
  ico_best->add_option("--alpha-grid", ib_grid,
                       "min:max:step (overrides the separate flags)");
  ico_best->add_option("--out", ib_out, "output CSV");

  // entdetect
  CLI::App* ent = app.add_subcommand("entdetect", "entanglement detection");
  ent->require_subcommand(1);

  CLI::App* scan = ent->add_subcommand("scan", "criterion scan over a family");
  std::string scan_family = "rho-x-phi", scan_out = "scan.csv";
  std::string scan_criterion = "thm4";
  int scan_grid = 200, scan_a = 4, scan_sets = 500;
  scan->add_option("--family", scan_family,
                   "psi-beta-phi | rho-x-phi | isotropic | unbiasedness");
  scan->add_option("--grid", scan_grid, "grid points per axis");
  scan->add_option("--a", scan_a, "exponent per subsystem");
  scan->add_option("--criterion", scan_criterion, "thm3 | thm4");
  scan->add_option("--sets", scan_sets, "basis triples (unbiasedness)");
  scan->add_option("--out", scan_out, "output CSV");

  CLI::App* oracle = ent->add_subcommand("oracle",
                                         "separable-state soundness probe");
  std::string oracle_scheme = "ico-single", oracle_criterion = "thm4";
  int oracle_n = 4, oracle_samples = 2000;
  oracle->add_option("--scheme", oracle_scheme, "ico-single | mub");
  oracle->add_option("--n", oracle_n, "number of qubits");
  oracle->add_option("--samples", oracle_samples, "product-state samples");
  oracle->add_option("--criterion", oracle_criterion, "thm3 | thm4");

  // selftest
  CLI::App* selftest = app.add_subcommand("selftest", "property suites");
  std::string st_suite = "all", st_design_file;
  selftest->add_option("--suite", st_suite,
                       "all | qcore | designs | design_search | eur | "
                       "entdetect | aux");
  selftest->add_option("--design-file", st_design_file,
                       "extra design file certified in the designs suite");

  for (CLI::App* sub : app.get_subcommands({})) {
    sub->fallthrough();
    for (CLI::App* nested : sub->get_subcommands({})) nested->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (!seed_set) seed = default_seed();

    if (verify->parsed()) {
      return run_design_verify(verify_name, verify_file, verify_t, verify_tol);
    }
    if (search->parsed()) {
      return run_design_search(search_d, search_k, search_t, seed, search_out,
                               search_iters, search_tol, search_restarts);
    }
    if (list->parsed()) return run_design_list();

    if (compare->parsed()) {
      return run_eur_compare(compare_design, compare_a, compare_min,
                             compare_max, compare_steps, compare_out, seed);
    }
    if (diagram->parsed()) {
      std::vector<double> alphas;
      std::stringstream ss(diagram_alphas);
      std::string tok;
      while (std::getline(ss, tok, ',')) {
        alphas.push_back(tok == "inf" ? qdsm::kAlphaInf : std::stod(tok));
      }
      return run_eur_diagram(diagram_l, diagram_a, alphas, diagram_samples,
                             diagram_resolution, diagram_out, seed);
    }
    if (ico_best->parsed()) {
      if (!ib_grid.empty()) {
        std::stringstream ss(ib_grid);
        std::string tok;
        std::vector<double> parts;
        while (std::getline(ss, tok, ':')) parts.push_back(std::stod(tok));
        if (parts.size() != 3) {
          throw CLI::ValidationError("--alpha-grid", "expected min:max:step");
        }
        ib_min = parts[0];
        ib_max = parts[1];
        ib_step = parts[2];
      }
      return run_eur_ico_best(ib_min, ib_max, ib_step, ib_out, seed);
    }

    if (scan->parsed()) {
      return run_entdetect_scan(scan_family, scan_grid, scan_a, scan_criterion,
                                scan_sets, scan_out, seed);
    }
    if (oracle->parsed()) {
      return run_entdetect_oracle(oracle_scheme, oracle_n, oracle_samples,
                                  oracle_criterion, seed);
    }

    if (selftest->parsed()) {
      return run_selftest(st_suite, seed, st_design_file);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCheckFailed;
  }
  return kExitUsage;
}
