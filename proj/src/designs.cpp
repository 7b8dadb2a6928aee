#include "qdsm/designs.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "qdsm/snub_cube_data.hpp"

namespace qdsm {

using nlohmann::json;

void validate_design(const QuantumDesign& design) {
  if (design.dim < 2) {
    throw std::invalid_argument("QuantumDesign: dim must be >= 2");
  }
  if (design.vectors.empty()) {
    throw std::invalid_argument("QuantumDesign: no vectors");
  }
  if (design.strength < 1) {
    throw std::invalid_argument("QuantumDesign: strength must be >= 1");
  }
  for (std::size_t k = 0; k < design.vectors.size(); ++k) {
    if (design.vectors[k].size() != design.dim) {
      throw std::invalid_argument("QuantumDesign: vector " +
                                  std::to_string(k) + " has wrong dimension");
    }
    double n = design.vectors[k].norm();
    if (std::abs(n - 1.0) > 1e-12) {
      throw std::invalid_argument("QuantumDesign: vector " +
                                  std::to_string(k) + " has norm " +
                                  std::to_string(n));
    }
  }
}

BuiltinDesign parse_builtin_design(std::string_view name) {
  if (name == "icosahedron") return BuiltinDesign::icosahedron;
  if (name == "snub_cube_7" || name == "snub-cube-7" || name == "snub-cube") {
    return BuiltinDesign::snub_cube_7;
  }
  if (name == "mub_qubit" || name == "mub-qubit") {
    return BuiltinDesign::mub_qubit;
  }
  throw std::invalid_argument("unknown builtin design: " + std::string(name));
}

std::vector<std::string> builtin_design_names() {
  return {"icosahedron", "snub_cube_7", "mub_qubit"};
}

Eigen::Vector3d bloch_vector(const Vector& psi) {
  if (psi.size() != 2) {
    throw std::invalid_argument("bloch_vector: qubit states only");
  }
  std::complex<double> a = psi(0), b = psi(1);
  double x = 2.0 * (std::conj(a) * b).real();
  double y = 2.0 * (std::conj(a) * b).imag();
  double z = std::norm(a) - std::norm(b);
  return {x, y, z};
}

Vector bloch_to_state(const Eigen::Vector3d& b) {
  Vector psi(2);
  if (b.z() < -1.0 + 1e-14) {
    psi << 0.0, 1.0;
    return psi;
  }
  psi << std::complex<double>(1.0 + b.z(), 0.0),
      std::complex<double>(b.x(), b.y());
  psi.normalize();
  return psi;
}

namespace {

QuantumDesign make_icosahedron() {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  const double s = 1.0 / std::sqrt(1.0 + phi * phi);
  QuantumDesign d;
  d.dim = 2;
  d.strength = 5;
  d.name = "icosahedron";
  for (double s1 : {1.0, -1.0}) {
    for (double s2 : {1.0, -1.0}) {
      d.vectors.push_back(bloch_to_state({s1 * s, s2 * phi * s, 0.0}));
      d.vectors.push_back(bloch_to_state({0.0, s1 * s, s2 * phi * s}));
      d.vectors.push_back(bloch_to_state({s2 * phi * s, 0.0, s1 * s}));
    }
  }
  validate_design(d);
  return d;
}

QuantumDesign make_mub_qubit() {
  const double r = 1.0 / std::sqrt(2.0);
  QuantumDesign d;
  d.dim = 2;
  d.strength = 2;
  d.name = "mub_qubit";
  auto push = [&d](std::complex<double> a, std::complex<double> b) {
    Vector v(2);
    v << a, b;
    d.vectors.push_back(v);
  };
  push(1.0, 0.0);                      // Z
  push(0.0, 1.0);
  push(r, r);                          // X
  push(r, -r);
  push(r, std::complex<double>(0, r)); // Y
  push(r, std::complex<double>(0, -r));
  validate_design(d);
  return d;
}

QuantumDesign make_snub_cube() {
  const std::string text = detail::kSnubCube7Json;
  if (text.empty()) {
    throw std::runtime_error(
        "snub_cube_7: bundled design data missing; regenerate "
        "data/snub_cube_7.json with `qdsm design search --d 2 --K 24 --t 7`");
  }
  QuantumDesign d = parse_design_json(text, "bundled snub_cube_7");
  DesignReport report = verify_design(d, 7, 1e-8);
  if (!report.pass) {
    throw std::runtime_error(
        "snub_cube_7: bundled design failed re-certification (residual " +
        std::to_string(report.residual) + ")");
  }
  return d;
}

}  // namespace

QuantumDesign builtin_design(BuiltinDesign which) {
  switch (which) {
    case BuiltinDesign::icosahedron:
      return make_icosahedron();
    case BuiltinDesign::mub_qubit:
      return make_mub_qubit();
    case BuiltinDesign::snub_cube_7:
      return make_snub_cube();
  }
  throw std::invalid_argument("builtin_design: bad enum value");
}

double design_constant(int d, int t) {
  if (d < 1 || t < 1) {
    throw std::invalid_argument("design_constant: d, t must be >= 1");
  }
  // t!(d-1)!/(t+d-1)! = prod_{j=1..t} j/(d-1+j), stable against overflow.
  double r = 1.0;
  for (int j = 1; j <= t; ++j) {
    r *= static_cast<double>(j) / static_cast<double>(d - 1 + j);
  }
  return r;
}

double frame_potential(const std::vector<Vector>& vectors, int t) {
  const int k = static_cast<int>(vectors.size());
  long double total = 0.0L;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      std::complex<double> s = vectors[i].dot(vectors[j]);
      long double m = static_cast<long double>(std::norm(s));
      long double term = 1.0L;
      for (int q = 0; q < t; ++q) term *= m;
      total += term;
    }
  }
  return static_cast<double>(total);
}

DesignReport verify_design(const QuantumDesign& design, int t, double tol,
                           int size_cap) {
  validate_design(design);
  const int k = design.size();
  const double welch = static_cast<double>(k) * k *
                       design_constant(design.dim, t);

  DesignReport report;
  report.frame_potential = frame_potential(design.vectors, t);
  report.welch_bound = welch;

  double dim_t = std::pow(static_cast<double>(design.dim), t);
  if (dim_t <= static_cast<double>(size_cap)) {
    Matrix sum =
        Matrix::Zero(static_cast<int>(dim_t + 0.5), static_cast<int>(dim_t + 0.5));
    for (const Vector& psi : design.vectors) {
      Vector w = tensor_power(psi, t);
      sum.noalias() += w * w.adjoint();
    }
    Matrix target = static_cast<double>(k) * design_constant(design.dim, t) *
                    sym_projector(design.dim, t, size_cap);
    report.residual = (sum - target).cwiseAbs().maxCoeff();
    report.residual_available = true;
    report.pass = report.residual <= tol &&
                  std::abs(report.frame_potential - welch) <=
                      tol * static_cast<double>(k) * k;
  } else {
    report.residual = std::numeric_limits<double>::quiet_NaN();
    report.residual_available = false;
    report.pass = std::abs(report.frame_potential - welch) <=
                  tol * static_cast<double>(k) * k;
  }
  return report;
}

DsmSet group_to_povms(const QuantumDesign& design,
                      const std::vector<std::vector<int>>& groups) {
  validate_design(design);
  const int k = design.size();
  if (groups.empty()) {
    throw std::invalid_argument("group_to_povms: no groups");
  }
  const std::size_t group_size = groups.front().size();
  std::vector<int> seen(k, 0);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].size() != group_size) {
      throw std::invalid_argument("group_to_povms: group " + std::to_string(g) +
                                  " has size " +
                                  std::to_string(groups[g].size()) +
                                  ", expected " + std::to_string(group_size));
    }
    for (int idx : groups[g]) {
      if (idx < 0 || idx >= k) {
        throw std::invalid_argument("group_to_povms: index " +
                                    std::to_string(idx) + " out of range");
      }
      if (seen[idx]++) {
        throw std::invalid_argument("group_to_povms: index " +
                                    std::to_string(idx) + " repeated");
      }
    }
  }
  if (group_size * groups.size() != static_cast<std::size_t>(k)) {
    throw std::invalid_argument(
        "group_to_povms: groups do not partition the design");
  }

  const int L = static_cast<int>(group_size);
  const int d = design.dim;
  DsmSet out;
  out.outcomes_per_povm = L;
  out.strength = design.strength;
  out.source_name = design.name;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    Matrix sum = Matrix::Zero(d, d);
    std::vector<Matrix> effects;
    effects.reserve(group_size);
    for (int idx : groups[g]) {
      Matrix proj = design.vectors[idx] * design.vectors[idx].adjoint();
      sum += proj;
      effects.push_back(static_cast<double>(d) / L * proj);
    }
    double dev =
        (sum - (static_cast<double>(L) / d) * Matrix::Identity(d, d))
            .cwiseAbs()
            .maxCoeff();
    if (dev > 1e-9) {
      throw std::invalid_argument(
          "group_to_povms: group " + std::to_string(g) +
          " projector sum deviates from identity multiple by " +
          std::to_string(dev));
    }
    out.povms.emplace_back(d, std::move(effects));
  }
  return out;
}

std::vector<std::vector<int>> antipodal_pairs(const QuantumDesign& design) {
  if (design.dim != 2) {
    throw std::invalid_argument("antipodal_pairs: qubit designs only");
  }
  const int k = design.size();
  std::vector<Eigen::Vector3d> bloch(k);
  for (int i = 0; i < k; ++i) bloch[i] = bloch_vector(design.vectors[i]);

  std::vector<std::vector<int>> pairs;
  std::vector<char> used(k, 0);
  for (int i = 0; i < k; ++i) {
    if (used[i]) continue;
    int best = -1;
    double best_dist = 1e9;
    for (int j = i + 1; j < k; ++j) {
      if (used[j]) continue;
      double dist = (bloch[j] + bloch[i]).norm();
      if (dist < best_dist) {
        best_dist = dist;
        best = j;
      }
    }
    if (best < 0 || best_dist > 1e-9) {
      throw std::invalid_argument("antipodal_pairs: vector " +
                                  std::to_string(i) +
                                  " has no antipodal partner");
    }
    used[i] = used[best] = 1;
    pairs.push_back({i, best});
  }
  return pairs;
}

std::vector<std::vector<int>> single_group(const QuantumDesign& design) {
  std::vector<int> all(design.size());
  std::iota(all.begin(), all.end(), 0);
  return {all};
}

namespace {

QuantumDesign design_from_json(const json& j, const std::string& origin) {
  for (const char* field : {"dim", "strength", "vectors"}) {
    if (!j.contains(field)) {
      throw std::runtime_error(origin + ": missing field \"" + field + "\"");
    }
  }
  QuantumDesign d;
  d.dim = j.at("dim").get<int>();
  d.strength = j.at("strength").get<int>();
  d.name = j.value("name", std::string{});
  const json& vecs = j.at("vectors");
  if (!vecs.is_array() || vecs.empty()) {
    throw std::runtime_error(origin + ": \"vectors\" must be a nonempty array");
  }
  for (std::size_t k = 0; k < vecs.size(); ++k) {
    const json& v = vecs[k];
    if (!v.is_array() || v.size() != static_cast<std::size_t>(d.dim)) {
      throw std::runtime_error(origin + ": vector " + std::to_string(k) +
                               " must have " + std::to_string(d.dim) +
                               " amplitudes");
    }
    Vector psi(d.dim);
    for (int m = 0; m < d.dim; ++m) {
      const json& amp = v[m];
      if (!amp.is_array() || amp.size() != 2) {
        throw std::runtime_error(origin + ": vector " + std::to_string(k) +
                                 " amplitude " + std::to_string(m) +
                                 " must be a [re, im] pair");
      }
      psi(m) = std::complex<double>(amp[0].get<double>(), amp[1].get<double>());
    }
    double n = psi.norm();
    if (std::abs(n - 1.0) > 1e-12) {
      throw std::runtime_error(origin + ": vector " + std::to_string(k) +
                               " has norm " + std::to_string(n));
    }
    d.vectors.push_back(std::move(psi));
  }
  validate_design(d);
  return d;
}

}  // namespace

QuantumDesign parse_design_json(const std::string& text,
                                const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(origin + ": parse error: " + e.what());
  }
  return design_from_json(j, origin);
}

QuantumDesign load_design(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("load_design: cannot open " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_design_json(buf.str(), path.string());
}

void save_design(const QuantumDesign& design,
                 const std::filesystem::path& path) {
  validate_design(design);
  json j;
  j["dim"] = design.dim;
  j["strength"] = design.strength;
  j["name"] = design.name;
  json vecs = json::array();
  for (const Vector& psi : design.vectors) {
    json v = json::array();
    for (int m = 0; m < design.dim; ++m) {
      v.push_back({psi(m).real(), psi(m).imag()});
    }
    vecs.push_back(std::move(v));
  }
  j["vectors"] = std::move(vecs);
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("save_design: cannot open " + path.string());
  }
  out << j.dump(2) << "\n";
}

}  // namespace qdsm
