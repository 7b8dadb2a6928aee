#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "qdsm/qcore.hpp"

namespace qdsm {

/// A set of K unit vectors in dimension d with a claimed design strength t.
/// The strength is a claim; certification is verify_design's job.
struct QuantumDesign {
  int dim = 0;
  std::vector<Vector> vectors;
  int strength = 0;
  std::string name;

  int size() const { return static_cast<int>(vectors.size()); }
};

/// Validates unit norms (1e-12); throws std::invalid_argument naming the
/// offending vector index.
void validate_design(const QuantumDesign& design);

/// A set of POVMs sharing outcome count L, tagged with design strength.
struct DsmSet {
  std::vector<Povm> povms;
  int outcomes_per_povm = 0;
  int strength = 0;
  std::string source_name;

  int n_settings() const { return static_cast<int>(povms.size()); }
};

enum class BuiltinDesign { icosahedron, snub_cube_7, mub_qubit };

BuiltinDesign parse_builtin_design(std::string_view name);
std::vector<std::string> builtin_design_names();

/// icosahedron: the 12 icosahedron vertices on the Bloch sphere (5-design);
/// mub_qubit: the six Pauli eigenvectors (2-design);
/// snub_cube_7: 24 vectors loaded from the bundled search output,
/// re-certified at t = 7 on every load.
QuantumDesign builtin_design(BuiltinDesign which);

/// 1 / tr(P_sym) = t!(d-1)!/(t+d-1)!.
double design_constant(int d, int t);

struct DesignReport {
  double residual = 0.0;        // max |sum_k |psi_k><psi_k|^t - K D P_sym|
  double frame_potential = 0.0; // sum_{j,k} |<psi_j|psi_k>|^{2t}
  double welch_bound = 0.0;     // K^2 D
  bool residual_available = true;
  bool pass = false;
};

/// Dual criterion: entrywise residual against the projector identity and
/// frame potential against the Welch bound. Above the size cap only the
/// frame-potential criterion is evaluated and the report says so.
DesignReport verify_design(const QuantumDesign& design, int t,
                           double tol = 1e-9, int size_cap = kDefaultSizeCap);

/// Frame potential sum_{j,k} |<psi_j|psi_k>|^{2t} over all ordered pairs.
double frame_potential(const std::vector<Vector>& vectors, int t);

/// Partition the design into POVMs with effects (d/L)|psi><psi|. Groups must
/// partition the index set into equal-size parts whose projector sums are
/// proportional to the identity (1e-9).
DsmSet group_to_povms(const QuantumDesign& design,
                      const std::vector<std::vector<int>>& groups);

/// Antipodal-pair grouping for qubit designs: each vector is matched to the
/// one nearest to its negated Bloch vector (tolerance 1e-9).
std::vector<std::vector<int>> antipodal_pairs(const QuantumDesign& design);

/// Whole design as a single POVM group.
std::vector<std::vector<int>> single_group(const QuantumDesign& design);

QuantumDesign load_design(const std::filesystem::path& path);
QuantumDesign parse_design_json(const std::string& text,
                                const std::string& origin);
void save_design(const QuantumDesign& design,
                 const std::filesystem::path& path);

/// Bloch vector (x, y, z) of a qubit pure state.
Eigen::Vector3d bloch_vector(const Vector& psi);
/// Unit Bloch vector to qubit state, north pole -> |0>.
Vector bloch_to_state(const Eigen::Vector3d& b);

}  // namespace qdsm
