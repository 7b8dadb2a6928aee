#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

#include <Eigen/Dense>

namespace qdsm {

/// Counter-based splittable pseudo-random generator (SplitMix64 core).
///
/// Every random quantity in the library flows from an explicit 64-bit seed
/// through this class. `derive(i)` produces an independent child stream
/// without advancing the parent, so parallel substreams stay reproducible.
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed) : state_(seed) {}

  /// Child stream for substream `index`; does not advance this generator.
  SplitRng derive(std::uint64_t index) const {
    return SplitRng(mix(state_ ^ (0x9E3779B97F4A7C15ULL * (index + 1))));
  }

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  /// Uniform double in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller (pairs cached).
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = 1.0 - uniform();  // (0, 1], keeps log() finite
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

  std::complex<double> complex_normal() {
    double re = normal();
    double im = normal();
    return {re, im};
  }

  /// Unit vector of independent standard complex Gaussians (Haar on sphere).
  Eigen::VectorXcd haar_vector(int d) {
    Eigen::VectorXcd v(d);
    for (int i = 0; i < d; ++i) v(i) = complex_normal();
    v.normalize();
    return v;
  }

  /// Flat Dirichlet(1, ..., 1) weights via normalized exponentials.
  Eigen::VectorXd dirichlet(int n) {
    Eigen::VectorXd w(n);
    for (int i = 0; i < n; ++i) w(i) = -std::log(1.0 - uniform());
    w /= w.sum();
    return w;
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
  bool have_cached_ = false;
  double cached_ = 0.0;
};

}  // namespace qdsm
