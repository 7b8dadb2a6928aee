#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qdsm/design_search.hpp"
#include "qdsm/rng.hpp"

using namespace qdsm;

TEST_CASE("analytic gradient matches central finite differences") {
  SplitRng rng(404);
  for (int t : {2, 3, 7}) {
    std::vector<Vector> vecs;
    for (int i = 0; i < 6; ++i) vecs.push_back(rng.haar_vector(2));
    std::vector<Vector> grad = frame_potential_gradient(vecs, t);
    const double h = 1e-6;
    for (std::size_t j = 0; j < vecs.size(); ++j) {
      for (int m = 0; m < 2; ++m) {
        for (int part = 0; part < 2; ++part) {
          auto eval = [&](double delta) {
            std::vector<Vector> v = vecs;
            v[j](m) += part == 0 ? std::complex<double>(delta, 0.0)
                                 : std::complex<double>(0.0, delta);
            return frame_potential(v, t);
          };
          double fd = (eval(h) - eval(-h)) / (2.0 * h);
          double an = part == 0 ? 2.0 * grad[j](m).real()
                                : 2.0 * grad[j](m).imag();
          CHECK(std::abs(fd - an) <= 1e-5 * std::max(1.0, std::abs(fd)));
        }
      }
    }
  }
}

TEST_CASE("search finds the icosahedron-grade 5-design") {
  SearchConfig config;
  config.d = 2;
  config.K = 12;
  config.t = 5;
  config.seed = 7;
  config.tol = 1e-10;
  config.max_iters = 50000;
  config.restarts = 4;
  SearchResult result = search_design(config);
  REQUIRE(result.converged);
  CHECK(result.residual <= 1e-8);
  CHECK(result.residual >= -1e-12);
  CHECK(verify_design(result.design, 5, 1e-7).pass);
}

TEST_CASE("search finds a 24-vector 7-design") {
  SearchConfig config;
  config.d = 2;
  config.K = 24;
  config.t = 7;
  config.seed = 11;
  config.tol = 1e-10;
  config.max_iters = 100000;
  config.restarts = 4;
  SearchResult result = search_design(config);
  REQUIRE(result.converged);
  CHECK(result.residual <= 1e-8);
  CHECK(verify_design(result.design, 7, 1e-7).pass);
}

TEST_CASE("two vectors cannot form a 5-design") {
  SearchConfig config;
  config.d = 2;
  config.K = 2;
  config.t = 5;
  config.seed = 3;
  config.tol = 1e-9;
  config.max_iters = 5000;
  config.restarts = 2;
  SearchResult result = search_design(config);
  CHECK_FALSE(result.converged);
  // Best achievable: an orthogonal pair, Phi = K = 2, Welch = 2/3.
  double welch = 4.0 * design_constant(2, 5);
  CHECK(result.residual >= 2.0 - welch - 1e-6);
  CHECK(frame_potential(result.design.vectors, 5) >= welch - 1e-12);
}

TEST_CASE("search is deterministic in the seed") {
  SearchConfig config;
  config.d = 2;
  config.K = 6;
  config.t = 2;
  config.seed = 42;
  config.tol = 1e-10;
  config.max_iters = 20000;
  config.restarts = 2;
  SearchResult a = search_design(config);
  SearchResult b = search_design(config);
  REQUIRE(a.design.size() == b.design.size());
  for (int i = 0; i < a.design.size(); ++i) {
    CHECK((a.design.vectors[i] - b.design.vectors[i]).norm() == 0.0);
  }
  CHECK(a.residual == b.residual);
}

TEST_CASE("bad configs are rejected") {
  SearchConfig config;
  config.K = 1;
  CHECK_THROWS_AS(search_design(config), std::invalid_argument);
  config.K = 4;
  config.tol = 0.0;
  CHECK_THROWS_AS(search_design(config), std::invalid_argument);
}
