#include <mublab/search.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include <mublab/rng.hpp>

#include "oracles.hpp"

using namespace mublab;

namespace {

MubSet single_basis_set(Basis b) {
  MubSet s;
  s.dim = static_cast<int>(b.dim());
  s.bases = {std::move(b)};
  return s;
}

// Central finite differences of the residual in the 2d real coordinates.
Vector numerical_gradient(const Vector& v, const MubSet& s, double eps) {
  const auto d = v.size();
  Vector g(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    Vector vp = v, vm = v;
    vp(i) += eps;
    vm(i) -= eps;
    const double dre =
        (unbiasedness_residual(vp, s) - unbiasedness_residual(vm, s)) / (2 * eps);
    vp = v;
    vm = v;
    vp(i) += Complex(0, eps);
    vm(i) -= Complex(0, eps);
    const double dim =
        (unbiasedness_residual(vp, s) - unbiasedness_residual(vm, s)) / (2 * eps);
    g(i) = Complex(dre, dim);
  }
  return g;
}

}  // namespace

TEST_CASE("unbiasedness_residual closed-form values") {
  const MubSet comp3 = single_basis_set(computational_basis(3));
  const Basis f3 = fourier_basis(3);
  for (int j = 0; j < 3; ++j)
    REQUIRE(unbiasedness_residual(f3.state(j), comp3) < 1e-12);

  Vector e1 = Vector::Zero(6);
  e1(0) = 1.0;
  const MubSet comp6 = single_basis_set(computational_basis(6));
  REQUIRE(unbiasedness_residual(e1, comp6) ==
          Catch::Approx(oracles::kResidualE1Computational6).margin(1e-14));

  const MubSet oam = oam_qutrit_mubs();
  MubSet first_three;
  first_three.dim = 3;
  first_three.bases = {oam.bases[0], oam.bases[1], oam.bases[2]};
  for (int j = 0; j < 3; ++j)
    REQUIRE(unbiasedness_residual(oam.bases[3].state(j), first_three) < 1e-12);

  Vector wrong = Vector::Ones(2) / std::sqrt(2.0);
  REQUIRE_THROWS_AS(unbiasedness_residual(wrong, comp3), std::invalid_argument);
}

TEST_CASE("residual is phase- and permutation-invariant") {
  std::mt19937_64 rng(7);
  const MubSet s = qusix_mubs();
  const Vector v = haar_unit_vector(6, rng);
  const double base = unbiasedness_residual(v, s);

  const Complex phase = std::polar(1.0, 1.234);
  REQUIRE(unbiasedness_residual(phase * v, s) == Catch::Approx(base).epsilon(1e-12));

  MubSet permuted = s;
  for (auto& b : permuted.bases) {
    Matrix cols = b.columns;
    for (int j = 0; j < 6; ++j) b.columns.col(j) = cols.col((j + 2) % 6);
  }
  REQUIRE(unbiasedness_residual(v, permuted) == Catch::Approx(base).epsilon(1e-12));
}

TEST_CASE("analytic gradient matches central finite differences") {
  const MubSet s = qusix_mubs();
  std::mt19937_64 rng(stream_seed(99, 0));
  for (int trial = 0; trial < 20; ++trial) {
    const Vector v = haar_unit_vector(6, rng);
    const Vector g = unbiasedness_gradient(v, s);
    const Vector g_fd = numerical_gradient(v, s, 1e-6);
    const double rel = (g - g_fd).norm() / std::max(g_fd.norm(), 1e-30);
    REQUIRE(rel < 1e-5);
  }
}

TEST_CASE("extension search finds an equatorial state for d=2") {
  const MubSet s = single_basis_set(computational_basis(2));
  SearchConfig cfg;
  cfg.restarts = 5;
  const SearchResult res = search_extension_vector(s, cfg);
  REQUIRE(res.residual < 1e-10);
  REQUIRE(res.converged);
  // Equatorial: both amplitudes have modulus 1/sqrt(2).
  REQUIRE(std::abs(std::norm(res.best_vector(0)) - 0.5) < 1e-5);
  REQUIRE(std::abs(res.best_vector.norm() - 1.0) < 1e-9);
}

TEST_CASE("extension search recovers a fourth qutrit basis vector") {
  const MubSet oam = oam_qutrit_mubs();
  MubSet s;
  s.dim = 3;
  s.bases = {oam.bases[0], oam.bases[1], oam.bases[2]};
  SearchConfig cfg;
  cfg.restarts = 50;
  const SearchResult res = search_extension_vector(s, cfg);
  REQUIRE(res.residual < 1e-8);
  // Unbiased to every column of the three input bases.
  for (const auto& b : s.bases)
    for (int j = 0; j < 3; ++j) {
      const double p = std::norm(b.state(j).dot(res.best_vector));
      REQUIRE(std::abs(p - 1.0 / 3.0) < 1e-4);
    }
  // Residual field matches the recomputed value exactly.
  REQUIRE(res.residual == unbiasedness_residual(res.best_vector, s));
}

TEST_CASE("search results are reproducible bit-for-bit") {
  const MubSet oam = oam_qutrit_mubs();
  MubSet s;
  s.dim = 3;
  s.bases = {oam.bases[0], oam.bases[1]};
  SearchConfig cfg;
  cfg.restarts = 8;
  cfg.seed = 42;
  const SearchResult a = search_extension_vector(s, cfg);
  const SearchResult b = search_extension_vector(s, cfg);
  REQUIRE(a.residual == b.residual);
  REQUIRE(a.iterations == b.iterations);
  REQUIRE((a.best_vector - b.best_vector).norm() == 0.0);

  cfg.seed = 43;
  const SearchResult c = search_extension_vector(s, cfg);
  REQUIRE((c.best_vector - a.best_vector).norm() > 0.0);  // different stream
}

TEST_CASE("config validation") {
  SearchConfig cfg;
  cfg.restarts = 0;
  REQUIRE_THROWS_AS(search_extension_vector(qusix_mubs(), cfg), std::invalid_argument);
  cfg.restarts = 1;
  cfg.tolerance = 0.0;
  REQUIRE_THROWS_AS(search_extension_vector(qusix_mubs(), cfg), std::invalid_argument);
  cfg = SearchConfig{};
  REQUIRE_THROWS_AS(search_full_mub_set(1, 2, cfg), std::invalid_argument);
  REQUIRE_THROWS_AS(search_full_mub_set(3, 1, cfg), std::invalid_argument);
}

TEST_CASE("full-set search reaches complete sets for prime-power dimensions") {
  SearchConfig cfg;  // default budget
  for (int d : {2, 3, 4, 5}) {
    cfg.seed = d;
    const FullSetResult res = search_full_mub_set(d, d + 1, cfg);
    INFO("d = " << d << " residual = " << res.residual);
    REQUIRE(res.residual < 1e-8);
    REQUIRE(static_cast<int>(res.bases.size()) == d + 1);
    // The returned set really is a MUB set at loose tolerance.
    MubSet s;
    s.dim = d;
    s.bases = res.bases;
    const VerifyReport rep = verify_mub_set(s, 1e-3);
    REQUIRE(rep.pass);
  }
}

TEST_CASE("full-set search in d=6 stalls at a residual floor") {
  SearchConfig cfg;
  cfg.restarts = 50;
  const FullSetResult res = search_full_mub_set(6, 4, cfg);
  REQUIRE(res.residual > 1e-3);
}
