#include "doctest.h"
#include "oracles.hpp"

#include "qgraph/errors.hpp"
#include "qgraph/random_graph.hpp"
#include "qgraph/spectral.hpp"

#include <numbers>

using namespace qg;

namespace {

double pick_lambda(std::mt19937_64& rng, const PeriodicGraph& g) {
  std::uniform_real_distribution<double> lam(-10.0, 60.0);
  for (;;) {
    const double l = lam(rng);
    if (!oracle::near_pole(g, l)) return l;
  }
}

PeriodicGraph hexagonal(const Potential& q) {
  PeriodicGraph g(2);
  g.add_vertex("v1").add_vertex("v2");
  g.add_edge("v1", "v2", {0, 0}, q).add_edge("v1", "v2", {1, 0}, q).add_edge("v1", "v2", {0, 1}, q);
  return g;
}

}  // namespace

TEST_CASE("dispersion agrees with the oracle determinant") {
  std::mt19937_64 rng(21);
  for (int rep = 0; rep < 40; ++rep) {
    const PeriodicGraph g = random_graph(rng, {.d = 1 + rep % 2, .max_vertices = 4});
    const double l = pick_lambda(rng, g);
    const LaurentPoly d = dispersion(g, l);
    for (int k = 0; k < 3; ++k) {
      std::vector<Complex> z = oracle::torus_point(rng, g.dim());
      z[0] *= 1.3;  // off the torus too
      const Complex want = oracle::dispersion(g, l, z);
      const double scale = std::max(1.0, std::abs(want));
      CHECK(std::abs(d.eval(z) - want) < 1e-8 * scale);
      CHECK(std::abs(dispersion_at(g, l, z) - want) < 1e-9 * scale);
    }
  }
}

TEST_CASE("spectral matrix is Hermitian on the torus and D is real there") {
  std::mt19937_64 rng(22);
  for (int rep = 0; rep < 30; ++rep) {
    const PeriodicGraph g = random_graph(rng, {.d = 1 + rep % 2});
    const double l = pick_lambda(rng, g);
    const auto z = oracle::torus_point(rng, g.dim());
    const auto m = spectral_matrix_at(g, l, z);
    double scale = 0.0, worst = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i)
      for (std::size_t j = 0; j < m.size(); ++j) {
        scale = std::max(scale, std::abs(m[i][j]));
        worst = std::max(worst, std::abs(m[i][j] - std::conj(m[j][i])));
      }
    CHECK(worst <= 1e-9 * scale);
    const Complex d = dispersion_at(g, l, z);
    CHECK(std::abs(d.imag()) <= 1e-9 * std::max(1.0, std::abs(d)));
  }
}

TEST_CASE("vertex order does not change the dispersion") {
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 15; ++rep) {
    const PeriodicGraph g = random_graph(rng, {.d = 2, .max_vertices = 4});
    PeriodicGraph r(g.dim());
    for (auto it = g.vertices().rbegin(); it != g.vertices().rend(); ++it) r.add_vertex(it->id, it->condition);
    for (const auto& e : g.edges()) r.add_edge(e.tail, e.head, e.shift, e.potential);
    const double l = pick_lambda(rng, g);
    CHECK(rel_distance(dispersion(g, l), dispersion(r, l)) < 1e-9);
  }
}

TEST_CASE("Dirichlet vertices drop rows and severed edges are tracked") {
  PeriodicGraph g(1);
  g.add_vertex("a", VertexCondition::dirichlet_condition()).add_vertex("b");
  g.add_edge("a", "a", {1}).add_edge("a", "b", {0}).add_edge("b", "b", {1});
  const double l = 5.0;
  const SpectralMatrix sm = spectral_matrix(g, l);
  CHECK(sm.rows == std::vector<std::size_t>{1});
  CHECK(sm.severed_edges == std::vector<std::size_t>{0});
  REQUIRE(sm.extra_s_factors.size() == 1);
  const double s = oracle::transfer(Potential::zero(), l)[1];
  CHECK(sm.extra_s_factors[0] == doctest::Approx(s));
  DispersionOptions with;
  with.include_severed_factors = true;
  const std::vector<Complex> z{std::polar(1.0, 0.4)};
  CHECK(std::abs(dispersion(g, l, with).eval(z) - s * dispersion(g, l).eval(z)) < 1e-12);
  CHECK(std::abs(dispersion(g, l).eval(z) - oracle::dispersion(g, l, z)) < 1e-12);
}

TEST_CASE("pole handling") {
  const PeriodicGraph g = hexagonal(Potential::zero());
  const double pole = std::numbers::pi * std::numbers::pi;
  CHECK_THROWS_AS(spectral_matrix(g, pole), PoleAtLambda);
  try {
    spectral_matrix(g, pole);
  } catch (const PoleAtLambda& e) {
    CHECK(e.edges().size() == 3);
    CHECK(e.lambda() == pole);
  }
  AssemblyOptions loose;
  loose.check_poles = false;
  CHECK(spectral_matrix(g, pole + 1e-7, loose).pole_flags.size() == 3);
}

TEST_CASE("torus range of G~ is [0, 9]") {
  LaurentPoly w(2);
  w.add_term({0, 0}, 1.0);
  w.add_term({1, 0}, 1.0);
  w.add_term({0, 1}, 1.0);
  const TorusRange r = torus_range(w * w.inverted(), 48);
  CHECK(std::abs(r.min) < 1e-10);
  CHECK(std::abs(r.max - 9.0) < 1e-10);
  CHECK(r.max_imag < 1e-12);
  CHECK(torus_contains_zero(r));
  CHECK(std::abs(oracle::gtilde(r.argmin[0], r.argmin[1])) < 1e-10);
}

TEST_CASE("torus range finds a sign change confined between grid points") {
  LaurentPoly w(2);
  w.add_term({0, 0}, 1.0);
  w.add_term({1, 0}, 1.0);
  w.add_term({0, 1}, 1.0);
  const LaurentPoly g = w * w.inverted();
  const LaurentPoly one = LaurentPoly::constant(2, 1.0);
  // negative only on the thin ring 8.976 < G~ < 8.989 around k = 0
  const LaurentPoly d = (8.976 * one - g) * (8.989 * one - g);
  double grid_min = 1e300;
  for (int i = 0; i < 48; ++i)
    for (int j = 0; j < 48; ++j) {
      const double v = oracle::gtilde(2 * std::numbers::pi * i / 48, 2 * std::numbers::pi * j / 48);
      grid_min = std::min(grid_min, (8.976 - v) * (8.989 - v));
    }
  REQUIRE(grid_min > 0.0);
  const TorusRange r = torus_range(d, 48);
  CHECK(r.min == doctest::Approx(-0.0065 * 0.0065).epsilon(1e-6));
  CHECK(torus_contains_zero(r));
}

TEST_CASE("torus range in one and three variables") {
  LaurentPoly p(1);
  p.add_term({1}, 1.0);
  p.add_term({-1}, 1.0);
  p.add_term({0}, 0.5);
  const TorusRange r = torus_range(p, 32);
  CHECK(r.min == doctest::Approx(-1.5));
  CHECK(r.max == doctest::Approx(2.5));
  CHECK(torus_contains_zero(r));
  LaurentPoly q(3);
  q.add_term({0, 0, 0}, 4.0);
  for (int j = 0; j < 3; ++j) {
    Exponent e{};
    e[j] = 1;
    q.add_term(e, 0.5);
    e[j] = -1;
    q.add_term(e, 0.5);
  }
  const TorusRange r3 = torus_range(q, 16);
  CHECK(r3.min == doctest::Approx(1.0));
  CHECK(r3.max == doctest::Approx(7.0));
  CHECK_FALSE(torus_contains_zero(r3));
}

TEST_CASE("lambda grid and interval merging") {
  const auto grid = lambda_grid({0.0, 1.0}, 0.3);
  CHECK(grid.front() == 0.0);
  CHECK(grid.back() == 1.0);
  CHECK(grid.size() == 5);
  auto probe = [](double l) { return std::abs(l - 0.5) <= 0.2 ? SampleState::In : SampleState::Out; };
  const auto g = lambda_grid({0.0, 1.0}, 0.05);
  std::vector<SampleState> st;
  for (double l : g) st.push_back(probe(l));
  const auto b = merge_bands(g, st, probe, {0.0, 1.0}, 1e-10, 3);
  REQUIRE(b.size() == 1);
  CHECK(b[0].component == 3);
  CHECK(std::abs(b[0].lo - 0.3) < 1e-9);
  CHECK(std::abs(b[0].hi - 0.7) < 1e-9);
  const auto u = union_bands({{0, 0.0, 1.0}, {1, 0.5, 2.0}, {2, 3.0, 4.0}, {0, 4.0 + 1e-9, 5.0}}, 1e-6);
  REQUIRE(u.size() == 2);
  CHECK(u[0].hi == 2.0);
  CHECK(u[1].lo == 3.0);
  CHECK(u[1].hi == 5.0);
}

TEST_CASE("spectrum scan of a chain matches the Hill discriminant") {
  // a 1-periodic chain of single edges is the Hill operator itself
  const Potential q({{0.3, 4.0}, {0.4, -12.0}, {0.3, 1.0}});
  PeriodicGraph g(1);
  g.add_vertex("v").add_edge("v", "v", {1}, q);
  const SpectrumScan sc = spectrum_scan(g, {-20.0, 80.0}, 0.05, 32);
  const auto want = oracle::hill_bands(q, -20.0, 80.0);
  const auto got = union_bands(sc.bands, 1e-9);
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    CHECK(std::abs(got[i].lo - want[i].lo) < 1e-6);
    CHECK(std::abs(got[i].hi - want[i].hi) < 1e-6);
  }
}
