#include "doctest.h"
#include "oracles.hpp"

#include "qgraph/errors.hpp"
#include "qgraph/graphene.hpp"
#include "qgraph/random_graph.hpp"
#include "qgraph/reduce.hpp"
#include "qgraph/spectral.hpp"

#include "json.hpp"

#include <Eigen/Dense>

#include <numbers>

using namespace qg;

namespace {

const Potential q0 = Potential::well(-16.0, 1.0 / 3.0, 2.0 / 3.0);
const Potential qc = Potential::well(-10.0, 0.5, 1.0);

double pick_lambda(std::mt19937_64& rng, const PeriodicGraph& g, double lo = -10.0, double hi = 60.0) {
  std::uniform_real_distribution<double> lam(lo, hi);
  for (;;) {
    const double l = lam(rng);
    if (!oracle::near_pole(g, l)) return l;
  }
}

StackSpec aa_stack(int n, const std::vector<std::pair<Potential, Potential>>& conn) {
  StackSpec ss;
  for (int j = 0; j < n; ++j) {
    LayerSpec ls;
    ls.q.fill(q0);
    ss.layers.push_back({ls, Shift::A});
  }
  for (const auto& [a, b] : conn) ss.connectors.push_back({a, b});
  return ss;
}

}  // namespace

TEST_CASE("join identity on random pairs, plain and with override") {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 30; ++rep) {
    const RandomGraphOptions o{.d = 1 + rep % 2, .max_vertices = 3, .extra_edges = 1, .max_value = 10.0};
    const PeriodicGraph g1 = random_graph(rng, o), g2 = random_graph(rng, o);
    const std::string v1 = g1.vertices().back().id, v2 = g2.vertices().front().id;
    const std::optional<double> ov = rep % 2 ? std::optional<double>(0.75) : std::nullopt;
    const PeriodicGraph joined = single_vertex_join(g1, g2, {v1, v2, ov});
    const double l = pick_lambda(rng, joined);
    const JoinCheck jc = join_dispersion(g1, v1, g2, v2, l, ov);
    CHECK(jc.rel_err < 1e-8);
    // and the direct side agrees with the oracle matrix
    const auto z = oracle::torus_point(rng, g1.dim());
    const Complex want = oracle::dispersion(joined, l, z);
    CHECK(std::abs(jc.formula.eval(z) - want) < 1e-8 * std::max(1.0, std::abs(want)));
  }
}

TEST_CASE("join with a single edge pendant, zero alpha") {
  PeriodicGraph g(1), leaf(1);
  g.add_vertex("v").add_edge("v", "v", {1}, q0);
  leaf.add_vertex("p").add_vertex("q").add_edge("p", "q", {0}, qc);
  CHECK(join_dispersion(g, "v", leaf, "p", 7.3).rel_err < 1e-10);
}

TEST_CASE("join identity violation is raised with a tight tolerance") {
  PeriodicGraph g(1), h(1);
  g.add_vertex("v").add_edge("v", "v", {1}, q0);
  h.add_vertex("w").add_edge("w", "w", {1}, qc);
  CHECK_THROWS_AS(join_dispersion(g, "v", h, "w", 3.7, std::nullopt, -1.0), JoinIdentityViolation);
}

TEST_CASE("zeta components of a synthetic polynomial") {
  LaurentPoly w(2);
  w.add_term({0, 0}, 1.0);
  w.add_term({1, 0}, 1.0);
  w.add_term({0, 1}, 1.0);
  const LaurentPoly zeta = w * w.inverted();
  // (zeta - 2)^2 (zeta + 1)
  const LaurentPoly two = LaurentPoly::constant(2, 2.0), one = LaurentPoly::constant(2, 1.0);
  const LaurentPoly d = (zeta - two) * (zeta - two) * (zeta + one);
  const ZetaStructure zs = zeta_components(d, zeta, 4);
  CHECK(zs.degree == 3);
  REQUIRE(zs.roots.size() == 3);
  CHECK(std::abs(zs.roots[0] + 1.0) < 1e-7);
  REQUIRE(zs.clusters.size() == 2);
  CHECK(zs.clusters[1].multiplicity == 2);
  CHECK(std::abs(zs.clusters[1].value - 2.0) < 1e-6);
  LaurentPoly off(2);
  off.add_term({1, 0}, 1.0);
  CHECK_THROWS_AS(zeta_components(off, zeta, 3), StructureNotFound);
}

TEST_CASE("poly_roots") {
  const auto r = poly_roots({6.0, -5.0, 1.0});
  REQUIRE(r.size() == 2);
  CHECK(std::abs(r[0] - 2.0) < 1e-12);
  CHECK(std::abs(r[1] - 3.0) < 1e-12);
  CHECK(poly_roots({1.0}).empty());
}

TEST_CASE("type-2 identity D = det(B1 B2 - zeta I) against the oracle") {
  std::mt19937_64 rng(41);
  for (int n = 2; n <= 3; ++n) {
    std::vector<std::pair<Potential, Potential>> conn;
    for (int j = 0; j + 1 < n; ++j) conn.push_back(j % 2 ? std::pair{qc, q0} : std::pair{q0, qc});
    const StackSpec ss = aa_stack(n, conn);
    const PeriodicGraph g = stack(ss);
    const Type2Spec t2 = to_type2(ss);
    for (int rep = 0; rep < 10; ++rep) {
      const double l = pick_lambda(rng, g);
      const auto z = oracle::torus_point(rng, 2);
      const Type2Characteristic tc = type2_characteristic(t2, l);
      const double s = oracle::transfer(q0, l)[1];
      const Complex w = (1.0 + z[0] + z[1]) / s;
      const Complex zeta = w * std::conj(w);
      oracle::CMat m(n, std::vector<Complex>(n));
      const Eigen::MatrixXd prod = tc.b1 * tc.b2;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m[i][j] = prod(i, j) - (i == j ? zeta : 0.0);
      const Complex lhs = oracle::dispersion(g, l, z), rhs = oracle::cofactor_det(m);
      CHECK(std::abs(lhs - rhs) <= 1e-8 * std::max(std::abs(lhs), std::abs(rhs)));
      CHECK(tc.mu.size() == static_cast<std::size_t>(n));
    }
  }
}

TEST_CASE("isospectral layers: rotation passes, perturbation is caught") {
  const Potential rev = reverse_potential(qc);
  CHECK_NOTHROW(check_isospectral_layers({{qc, q0}, {rev, q0}}, {-30.0, 150.0}));
  const Potential bumped = Potential::well(-16.1, 1.0 / 3.0, 2.0 / 3.0);
  try {
    check_isospectral_layers({{q0, q0, q0}, {q0, bumped, q0}}, {-30.0, 150.0});
    FAIL("no violation raised");
  } catch (const IsospectralityViolation& e) {
    CHECK(e.layer() == 1);
    CHECK(e.edge() == 1);
  }
}

TEST_CASE("pole move identity with a consistent sign") {
  std::mt19937_64 rng(51);
  int checked = 0;
  for (int rep = 0; rep < 20; ++rep) {
    const PeriodicGraph g = random_graph(rng, {.d = 1 + rep % 2, .max_vertices = 3, .extra_edges = 1});
    const std::size_t e = rep % g.edges().size();
    std::vector<PoleMoveSample> samples;
    for (int k = 0; k < 4; ++k) samples.push_back({oracle::torus_point(rng, g.dim()), pick_lambda(rng, g)});
    try {
      const PoleMoveReport r = verify_pole_move(g, e, 0.3 + 0.02 * rep, samples);
      CHECK(r.holds(1e-8));
      CHECK(std::abs(r.sign) == 1);
      const auto j = nlohmann::json::parse(r.to_json());
      CHECK(j.at("samples") == 4);
      ++checked;
    } catch (const SampleAtPole&) {
    }
  }
  CHECK(checked >= 15);
}

TEST_CASE("pole move rejects samples at a pole of the new pieces") {
  PeriodicGraph g(1);
  g.add_vertex("v").add_edge("v", "v", {1}, Potential::zero());
  // halves of a free unit edge have Dirichlet values (2 n pi)^2
  const double l = 4.0 * std::numbers::pi * std::numbers::pi;
  CHECK_THROWS_AS(verify_pole_move(g, 0, 0.5, {{{std::polar(1.0, 0.3)}, l}}), SampleAtPole);
}

TEST_CASE("severed edge factor would break the pole move") {
  // Dirichlet loop v -> v: subdividing gives an edge with a Neumann midpoint.
  PeriodicGraph g(1);
  g.add_vertex("d", VertexCondition::dirichlet_condition()).add_vertex("r", VertexCondition::robin(0.3));
  g.add_edge("d", "d", {1}, q0).add_edge("d", "r", {0}, qc);
  const PoleMoveReport r = verify_pole_move(g, 0, 0.4, {{{std::polar(1.0, 0.9)}, 3.3}, {{std::polar(1.0, -2.0)}, 17.0}});
  CHECK(r.holds(1e-8));
}

TEST_CASE("section 6 fixtures are irreducible and specializations agree") {
  for (auto which : {Section6::Tripartite, Section6::CrossedBilayer}) {
    const LaurentMatrix m = build_section6_example(which);
    const LaurentPoly d = lp_det(m);
    for (int rep = 0; rep < 3; ++rep) {
      std::mt19937_64 rng(61 + rep);
      const auto z = oracle::torus_point(rng, 2);
      const auto ev = m.eval(z);
      const Complex want = oracle::cofactor_det(ev);
      CHECK(std::abs(d.eval(z) - want) < 1e-10 * std::max(1.0, std::abs(want)));
    }
    const IrreducibilityReport r = irreducibility_probe(d, 7);
    CHECK_FALSE(r.verdict.factored);
    CHECK(r.specializations_consistent);
    CHECK(r.specializations.size() == 5);
    CHECK(r.verdict.log.splits_tried > 0);
    CHECK(r.summary().find("NoFactorizationFound") != std::string::npos);
  }
}

TEST_CASE("section 6 matrices are Hermitian on the torus") {
  for (auto which : {Section6::Tripartite, Section6::CrossedBilayer}) {
    const LaurentMatrix m = build_section6_example(which);
    std::mt19937_64 rng(3);
    const auto ev = m.eval(oracle::torus_point(rng, 2));
    for (std::size_t i = 0; i < ev.size(); ++i)
      for (std::size_t j = 0; j < ev.size(); ++j) CHECK(std::abs(ev[i][j] - std::conj(ev[j][i])) < 1e-12);
  }
}
