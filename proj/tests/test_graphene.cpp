#include "doctest.h"
#include "oracles.hpp"

#include "qgraph/errors.hpp"
#include "qgraph/graphene.hpp"
#include "qgraph/spectral.hpp"

#include <numbers>

using namespace qg;

namespace {

const Potential q0 = Potential::well(-16.0, 1.0 / 3.0, 2.0 / 3.0);
const Potential qc = Potential::well(-10.0, 0.5, 1.0);

LayerSpec layer(const Potential& q) {
  LayerSpec ls;
  ls.q.fill(q);
  return ls;
}

StackSpec single(const Potential& q) {
  StackSpec ss;
  ss.layers.push_back({layer(q), Shift::A});
  return ss;
}

StackSpec two(Shift s2, Potential c1, Potential c2) {
  StackSpec ss;
  ss.layers.push_back({layer(q0), Shift::A});
  ss.layers.push_back({layer(q0), s2});
  ss.connectors.push_back({std::move(c1), std::move(c2)});
  return ss;
}

}  // namespace

TEST_CASE("single layer layout") {
  const PeriodicGraph g = single_layer(layer(q0));
  REQUIRE(g.vertices().size() == 2);
  REQUIRE(g.edges().size() == 3);
  CHECK(g.edges()[1].shift == std::vector<int>{1, 0});
  CHECK(g.edges()[2].shift == std::vector<int>{0, 1});
  for (const auto& e : g.edges()) {
    CHECK(e.tail == g.vertices()[0].id);
    CHECK(e.head == g.vertices()[1].id);
  }
}

TEST_CASE("rotation reverses potentials and swaps Robin parameters") {
  LayerSpec ls = layer(qc);
  ls.alpha = {0.25, -1.0};
  ls.rotated = true;
  CHECK(ls.effective_q()[0] == reverse_potential(qc));
  CHECK(ls.effective_alpha()[0] == -1.0);
  CHECK(ls.effective_alpha()[1] == 0.25);
}

TEST_CASE("stack ids and shifted connectors") {
  const PeriodicGraph aa = stack(two(Shift::A, q0, qc));
  CHECK(aa.has_vertex("L1.v1"));
  CHECK(aa.has_vertex("L2.v2"));
  CHECK(aa.edges().size() == 8);
  const PeriodicGraph ab = stack(two(Shift::B, q0, q0));
  REQUIRE(ab.edges().size() == 7);
  CHECK(ab.edges().back().tail == "L1.v1");
  CHECK(ab.edges().back().head == "L2.v2");
  StackSpec bad = two(Shift::A, q0, q0);
  bad.connectors.clear();
  CHECK_THROWS_AS(bad.validate(), InvalidGraph);
}

TEST_CASE("single layer characteristic function is 9 c s'") {
  for (const Potential& q : {q0, qc, Potential::zero()}) {
    const StackModel m(single(q));
    for (double l : {-3.3, 4.1, 17.7, 55.5}) {
      const oracle::Mat2 t = oracle::transfer(q, l);
      const auto mu = m.mu(l);
      REQUIRE(mu.size() == 1);
      CHECK(std::abs(mu[0] - 9.0 * t[0] * t[3]) < 1e-8 * std::max(1.0, 9.0 * std::abs(t[0] * t[3])));
    }
  }
}

TEST_CASE("single layer bands equal the Hill spectrum") {
  const StackModel m(single(q0));
  const auto got = union_bands(bands(m, {-20.0, 120.0}, 0.05).bands, 1e-9);
  const auto want = oracle::hill_bands(q0, -20.0, 120.0);
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    CHECK(std::abs(got[i].lo - want[i].lo) < 1e-6);
    CHECK(std::abs(got[i].hi - want[i].hi) < 1e-6);
  }
}

TEST_CASE("free single layer has no gaps above zero") {
  const StackModel m(single(Potential::zero()));
  const auto got = union_bands(bands(m, {-20.0, 120.0}, 0.05).bands, 1e-6);
  REQUIRE(got.size() == 1);
  CHECK(std::abs(got[0].lo) < 1e-6);
  CHECK(got[0].hi == 120.0);
}

TEST_CASE("shifted stacks are polynomials in zeta of full degree") {
  for (Shift s : {Shift::B, Shift::C}) {
    const StackModel m(two(s, qc, qc));
    CHECK_FALSE(m.type2());
    for (double l : {2.2, 13.1, 41.0}) {
      const ZetaStructure zs = zeta_components(dispersion(m.graph(), l), m.zeta(l), 2);
      CHECK(zs.degree == 2);
      CHECK(zs.residual < 1e-8);
      CHECK(m.mu(l).size() == 2);
    }
  }
}

TEST_CASE("components whose zeta term is below resolution are at infinity") {
  StackSpec ss;
  for (Shift sh : {Shift::A, Shift::B, Shift::C, Shift::B, Shift::A}) ss.layers.push_back({layer(q0), sh});
  ss.connectors = {{q0, q0}, {qc, qc}, {Potential::zero(), Potential::zero()}, {q0, q0}};
  const StackModel m(ss);
  const auto deep = m.mu(-20.0);
  REQUIRE(deep.size() == 5);
  CHECK(std::isinf(deep.back().real()));
  for (Complex v : deep)
    if (std::isfinite(v.real())) CHECK(!(v.real() >= 0.0 && v.real() <= 9.0));
  for (Complex v : m.mu(2.0)) CHECK(std::isfinite(v.real()));
  const auto b = bands(m, {-20.0, -8.0}, 0.05);
  CHECK(b.bands.empty());
}

TEST_CASE("mu stays real next to a Dirichlet eigenvalue of the layer") {
  StackSpec ss;
  for (Shift sh : {Shift::A, Shift::B, Shift::C}) ss.layers.push_back({layer(q0), sh});
  ss.connectors = {{q0, q0}, {qc, qc}};
  const StackModel m(ss);
  const double lam = 83.945;  // s0 ~ 1e-5
  REQUIRE(std::abs(oracle::transfer(q0, lam)[1]) < 2e-5);
  for (Complex v : m.mu(lam)) CHECK(v.imag() == 0.0);
  // the oracle determinant changes sign there, so no gap may open
  double lo = 1e300, hi = -1e300;
  for (int i = 0; i < 96; ++i)
    for (int j = 0; j < 96; ++j) {
      const std::vector<oracle::cd> z{std::polar(1.0, 2 * std::numbers::pi * i / 96), std::polar(1.0, 2 * std::numbers::pi * j / 96)};
      const double v = oracle::dispersion(m.graph(), lam, z).real();
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  REQUIRE(lo < 0.0);
  REQUIRE(hi > 0.0);
  const auto u = union_bands(bands(m, {83.5, 84.5}, 0.05).bands, 1e-9);
  REQUIRE(u.size() == 1);
  CHECK(u[0].lo < lam);
  CHECK(u[0].hi > lam);
}

TEST_CASE("AA model uses the characteristic matrix") {
  const StackModel m(two(Shift::A, q0, qc));
  CHECK(m.type2());
  CHECK(m.uniform_s());
  CHECK(m.mu_range(3.0).lo == 0.0);
  CHECK(m.mu_range(3.0).hi == 9.0);
  // mu agrees with the roots of the zeta polynomial
  for (double l : {1.7, 25.0}) {
    const auto mu = m.mu(l);
    const double s0 = m.s0(l);
    const ZetaStructure zs = zeta_components(dispersion(m.graph(), l), m.zeta(l), 2);
    REQUIRE(zs.roots.size() == 2);
    for (int i = 0; i < 2; ++i) CHECK(std::abs(mu[i] - s0 * s0 * zs.roots[i]) < 1e-6 * (1 + std::abs(mu[i])));
  }
}

TEST_CASE("cones of the free layer sit at zeros of cos sqrt(lambda)") {
  const StackModel m(single(Potential::zero()));
  const auto cones = cone_scan(m, {0.5, 70.0}, 0.05);
  REQUIRE(cones.size() == 3);
  for (int i = 0; i < 3; ++i) {
    const double want = std::pow((2 * i + 1) * std::numbers::pi / 2, 2);
    CHECK(std::abs(cones[i].lambda_star - want) < 1e-6);
    CHECK(cones[i].classification == ConeClass::Cone);
  }
}

TEST_CASE("classify_zero") {
  CHECK(classify_zero(0.0, 0.5) == ConeClass::Cone);
  CHECK(classify_zero(0.3, 0.5) == ConeClass::Transversal);
  CHECK(classify_zero(0.0, 0.0) == ConeClass::Degenerate);
  CHECK(std::string(cone_class_name(ConeClass::Transversal)) == "Transversal");
}

TEST_CASE("mu curves are continued across the window") {
  const StackModel m(two(Shift::A, Potential::zero(), qc));
  const MuCurves mc = mu_curves(m, {0.0, 30.0}, 0.1);
  REQUIRE(mc.lambda.size() == mc.mu.size());
  CHECK(mc.lambda.size() + mc.skipped_poles.size() == lambda_grid({0.0, 30.0}, 0.1).size());
  for (const auto& row : mc.mu) CHECK(row.size() == 2);
  // where both curves stay bounded the continued pairing is never worse
  // than the swapped one; near a pole of mu the curves pass through infinity
  int checked = 0;
  for (std::size_t i = 1; i < mc.mu.size(); ++i) {
    const auto &p = mc.mu[i - 1], &q = mc.mu[i];
    if (std::max({std::abs(p[0]), std::abs(p[1]), std::abs(q[0]), std::abs(q[1])}) > 50.0) continue;
    const double kept = std::abs(q[0] - p[0]) + std::abs(q[1] - p[1]);
    const double swapped = std::abs(q[0] - p[1]) + std::abs(q[1] - p[0]);
    CHECK(kept <= swapped + 1e-9);
    ++checked;
  }
  CHECK(checked > 100);
}

TEST_CASE("G~ extrema") {
  const GtildeExtrema e = gtilde_extrema(256);
  CHECK(std::abs(e.min) < 1e-12);
  CHECK(std::abs(e.max - 9.0) < 1e-12);
  CHECK(std::abs(std::abs(e.argmin[0]) - 2 * std::numbers::pi / 3) < 1e-6);
  CHECK(std::abs(e.argmin[0] + e.argmin[1]) < 1e-6);
  CHECK(gtilde(0.4, -1.1) == doctest::Approx(oracle::gtilde(0.4, -1.1)));
}

TEST_CASE("dispersion surface points solve mu = G~") {
  const StackModel m(single(q0));
  const auto pts = dispersion_surface(m, {2.0, 12.0}, 9);
  REQUIRE_FALSE(pts.empty());
  for (const auto& p : pts) {
    const oracle::Mat2 t = oracle::transfer(q0, p.lambda);
    CHECK(std::abs(9.0 * t[0] * t[3] - oracle::gtilde(p.k1, p.k2)) < 1e-6);
  }
  StackSpec mixed = single(q0);
  mixed.layers[0].layer.q[2] = Potential::constant(1.0);
  CHECK_THROWS_AS(dispersion_surface(StackModel(mixed), {2.0, 12.0}, 9), DimensionMismatch);
}
