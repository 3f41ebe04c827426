#include "doctest.h"
#include "oracles.hpp"

#include "qgraph/errors.hpp"
#include "qgraph/factor_probe.hpp"
#include "qgraph/laurent.hpp"

using namespace qg;

namespace {

LaurentPoly random_poly(std::mt19937_64& rng, int nvars, int terms, int range) {
  std::uniform_int_distribution<int> ex(-range, range);
  std::normal_distribution<double> c;
  LaurentPoly p(nvars);
  for (int i = 0; i < terms; ++i) {
    Exponent e{};
    for (int j = 0; j < nvars; ++j) e[j] = ex(rng);
    p.add_term(e, {c(rng), c(rng)});
  }
  return p;
}

std::vector<Complex> random_point(std::mt19937_64& rng, int nvars) {
  std::uniform_real_distribution<double> r(0.6, 1.5), a(-3.0, 3.0);
  std::vector<Complex> z(nvars);
  for (auto& x : z) x = std::polar(r(rng), a(rng));
  return z;
}

LaurentPoly g_tilde() {
  LaurentPoly w(2);
  w.add_term({0, 0}, 1.0);
  w.add_term({1, 0}, 1.0);
  w.add_term({0, 1}, 1.0);
  return w * w.inverted();
}

}  // namespace

TEST_CASE("ring operations evaluate pointwise") {
  std::mt19937_64 rng(3);
  for (int nv = 1; nv <= 3; ++nv) {
    for (int rep = 0; rep < 10; ++rep) {
      const LaurentPoly a = random_poly(rng, nv, 5, 2), b = random_poly(rng, nv, 4, 3);
      const auto z = random_point(rng, nv);
      const Complex av = a.eval(z), bv = b.eval(z);
      CHECK(std::abs((a * b).eval(z) - av * bv) < 1e-11 * (1 + std::abs(av * bv)));
      CHECK(std::abs((a + b).eval(z) - (av + bv)) < 1e-12 * (1 + std::abs(av) + std::abs(bv)));
      CHECK(std::abs((a - a).eval(z)) == 0.0);
      std::vector<Complex> zi(z.size());
      for (std::size_t j = 0; j < z.size(); ++j) zi[j] = 1.0 / z[j];
      CHECK(std::abs(a.inverted().eval(z) - a.eval(zi)) < 1e-12 * (1 + std::abs(a.eval(zi))));
      CHECK(std::abs(pow(b, 3).eval(z) - bv * bv * bv) < 1e-10 * (1 + std::abs(bv * bv * bv)));
    }
  }
}

TEST_CASE("evaluation guards") {
  const LaurentPoly p = LaurentPoly::variable(2, 0, -1);
  const std::vector<Complex> bad{0.0, 1.0}, short_z{1.0};
  CHECK_THROWS_AS(p.eval(bad), ZeroEvaluationPoint);
  CHECK_THROWS_AS(p.eval(short_z), DimensionMismatch);
  CHECK_THROWS_AS(LaurentPoly(1) + LaurentPoly(2), DimensionMismatch);
  CHECK_THROWS_AS(LaurentPoly(5), DimensionMismatch);
}

TEST_CASE("spans and text form are deterministic") {
  LaurentPoly p(2);
  p.add_term({-1, 2}, 2.0);
  p.add_term({3, 0}, 1.0);
  CHECK(p.span(0) == 4);
  CHECK(p.span(1) == 2);
  CHECK(LaurentPoly(2).span(0) == -1);
  CHECK(p.to_text() == LaurentPoly(p).to_text());
  CHECK(p.to_text().find("z1^-1 z2^2") != std::string::npos);
}

TEST_CASE("lp_det matches cofactor determinants of the evaluated matrix") {
  std::mt19937_64 rng(17);
  for (int n = 1; n <= 4; ++n) {
    for (int nv = 1; nv <= 2; ++nv) {
      LaurentMatrix m(n, nv);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = random_poly(rng, nv, 3, 1);
      const LaurentPoly d = lp_det(m);
      for (int rep = 0; rep < 5; ++rep) {
        const auto z = random_point(rng, nv);
        const auto ev = m.eval(z);
        const Complex want = oracle::cofactor_det(ev);
        CHECK(std::abs(d.eval(z) - want) < 1e-9 * (1 + std::abs(want)));
      }
    }
  }
}

TEST_CASE("lp_det of an empty matrix is one") {
  const LaurentPoly d = lp_det(LaurentMatrix(0, 2));
  CHECK(d.is_constant());
  CHECK(d.coeff({}) == Complex(1.0));
}

TEST_CASE("fit in zeta recovers a known polynomial") {
  const LaurentPoly z = g_tilde();
  const LaurentPoly d = 2.0 * pow(z, 2) - 3.0 * z + LaurentPoly::constant(2, 0.5);
  const ZetaFit f = lp_fit_in_zeta(d, z, 3);
  CHECK(f.residual < 1e-12);
  CHECK(std::abs(f.coeffs[0] - 0.5) < 1e-10);
  CHECK(std::abs(f.coeffs[1] + 3.0) < 1e-10);
  CHECK(std::abs(f.coeffs[2] - 2.0) < 1e-10);
  CHECK(std::abs(f.coeffs[3]) < 1e-10);
}

TEST_CASE("fit in zeta fails visibly on disjoint supports") {
  LaurentPoly d(2), zeta(2);
  d.add_term({1, 0}, 1.0);
  d.add_term({0, 1}, 1.0);
  zeta.add_term({1, 1}, 1.0);
  CHECK(lp_fit_in_zeta(d, zeta, 3).residual >= 0.5);
  CHECK_THROWS_AS(lp_fit_in_zeta(d, LaurentPoly::constant(2, 1.0), 2), RankDeficient);
}

TEST_CASE("factor probe finds G~ = w w(1/z)") {
  const FactorVerdict v = lp_factor_probe(g_tilde());
  REQUIRE(v.factored);
  CHECK(rel_distance(v.f * v.g, g_tilde()) < 1e-8);
  CHECK(v.f.size() == 3);
  CHECK(v.log.lattice_points == 7);
}

TEST_CASE("factor probe on random products") {
  std::mt19937_64 rng(29);
  int found = 0;
  for (int rep = 0; rep < 5; ++rep) {
    LaurentPoly a = random_poly(rng, 2, 3, 1), b = random_poly(rng, 2, 3, 1);
    if (a.size() < 2 || b.size() < 2) continue;
    const LaurentPoly d = a * b;
    FactorVerdict v;
    try {
      v = lp_factor_probe(d);
    } catch (const SupportTooLarge&) {
      continue;
    }
    if (v.factored) {
      ++found;
      CHECK(rel_distance(v.f * v.g, d) < 1e-8);
    }
  }
  CHECK(found >= 3);
}

TEST_CASE("factor probe stays negative on an irreducible polynomial") {
  LaurentPoly p(2);  // 1 + z1 + z2: a triangle has no Minkowski split
  p.add_term({0, 0}, 1.0);
  p.add_term({1, 0}, 1.0);
  p.add_term({0, 1}, 1.0);
  CHECK_FALSE(lp_factor_probe(p).factored);
  LaurentPoly q(2);  // 1 + z1 z2 + z1^2 + z2^2 + 0.3 z1: generic, no split of its hull fits
  q.add_term({0, 0}, 1.0);
  q.add_term({1, 1}, 1.0);
  q.add_term({2, 0}, 1.0);
  q.add_term({0, 2}, 1.0);
  q.add_term({1, 0}, 0.3);
  CHECK_FALSE(lp_factor_probe(q).factored);
}

TEST_CASE("factor probe bounds") {
  LaurentPoly big(2);
  big.add_term({0, 0}, 1.0);
  big.add_term({9, 0}, 1.0);
  big.add_term({0, 9}, 1.0);
  big.add_term({9, 9}, 1.0);
  CHECK_THROWS_AS(lp_factor_probe(big), SupportTooLarge);
  CHECK_THROWS_AS(lp_factor_probe(LaurentPoly::variable(3, 2)), DimensionMismatch);
}

TEST_CASE("monomial normalization and hulls") {
  LaurentPoly p(2);
  p.add_term({-2, 3}, 4.0);
  p.add_term({1, 5}, 2.0);
  const MonomialClass mc = normalize_monomial_class(p);
  CHECK(mc.poly.min_exponent()[0] == 0);
  CHECK(mc.poly.min_exponent()[1] == 0);
  const auto hull = convex_hull({{0, 0}, {2, 0}, {1, 1}, {0, 2}, {2, 2}, {1, 0}});
  CHECK(hull.size() == 4);
  CHECK(lattice_points(hull).size() == 9);
}
