#include "doctest.h"
#include "oracles.hpp"

#include "qgraph/errors.hpp"
#include "qgraph/graph.hpp"
#include "qgraph/random_graph.hpp"

using namespace qg;

namespace {

bool has_issue(const ValidationReport& r, Severity s, const std::string& needle) {
  for (const auto& i : r.issues)
    if (i.severity == s && i.message.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("validate reports structural errors and warnings") {
  PeriodicGraph g(1);
  g.add_vertex("a").add_vertex("a").add_vertex("lonely");
  g.add_edge("a", "b", {0});
  g.add_edge("a", "a", {0, 1});
  const auto r = validate(g);
  CHECK_FALSE(r.ok());
  CHECK(has_issue(r, Severity::Error, "duplicate vertex id 'a'"));
  CHECK(has_issue(r, Severity::Error, "missing head 'b'"));
  CHECK(has_issue(r, Severity::Error, "shift of dimension 2"));
  CHECK(has_issue(r, Severity::Warning, "orphan vertex 'lonely'"));
  CHECK_FALSE(r.text().empty());

  PeriodicGraph ok(2);
  ok.add_vertex("v").add_edge("v", "v", {1, 0}).add_edge("v", "v", {0, 1});
  CHECK(validate(ok).ok());
  CHECK(validate(ok).issues.empty());
  CHECK(validate(PeriodicGraph(5)).issues.size() >= 2);

  PeriodicGraph dd(1);
  dd.add_vertex("a", VertexCondition::dirichlet_condition()).add_edge("a", "a", {1});
  CHECK(validate(dd).ok());  // empty spectral matrix is only a warning
  CHECK(has_issue(validate(dd), Severity::Warning, "no non-Dirichlet"));
}

TEST_CASE("vertex lookup") {
  PeriodicGraph g(1);
  g.add_vertex("x", VertexCondition::robin(0.5));
  CHECK(g.vertex_index("x") == 0);
  CHECK(g.vertex("x").condition.alpha == 0.5);
  CHECK_THROWS_AS(g.vertex_index("y"), UnknownVertex);
  CHECK(dirichlet_at_orbit(g, "x").vertex("x").condition.dirichlet);
  CHECK(dirichlet_at_orbit(g, "x").robin_count() == 0);
}

TEST_CASE("single-vertex join merges one orbit") {
  PeriodicGraph g1(1), g2(1);
  g1.add_vertex("a", VertexCondition::robin(0.5)).add_vertex("b").add_edge("a", "b", {0}).add_edge("b", "a", {1});
  g2.add_vertex("a", VertexCondition::robin(1.0)).add_vertex("c").add_edge("a", "c", {1});
  const PeriodicGraph j = single_vertex_join(g1, g2, {"b", "c"});
  CHECK(j.vertices().size() == 3);
  CHECK(j.edges().size() == 3);
  CHECK(j.has_vertex("g2.a"));
  CHECK(j.vertex("b").condition.alpha == doctest::Approx(0.0));
  CHECK(j.edges()[2].head == "b");
  CHECK(j.edges()[2].tail == "g2.a");
  const PeriodicGraph jo = single_vertex_join(g1, g2, {"a", "a", 3.0});
  CHECK(jo.vertex("a").condition.alpha == 3.0);
  const PeriodicGraph js = single_vertex_join(g1, g2, {"a", "a"});
  CHECK(js.vertex("a").condition.alpha == doctest::Approx(1.5));
  CHECK(validate(js).ok());

  CHECK_THROWS_AS(single_vertex_join(g1, PeriodicGraph(2).add_vertex("q"), {"a", "q"}), DimensionMismatch);
  CHECK_THROWS_AS(single_vertex_join(dirichlet_at_orbit(g1, "a"), g2, {"a", "a"}), DirichletJoinPoint);
  CHECK_THROWS_AS(single_vertex_join(g1, g2, {"zz", "a"}), UnknownVertex);
}

TEST_CASE("joining a pendant path leaves the rest intact") {
  // dispersion of the join at a vertex with a one-edge decoration equals the
  // oracle matrix of the combined graph
  std::mt19937_64 rng(4);
  for (int rep = 0; rep < 10; ++rep) {
    const PeriodicGraph g = random_graph(rng, {.d = 1, .max_vertices = 3});
    PeriodicGraph leaf(1);
    leaf.add_vertex("p").add_vertex("q", VertexCondition::robin(0.7)).add_edge("p", "q", {0}, random_potential(rng));
    const PeriodicGraph j = single_vertex_join(g, leaf, {"v0", "p"});
    CHECK(j.robin_count() == g.robin_count() + 1);
    CHECK(validate(j).ok());
  }
}

TEST_CASE("subdivision splits an edge and keeps its shift on the second half") {
  PeriodicGraph g(2);
  g.add_vertex("a").add_vertex("b").add_edge("a", "b", {1, -1}, Potential::well(-16, 1.0 / 3, 2.0 / 3));
  std::string mid;
  const PeriodicGraph s = subdivide_edge(g, 0, 0.25, &mid);
  CHECK(mid == "e0.mid");
  REQUIRE(s.edges().size() == 2);
  CHECK(s.edges()[0].tail == "a");
  CHECK(s.edges()[0].head == mid);
  CHECK(s.edges()[0].shift == std::vector<int>{0, 0});
  CHECK(s.edges()[1].shift == std::vector<int>{1, -1});
  CHECK(s.edges()[0].potential.total_length() == doctest::Approx(0.25));
  CHECK(s.edges()[1].potential.total_length() == doctest::Approx(0.75));
  CHECK(s.vertex(mid).condition == VertexCondition::robin(0.0));
  CHECK_THROWS_AS(subdivide_edge(g, 3, 0.5), UnknownEdge);
  CHECK_THROWS_AS(subdivide_edge(g, 0, 0.0), BoundaryT);
  CHECK_THROWS_AS(subdivide_edge(g, 0, 1.0), BoundaryT);
}

TEST_CASE("random graphs are valid and seeded") {
  std::mt19937_64 a(9), b(9);
  for (int d = 1; d <= 2; ++d) {
    const auto x = random_graph(a, {.d = d}), y = random_graph(b, {.d = d});
    CHECK(validate(x).ok());
    CHECK(x.edges().size() == y.edges().size());
    CHECK(x.edges().back().potential == y.edges().back().potential);
  }
}
