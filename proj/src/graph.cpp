#include "qgraph/graph.hpp"

#include "qgraph/errors.hpp"
#include "qgraph/laurent.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace qg {

PeriodicGraph& PeriodicGraph::add_vertex(const std::string& id, VertexCondition cond) {
  vertices_.push_back({id, cond});
  return *this;
}

PeriodicGraph& PeriodicGraph::add_edge(const std::string& tail, const std::string& head, std::vector<int> shift,
                                       Potential pot) {
  edges_.push_back({tail, head, std::move(shift), std::move(pot)});
  return *this;
}

bool PeriodicGraph::has_vertex(const std::string& id) const {
  return std::any_of(vertices_.begin(), vertices_.end(), [&](const Vertex& v) { return v.id == id; });
}

std::size_t PeriodicGraph::vertex_index(const std::string& id) const {
  for (std::size_t i = 0; i < vertices_.size(); ++i)
    if (vertices_[i].id == id) return i;
  throw UnknownVertex("unknown vertex '" + id + "'");
}

std::size_t PeriodicGraph::robin_count() const {
  return static_cast<std::size_t>(
      std::count_if(vertices_.begin(), vertices_.end(), [](const Vertex& v) { return !v.condition.dirichlet; }));
}

bool ValidationReport::ok() const {
  return std::none_of(issues.begin(), issues.end(), [](const auto& i) { return i.severity == Severity::Error; });
}

std::string ValidationReport::text() const {
  std::ostringstream os;
  for (const auto& i : issues) os << (i.severity == Severity::Error ? "error: " : "warning: ") << i.message << '\n';
  return os.str();
}

ValidationReport validate(const PeriodicGraph& g) {
  ValidationReport r;
  auto err = [&](std::string m) { r.issues.push_back({Severity::Error, std::move(m)}); };
  auto warn = [&](std::string m) { r.issues.push_back({Severity::Warning, std::move(m)}); };

  if (g.dim() < 0 || g.dim() > kMaxVars) err("periodicity dimension " + std::to_string(g.dim()) + " out of range");
  if (g.vertices().empty()) err("graph has no vertices");

  std::set<std::string> ids;
  for (const auto& v : g.vertices()) {
    if (v.id.empty()) err("vertex with empty id");
    if (!ids.insert(v.id).second) err("duplicate vertex id '" + v.id + "'");
  }

  std::set<std::string> touched;
  for (std::size_t e = 0; e < g.edges().size(); ++e) {
    const auto& ed = g.edges()[e];
    const std::string tag = "edge " + std::to_string(e);
    if (!ids.count(ed.tail)) err(tag + " references missing tail '" + ed.tail + "'");
    if (!ids.count(ed.head)) err(tag + " references missing head '" + ed.head + "'");
    if (static_cast<int>(ed.shift.size()) != g.dim())
      err(tag + " has a shift of dimension " + std::to_string(ed.shift.size()) + ", expected " +
          std::to_string(g.dim()));
    if (!(ed.potential.total_length() > 0.0)) err(tag + " has non-positive length");
    touched.insert(ed.tail);
    touched.insert(ed.head);
  }
  for (const auto& v : g.vertices())
    if (!touched.count(v.id)) warn("orphan vertex '" + v.id + "'");
  if (!g.vertices().empty() && g.robin_count() == 0)
    warn("no non-Dirichlet vertex: the spectral matrix is empty");
  return r;
}

PeriodicGraph dirichlet_at_orbit(const PeriodicGraph& g, const std::string& v) {
  PeriodicGraph out = g;
  out.mutable_vertices()[g.vertex_index(v)].condition = VertexCondition::dirichlet_condition();
  return out;
}

PeriodicGraph single_vertex_join(const PeriodicGraph& g1, const PeriodicGraph& g2, const JoinSpec& js) {
  if (g1.dim() != g2.dim())
    throw DimensionMismatch("cannot join graphs of periodicity " + std::to_string(g1.dim()) + " and " +
                            std::to_string(g2.dim()));
  const Vertex& a = g1.vertex(js.v1);
  const Vertex& b = g2.vertex(js.v2);
  if (a.condition.dirichlet || b.condition.dirichlet)
    throw DirichletJoinPoint("join vertices must carry a Robin condition");

  PeriodicGraph out = g1;
  out.mutable_vertices()[g1.vertex_index(js.v1)].condition =
      VertexCondition::robin(js.alpha_override.value_or(a.condition.alpha + b.condition.alpha));

  std::map<std::string, std::string> rename{{js.v2, js.v1}};
  for (const auto& v : g2.vertices()) {
    if (v.id == js.v2) continue;
    std::string id = v.id;
    while (out.has_vertex(id)) id = "g2." + id;
    rename[v.id] = id;
    out.add_vertex(id, v.condition);
  }
  for (const auto& e : g2.edges()) out.add_edge(rename.at(e.tail), rename.at(e.head), e.shift, e.potential);
  return out;
}

PeriodicGraph subdivide_edge(const PeriodicGraph& g, std::size_t e, double t, std::string* new_vertex) {
  if (e >= g.edges().size()) throw UnknownEdge("edge index " + std::to_string(e) + " out of range");
  if (!(t > 0.0 && t < 1.0)) throw BoundaryT("subdivision point must lie strictly inside (0, 1)");

  const Edge old = g.edges()[e];
  auto [p1, p2] = old.potential.split_at(t * old.potential.total_length());

  PeriodicGraph out = g;
  std::string id = "e" + std::to_string(e) + ".mid";
  while (out.has_vertex(id)) id += "'";
  out.add_vertex(id, VertexCondition::robin(0.0));

  auto& edges = out.mutable_edges();
  edges[e] = Edge{old.tail, id, std::vector<int>(g.dim(), 0), std::move(p1)};
  edges.insert(edges.begin() + static_cast<std::ptrdiff_t>(e) + 1, Edge{id, old.head, old.shift, std::move(p2)});
  if (new_vertex) *new_vertex = id;
  return out;
}

}  // namespace qg
