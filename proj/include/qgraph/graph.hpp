#pragma once

// Periodic quantum graphs: a finite fundamental domain of vertices and
// oriented edges, each edge carrying a lattice shift and a potential.

#include "qgraph/edge_ode.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qg {

struct VertexCondition {
  bool dirichlet = false;
  double alpha = 0.0;  // Robin parameter, ignored for Dirichlet vertices

  static VertexCondition robin(double a) { return {false, a}; }
  static VertexCondition dirichlet_condition() { return {true, 0.0}; }
  bool operator==(const VertexCondition&) const = default;
};

struct Vertex {
  std::string id;
  VertexCondition condition;
};

// x = 0 sits at the tail, x = L at the head translated by `shift`.
struct Edge {
  std::string tail;
  std::string head;
  std::vector<int> shift;
  Potential potential;
};

class PeriodicGraph {
 public:
  explicit PeriodicGraph(int d = 0) : d_(d) {}

  int dim() const { return d_; }
  const std::vector<Vertex>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }

  PeriodicGraph& add_vertex(const std::string& id, VertexCondition cond = VertexCondition::robin(0.0));
  PeriodicGraph& add_edge(const std::string& tail, const std::string& head, std::vector<int> shift,
                          Potential pot = Potential::zero());

  bool has_vertex(const std::string& id) const;
  // Throws UnknownVertex.
  std::size_t vertex_index(const std::string& id) const;
  const Vertex& vertex(const std::string& id) const { return vertices_[vertex_index(id)]; }
  // Number of non-Dirichlet vertices (rows of the spectral matrix).
  std::size_t robin_count() const;

  // Surgeries implemented as free functions need raw access.
  std::vector<Vertex>& mutable_vertices() { return vertices_; }
  std::vector<Edge>& mutable_edges() { return edges_; }

 private:
  int d_;
  std::vector<Vertex> vertices_;
  std::vector<Edge> edges_;
};

enum class Severity { Warning, Error };

struct ValidationIssue {
  Severity severity;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const;
  std::string text() const;
};

ValidationReport validate(const PeriodicGraph& g);

PeriodicGraph dirichlet_at_orbit(const PeriodicGraph& g, const std::string& v);

struct JoinSpec {
  std::string v1;
  std::string v2;
  std::optional<double> alpha_override;
};

// The merged vertex keeps v1's id. Ids of g2 that collide with g1 get a
// "g2." prefix.
PeriodicGraph single_vertex_join(const PeriodicGraph& g1, const PeriodicGraph& g2, const JoinSpec& js);

// Replaces edge e by e1 (tail -> new vertex, no shift) followed by e2 (new
// vertex -> head, original shift); e2 is inserted directly after e1. The new
// vertex is Neumann and its id is returned through new_vertex if given.
PeriodicGraph subdivide_edge(const PeriodicGraph& g, std::size_t e, double t, std::string* new_vertex = nullptr);

}  // namespace qg
