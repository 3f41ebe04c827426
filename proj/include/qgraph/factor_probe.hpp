#pragma once

// Bounded search for a factorization D = f * g into non-monomial Laurent
// polynomials in at most two variables. A positive verdict is self-validated;
// a negative verdict only means the bounded search found nothing.

#include "qgraph/laurent.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace qg {

using LatticePoint = std::array<int, 2>;

// D modulo monomial units: shift puts the support in the positive quadrant
// touching both axes, scale makes the lexicographically largest coefficient 1.
struct MonomialClass {
  LaurentPoly poly;
  Exponent shift{};   // original = poly * z^(-shift) * scale
  Complex scale = 1.0;
};

MonomialClass normalize_monomial_class(const LaurentPoly& d);

// Convex hull (counter-clockwise, starting at the lexicographic minimum; no
// collinear points). A single point or a segment is returned as 1 or 2 points.
std::vector<LatticePoint> convex_hull(std::vector<LatticePoint> pts);
std::vector<LatticePoint> lattice_points(const std::vector<LatticePoint>& hull);

struct ProbeOptions {
  int max_support = 64;
  int starts = 8;
  int als_iterations = 400;
  int newton_iterations = 60;
  std::uint64_t seed = 20240601;
  double accept_tol = 1e-8;
};

struct ProbeLog {
  int lattice_points = 0;
  int polytope_edges = 0;
  int splits_enumerated = 0;
  int splits_tried = 0;
  int starts_per_split = 0;
  int max_support = 0;
  double best_residual = 1.0;
  std::string summary() const;
};

struct FactorVerdict {
  bool factored = false;
  LaurentPoly f;
  LaurentPoly g;
  double residual = 1.0;
  ProbeLog log;
};

// Throws SupportTooLarge when the Newton polytope has more than 64 lattice
// points, DimensionMismatch when nvars > 2.
FactorVerdict lp_factor_probe(const LaurentPoly& d, const ProbeOptions& opts = {});

}  // namespace qg
