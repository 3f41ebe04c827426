#pragma once

// Single-layer and stacked graphene quantum graphs, characteristic curves,
// band tables, Dirac-cone classification and dispersion surfaces.

#include "qgraph/graph.hpp"
#include "qgraph/reduce.hpp"
#include "qgraph/spectral.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace qg {

struct LayerSpec {
  std::array<Potential, 3> q{};
  std::array<double, 2> alpha{0.0, 0.0};
  bool rotated = false;

  // Potentials and Robin parameters after applying the rotation flag.
  std::array<Potential, 3> effective_q() const;
  std::array<double, 2> effective_alpha() const;
};

enum class Shift { A = 0, B = 1, C = 2 };
char shift_name(Shift s);

struct StackLayer {
  LayerSpec layer;
  Shift shift = Shift::A;
};

// Between layers j and j+1. For an aligned (AA) pair q1 couples the v1
// vertices and q2 the v2 vertices; a shifted pair has one aligned vertex
// pair and uses q1 only.
struct ConnectorSpec {
  Potential q1;
  Potential q2;
};

struct StackSpec {
  std::vector<StackLayer> layers;
  std::vector<ConnectorSpec> connectors;
  Interval iso_window{-30.0, 150.0};

  std::size_t n() const { return layers.size(); }
  bool all_aligned() const;  // every layer has the same shift
  // Throws InvalidGraph or IsospectralityViolation.
  void validate() const;
};

// Edge i runs v1 -> v2 with shift (0,0), (1,0), (0,1) for i = 0, 1, 2.
PeriodicGraph single_layer(const LayerSpec& ls);

// Vertex ids are "L<j>.v1", "L<j>.v2" with j counted from 1. Connector edges
// run upward. Unless self_check is false the result is tested for the
// composite-variable structure with as many components as layers.
PeriodicGraph stack(const StackSpec& ss, bool self_check = true);

Type2Spec to_type2(const StackSpec& ss);

// Precomputed view of a stack used by the curve pipelines.
class StackModel {
 public:
  explicit StackModel(StackSpec ss);

  const StackSpec& spec() const { return spec_; }
  const PeriodicGraph& graph() const { return graph_; }
  std::size_t components() const { return spec_.n(); }
  bool type2() const { return type2_.has_value(); }
  // Layer edges of the first layer share one s-function, so s0^2 zeta = G.
  bool uniform_s() const { return uniform_s_; }

  // mu_i(lambda) sorted by (re, im). Throws PoleAtLambda.
  std::vector<Complex> mu(double lambda, bool check_poles = true) const;
  // zeta(z, lambda) = w(z) w(1/z) of the first layer.
  LaurentPoly zeta(double lambda) const;
  // Range of s0^2 zeta over the torus: [0, 9] when uniform_s().
  Interval mu_range(double lambda) const;
  double s0(double lambda) const;

 private:
  StackSpec spec_;
  PeriodicGraph graph_;
  std::optional<Type2Spec> type2_;
  Type2Layer base_;
  bool uniform_s_ = false;
};

struct Crossing {
  double lambda;
  int a, b;
};

struct MuCurves {
  std::vector<double> lambda;
  std::vector<std::vector<Complex>> mu;  // [sample][component], continued
  std::vector<double> skipped_poles;
  std::vector<Crossing> crossings;
  std::vector<std::string> warnings;
};

MuCurves mu_curves(const StackModel& m, Interval window, double lambda_step);

struct BandsResult {
  std::vector<BandInterval> bands;  // tagged by component
  std::vector<double> skipped_poles;
  std::vector<std::string> warnings;
};

BandsResult bands(const StackModel& m, Interval window, double lambda_step, double edge_tol = 1e-8);

enum class ConeClass { Cone, Transversal, Degenerate };
const char* cone_class_name(ConeClass c);

struct ConeTolerances {
  double scale = 9.0;  // typical size of mu: the range of G~
  double slope = 1e-4;
  double curvature = 1e-6;
  double fd_step = 1e-4;
  double zero = 1e-8;
};

struct ConeReport {
  int component = 0;
  double lambda_star = 0.0;
  ConeClass classification = ConeClass::Degenerate;
  double mu_prime = 0.0;
  double mu_second = 0.0;
};

ConeClass classify_zero(double mu_prime, double mu_second, const ConeTolerances& tol = {});
std::vector<ConeReport> cone_scan(const StackModel& m, Interval window, double lambda_step,
                                  const ConeTolerances& tol = {});

struct SurfacePoint {
  double k1, k2, lambda;
  int component;
};

// Solves mu_i(lambda) = G~(k1, k2) on a uniform k_grid x k_grid grid over
// [-pi, pi]^2 (endpoints included).
std::vector<SurfacePoint> dispersion_surface(const StackModel& m, Interval window, int k_grid,
                                             double lambda_step = 0.01);

double gtilde(double k1, double k2);

struct GtildeExtrema {
  double min, max;
  std::array<double, 2> argmin_grid, argmax_grid;  // best grid points
  std::array<double, 2> argmin, argmax;            // after Newton polish
};

// Grid k = -pi + 2 pi i / n, i = 0..n-1, then Newton polish of the extrema.
GtildeExtrema gtilde_extrema(int n);

}  // namespace qg
