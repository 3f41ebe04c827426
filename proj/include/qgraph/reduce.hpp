#pragma once

// Reducibility tools: the single-vertex join calculus, structure in a
// composite Floquet variable, the stacking-by-edges characteristic matrix,
// pole moving by subdivision, and the two irreducible fixtures.

#include "qgraph/factor_probe.hpp"
#include "qgraph/graph.hpp"
#include "qgraph/laurent.hpp"

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace qg {

struct JoinCheck {
  LaurentPoly formula;  // combination of the four part dispersions
  LaurentPoly direct;   // dispersion of the joined graph
  double rel_err = 0.0;
};

// Throws JoinIdentityViolation when the two paths disagree beyond tol.
JoinCheck join_dispersion(const PeriodicGraph& g1, const std::string& v1, const PeriodicGraph& g2,
                          const std::string& v2, double lambda, std::optional<double> alpha_override = {},
                          double tol = 1e-8);

struct RootCluster {
  Complex value;
  int multiplicity = 1;
};

struct ZetaStructure {
  LaurentPoly zeta;
  std::vector<Complex> coeffs;  // a_0 .. a_degree
  int degree = 0;
  std::vector<Complex> roots;  // with multiplicity, sorted by (re, im)
  // Re(root) is a root of some polynomial within the coefficient noise of
  // the fit; clustered real roots split into complex pairs otherwise
  std::vector<char> real_within_noise;
  std::vector<RootCluster> clusters;
  double residual = 0.0;
};

// Throws StructureNotFound when D is not a polynomial in zeta up to max_deg.
ZetaStructure zeta_components(const LaurentPoly& d, const LaurentPoly& zeta, int max_deg);

// Complex roots of a_0 + a_1 x + ... + a_n x^n through the companion matrix.
std::vector<Complex> poly_roots(const std::vector<Complex>& coeffs);

// n AA-stacked layers of a two-vertex bipartite lattice coupled by chains of
// single edges: connector1[j] runs from vertex 1 of layer j to vertex 1 of
// layer j+1, connector2[j] likewise for vertex 2.
struct Type2Layer {
  std::vector<Potential> edges;  // the layer edges, all oriented v1 -> v2
  std::vector<std::vector<int>> shifts;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
};

struct Type2Spec {
  std::vector<Type2Layer> layers;
  std::vector<Potential> connector1;
  std::vector<Potential> connector2;

  std::size_t n() const { return layers.size(); }
};

// Throws IsospectralityViolation(layer, edge) when Dirichlet spectra of
// corresponding layer edges differ by more than tol on the window.
void check_isospectral_layers(const std::vector<std::vector<Potential>>& layer_edges, Interval window,
                              double tol = 1e-7);

struct Type2Characteristic {
  Eigen::MatrixXd b1;     // B~_1
  Eigen::MatrixXd b2;     // B~_2
  Eigen::MatrixXd delta;  // s_0^2 B~_1 B~_2
  std::vector<Complex> mu;  // sorted by (re, im)
  double s0 = 0.0;
  std::vector<std::string> warnings;
};

// With check_poles false only an exactly vanishing s is rejected.
Type2Characteristic type2_characteristic(const Type2Spec& spec, double lambda, bool check_poles = true);

// w(z) = sum_i z^{g_i} / s_i of a layer at lambda, as a Laurent polynomial.
LaurentPoly layer_w(const Type2Layer& layer, int d, double lambda);

struct PoleMoveSample {
  std::vector<Complex> z;
  double lambda = 0.0;
};

struct PoleMoveReport {
  int sign = 0;
  double max_rel_err = 0.0;
  std::size_t samples = 0;
  std::vector<double> errors;
  bool holds(double tol = 1e-8) const { return sign != 0 && max_rel_err <= tol; }
  // {"identity", "samples", "max_rel_err", "sign"}
  std::string to_json() const;
};

// Checks s1 s2 D_dot = sign * s D with one sign for all samples. Throws
// SampleAtPole when a sample hits a Dirichlet value of e, e1, e2 or of
// another edge.
PoleMoveReport verify_pole_move(const PeriodicGraph& g, std::size_t e, double t,
                                const std::vector<PoleMoveSample>& samples);

enum class Section6 { Tripartite, CrossedBilayer };

struct Section6Coeffs {
  double c = 1, s = 1, sp = 1;
  double c1 = 1, s1 = 1, sp1 = 1;
  double c2 = 2, s2 = 1, sp2 = 1;
};

LaurentMatrix build_section6_example(Section6 which, const Section6Coeffs& k = {});

struct IrreducibilityReport {
  FactorVerdict verdict;
  // z1-span of D(z1, t) at random t compared with the z1-span of D
  std::vector<std::pair<Complex, int>> specializations;
  bool specializations_consistent = true;
  std::string summary() const;
};

IrreducibilityReport irreducibility_probe(const LaurentPoly& d, std::uint64_t seed = 7,
                                          const ProbeOptions& opts = {});

}  // namespace qg
