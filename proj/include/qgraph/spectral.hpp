#pragma once

// Spectral matrix, dispersion function and torus-based spectrum scans.

#include "qgraph/graph.hpp"
#include "qgraph/laurent.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace qg {

struct SpectralMatrix {
  LaurentMatrix entries;  // rows/cols: non-Dirichlet vertices in graph order
  double lambda = 0.0;
  std::vector<std::size_t> rows;  // graph vertex index of each row
  // s(lambda) of every edge whose two ends are both Dirichlet.
  std::vector<double> extra_s_factors;
  std::vector<std::size_t> severed_edges;
  // Edges with |s| under the pole tolerance (only populated when pole
  // checking is disabled; otherwise they raise PoleAtLambda).
  std::vector<std::size_t> pole_flags;
};

struct AssemblyOptions {
  // When false, near-pole edges are flagged instead of rejected; only an
  // exactly vanishing s is fatal. Used for bisection close to removable poles.
  bool check_poles = true;
};

SpectralMatrix spectral_matrix(const PeriodicGraph& g, double lambda, const AssemblyOptions& opts = {});

struct DispersionOptions {
  // Multiply by the s-values of doubly-Dirichlet edges. Off by default: the
  // join and pole-moving identities hold for the bare determinant.
  bool include_severed_factors = false;
  AssemblyOptions assembly{};
};

LaurentPoly dispersion(const PeriodicGraph& g, double lambda, const DispersionOptions& opts = {});

// Numeric determinant of the evaluated spectral matrix.
Complex dispersion_at(const PeriodicGraph& g, double lambda, std::span<const Complex> z,
                      const DispersionOptions& opts = {});

// Evaluated spectral matrix as a dense complex matrix.
std::vector<std::vector<Complex>> spectral_matrix_at(const PeriodicGraph& g, double lambda,
                                                     std::span<const Complex> z, const AssemblyOptions& opts = {});

// Range of the real part of D(e^{ik}) over the torus: grid min/max polished by
// Newton steps in k. grid is the number of samples per torus direction.
struct TorusRange {
  double min = 0.0;
  double max = 0.0;
  double scale = 0.0;  // sum of coefficient moduli, bounds |D| on the torus
  std::vector<double> argmin;
  std::vector<double> argmax;
  double max_imag = 0.0;  // largest |Im D| seen on the grid
};

TorusRange torus_range(const LaurentPoly& d, int grid);

// Whether 0 lies in the torus range, with a tolerance relative to the scale.
bool torus_contains_zero(const TorusRange& r);

struct BandInterval {
  int component = 0;
  double lo = 0.0;
  double hi = 0.0;
};

enum class SampleState { Out, In, Pole };

// Turns per-sample membership into intervals. Pole samples are transparent
// inside a run. Edges are bisected with `probe`, which is evaluated without
// pole checks; a probe that still reports a pole ends the bisection there.
std::vector<BandInterval> merge_bands(const std::vector<double>& lambdas, const std::vector<SampleState>& states,
                                      const std::function<SampleState(double)>& probe, Interval window,
                                      double edge_tol, int component);

// Union of intervals; pieces closer than gap_tol are fused. Component ids
// are reset to 0.
std::vector<BandInterval> union_bands(std::vector<BandInterval> bands, double gap_tol = 0.0);

// Uniform grid lo, lo + step, ..., always ending at hi.
std::vector<double> lambda_grid(Interval window, double step);

struct ScanOptions {
  double edge_tol = 1e-8;
};

struct SpectrumScan {
  std::vector<BandInterval> bands;
  std::vector<double> skipped_poles;  // grid samples dropped as poles
  std::vector<std::string> warnings;
};

// pre: torus_grid >= 8, lambda_step > 0.
SpectrumScan spectrum_scan(const PeriodicGraph& g, Interval window, double lambda_step, int torus_grid,
                           const ScanOptions& opts = {});

}  // namespace qg
