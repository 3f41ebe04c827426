#pragma once

// Inner loops of torus-grid sweeps. Each kernel has a scalar reference and,
// on x86-64, an AVX2/FMA variant picked at runtime. Setting the environment
// variable QGRAPH_FORCE_SCALAR pins the scalar path.

#include <cstddef>

namespace qg::kernels {

enum class Isa { Scalar, Avx2 };

struct MinMax {
  double min;
  double max;
};

// acc[j] += re * cos_tab[j] - im * sin_tab[j]
// (the real part of (re + i im) * exp(i theta_j)).
using AccumulateFn = void (*)(double* acc, const double* cos_tab, const double* sin_tab, std::size_t n, double re,
                              double im);
// out[j] = 3 + 2 cos k1 + 2 cos k2_j + 2 cos(k1 - k2_j)
using GtildeRowFn = void (*)(double* out, const double* cos_k2, const double* sin_k2, std::size_t n, double cos_k1,
                             double sin_k1);
// n must be positive.
using MinMaxFn = MinMax (*)(const double* x, std::size_t n);

struct KernelTable {
  AccumulateFn accumulate;
  GtildeRowFn gtilde_row;
  MinMaxFn minmax;
};

namespace scalar {
void accumulate(double* acc, const double* cos_tab, const double* sin_tab, std::size_t n, double re, double im);
void gtilde_row(double* out, const double* cos_k2, const double* sin_k2, std::size_t n, double cos_k1, double sin_k1);
MinMax minmax(const double* x, std::size_t n);
}  // namespace scalar

bool isa_compiled(Isa isa);
bool isa_supported(Isa isa);  // compiled in and reported by the CPU
const char* isa_name(Isa isa);

Isa active_isa();
// Throws std::invalid_argument if the ISA is not supported here.
void set_kernel_isa(Isa isa);
const KernelTable& table_for(Isa isa);

void accumulate(double* acc, const double* cos_tab, const double* sin_tab, std::size_t n, double re, double im);
void gtilde_row(double* out, const double* cos_k2, const double* sin_k2, std::size_t n, double cos_k1, double sin_k1);
MinMax minmax(const double* x, std::size_t n);

}  // namespace qg::kernels
