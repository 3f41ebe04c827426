#include "qgraph/kernels.hpp"

#include <algorithm>

namespace qg::kernels::scalar {

void accumulate(double* acc, const double* cos_tab, const double* sin_tab, std::size_t n, double re, double im) {
  for (std::size_t j = 0; j < n; ++j) acc[j] += re * cos_tab[j] - im * sin_tab[j];
}

void gtilde_row(double* out, const double* cos_k2, const double* sin_k2, std::size_t n, double cos_k1, double sin_k1) {
  const double base = 3.0 + 2.0 * cos_k1;
  for (std::size_t j = 0; j < n; ++j)
    out[j] = base + 2.0 * cos_k2[j] + 2.0 * (cos_k1 * cos_k2[j] + sin_k1 * sin_k2[j]);
}

MinMax minmax(const double* x, std::size_t n) {
  MinMax r{x[0], x[0]};
  for (std::size_t j = 1; j < n; ++j) {
    r.min = std::min(r.min, x[j]);
    r.max = std::max(r.max, x[j]);
  }
  return r;
}

}  // namespace qg::kernels::scalar
