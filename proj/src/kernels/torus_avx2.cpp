// Built with -mavx2 -mfma; only reached through the dispatcher after a CPU check.
#include "qgraph/kernels.hpp"

#include <immintrin.h>

#include <algorithm>

namespace qg::kernels::avx2 {

void accumulate(double* acc, const double* cos_tab, const double* sin_tab, std::size_t n, double re, double im) {
  const __m256d vre = _mm256_set1_pd(re);
  const __m256d vim = _mm256_set1_pd(im);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    __m256d a = _mm256_loadu_pd(acc + j);
    a = _mm256_fmadd_pd(vre, _mm256_loadu_pd(cos_tab + j), a);
    a = _mm256_fnmadd_pd(vim, _mm256_loadu_pd(sin_tab + j), a);
    _mm256_storeu_pd(acc + j, a);
  }
  for (; j < n; ++j) acc[j] += re * cos_tab[j] - im * sin_tab[j];
}

void gtilde_row(double* out, const double* cos_k2, const double* sin_k2, std::size_t n, double cos_k1, double sin_k1) {
  const double base = 3.0 + 2.0 * cos_k1;
  const __m256d vbase = _mm256_set1_pd(base);
  const __m256d vc = _mm256_set1_pd(2.0 + 2.0 * cos_k1);  // coefficient of cos k2
  const __m256d vs = _mm256_set1_pd(2.0 * sin_k1);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    __m256d v = _mm256_fmadd_pd(vc, _mm256_loadu_pd(cos_k2 + j), vbase);
    v = _mm256_fmadd_pd(vs, _mm256_loadu_pd(sin_k2 + j), v);
    _mm256_storeu_pd(out + j, v);
  }
  for (; j < n; ++j) out[j] = base + 2.0 * cos_k2[j] + 2.0 * (cos_k1 * cos_k2[j] + sin_k1 * sin_k2[j]);
}

MinMax minmax(const double* x, std::size_t n) {
  MinMax r{x[0], x[0]};
  std::size_t j = 0;
  if (n >= 4) {
    __m256d lo = _mm256_loadu_pd(x);
    __m256d hi = lo;
    for (j = 4; j + 4 <= n; j += 4) {
      const __m256d v = _mm256_loadu_pd(x + j);
      lo = _mm256_min_pd(lo, v);
      hi = _mm256_max_pd(hi, v);
    }
    alignas(32) double l[4], h[4];
    _mm256_store_pd(l, lo);
    _mm256_store_pd(h, hi);
    r.min = std::min(std::min(l[0], l[1]), std::min(l[2], l[3]));
    r.max = std::max(std::max(h[0], h[1]), std::max(h[2], h[3]));
  }
  for (; j < n; ++j) {
    r.min = std::min(r.min, x[j]);
    r.max = std::max(r.max, x[j]);
  }
  return r;
}

}  // namespace qg::kernels::avx2
