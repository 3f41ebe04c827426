#include "qgraph/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace qg::kernels {

#if defined(QGRAPH_BUILD_AVX2)
namespace avx2 {
void accumulate(double* acc, const double* cos_tab, const double* sin_tab, std::size_t n, double re, double im);
void gtilde_row(double* out, const double* cos_k2, const double* sin_k2, std::size_t n, double cos_k1, double sin_k1);
MinMax minmax(const double* x, std::size_t n);
}  // namespace avx2
#endif

namespace {

constexpr KernelTable kScalar{scalar::accumulate, scalar::gtilde_row, scalar::minmax};
#if defined(QGRAPH_BUILD_AVX2)
constexpr KernelTable kAvx2{avx2::accumulate, avx2::gtilde_row, avx2::minmax};
#endif

bool cpu_has_avx2() {
#if defined(QGRAPH_BUILD_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa pick_default() {
  const char* force = std::getenv("QGRAPH_FORCE_SCALAR");
  if (force && *force && std::string(force) != "0") return Isa::Scalar;
  return isa_supported(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> t{&table_for(pick_default())};
  return t;
}

}  // namespace

bool isa_compiled(Isa isa) {
  if (isa == Isa::Scalar) return true;
#if defined(QGRAPH_BUILD_AVX2)
  return true;
#else
  return false;
#endif
}

bool isa_supported(Isa isa) {
  if (isa == Isa::Scalar) return true;
  static const bool avx2 = cpu_has_avx2();
  return isa_compiled(isa) && avx2;
}

const char* isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

const KernelTable& table_for(Isa isa) {
#if defined(QGRAPH_BUILD_AVX2)
  if (isa == Isa::Avx2) return kAvx2;
#endif
  if (isa != Isa::Scalar) throw std::invalid_argument(std::string("kernel ISA not compiled: ") + isa_name(isa));
  return kScalar;
}

Isa active_isa() { return current().load() == &kScalar ? Isa::Scalar : Isa::Avx2; }

void set_kernel_isa(Isa isa) {
  if (!isa_supported(isa)) throw std::invalid_argument(std::string("kernel ISA not supported: ") + isa_name(isa));
  current().store(&table_for(isa));
}

void accumulate(double* acc, const double* cos_tab, const double* sin_tab, std::size_t n, double re, double im) {
  current().load(std::memory_order_relaxed)->accumulate(acc, cos_tab, sin_tab, n, re, im);
}

void gtilde_row(double* out, const double* cos_k2, const double* sin_k2, std::size_t n, double cos_k1, double sin_k1) {
  current().load(std::memory_order_relaxed)->gtilde_row(out, cos_k2, sin_k2, n, cos_k1, sin_k1);
}

MinMax minmax(const double* x, std::size_t n) { return current().load(std::memory_order_relaxed)->minmax(x, n); }

}  // namespace qg::kernels
