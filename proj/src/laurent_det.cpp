#include "qgraph/laurent.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qg {

namespace {

struct Grid {
  int nvars = 0;
  Exponent lo{};
  std::array<int, kMaxVars> n{};
  std::size_t total = 1;

  std::array<int, kMaxVars> index(std::size_t flat) const {
    std::array<int, kMaxVars> k{};
    for (int j = nvars - 1; j >= 0; --j) {
      k[j] = static_cast<int>(flat % n[j]);
      flat /= n[j];
    }
    return k;
  }
};

// Samples the determinant at r * roots of unity and returns the coefficient
// grid b[e - lo] together with the Hadamard-bound ratio of the samples.
struct Sampled {
  std::vector<Complex> coeffs;
  double cond = 1.0;
};

Sampled sample_and_invert(const LaurentMatrix& m, const Grid& g, double radius) {
  const std::size_t n = m.size();
  std::vector<Complex> values(g.total);
  std::vector<Complex> z(g.nvars);
  Eigen::MatrixXcd num(n, n);
  double hadamard = 0.0, vmax = 0.0;
  for (std::size_t flat = 0; flat < g.total; ++flat) {
    const auto k = g.index(flat);
    for (int j = 0; j < g.nvars; ++j)
      z[j] = std::polar(radius, 2.0 * std::numbers::pi * k[j] / g.n[j]);
    double rowprod = 1.0;
    for (std::size_t r = 0; r < n; ++r) {
      double rn = 0.0;
      for (std::size_t c = 0; c < n; ++c) {
        num(r, c) = m(r, c).eval(z);
        rn += std::norm(num(r, c));
      }
      rowprod *= std::sqrt(rn);
    }
    Complex det = n == 0 ? Complex{1.0} : num.partialPivLu().determinant();
    // shift exponents to start at zero
    Complex zlo = 1.0;
    for (int j = 0; j < g.nvars; ++j) zlo *= std::pow(z[j], g.lo[j]);
    values[flat] = det / zlo;
    hadamard = std::max(hadamard, rowprod);
    vmax = std::max(vmax, std::abs(det));
  }

  // separable inverse DFT
  std::vector<Complex> buf = values;
  std::size_t stride = 1;
  for (int j = g.nvars - 1; j >= 0; --j) {
    const int nj = g.n[j];
    std::vector<Complex> out(g.total);
    std::vector<Complex> tw(nj);
    for (int t = 0; t < nj; ++t) tw[t] = std::polar(1.0, -2.0 * std::numbers::pi * t / nj);
    for (std::size_t flat = 0; flat < g.total; ++flat) {
      const int kj = static_cast<int>((flat / stride) % nj);
      const std::size_t base = flat - static_cast<std::size_t>(kj) * stride;
      Complex acc{};
      for (int t = 0; t < nj; ++t) acc += buf[base + t * stride] * tw[(static_cast<long>(t) * kj) % nj];
      out[flat] = acc / static_cast<double>(nj);
    }
    buf.swap(out);
    stride *= nj;
  }

  Sampled s;
  s.coeffs = std::move(buf);
  s.cond = vmax > 0.0 ? hadamard / vmax : 1.0;
  return s;
}

}  // namespace

LaurentPoly lp_det(const LaurentMatrix& m) {
  const int nv = m.nvars();
  const std::size_t n = m.size();
  if (n == 0) return LaurentPoly::constant(nv, 1.0);

  Grid g;
  g.nvars = nv;
  std::array<int, kMaxVars> hi{};
  for (std::size_t r = 0; r < n; ++r) {
    bool any = false;
    Exponent rlo{}, rhi{};
    for (std::size_t c = 0; c < n; ++c) {
      const auto& p = m(r, c);
      if (p.is_zero()) continue;
      const auto plo = p.min_exponent(), phi = p.max_exponent();
      for (int j = 0; j < nv; ++j) {
        rlo[j] = any ? std::min(rlo[j], plo[j]) : plo[j];
        rhi[j] = any ? std::max(rhi[j], phi[j]) : phi[j];
      }
      any = true;
    }
    if (!any) return LaurentPoly(nv);
    for (int j = 0; j < nv; ++j) {
      g.lo[j] += rlo[j];
      hi[j] += rhi[j];
    }
  }
  for (int j = 0; j < nv; ++j) {
    g.n[j] = hi[j] - g.lo[j] + 1;
    g.total *= static_cast<std::size_t>(g.n[j]);
  }

  double radius = 1.0;
  Sampled s = sample_and_invert(m, g, radius);
  if (s.cond > 1e8) {
    Sampled alt = sample_and_invert(m, g, 1.07);
    if (alt.cond < s.cond) {
      s = std::move(alt);
      radius = 1.07;
    }
  }

  LaurentPoly out(nv);
  for (std::size_t flat = 0; flat < g.total; ++flat) {
    const auto k = g.index(flat);
    Exponent e{};
    int deg = 0;
    for (int j = 0; j < nv; ++j) {
      e[j] = g.lo[j] + k[j];
      deg += k[j];
    }
    out.add_term(e, s.coeffs[flat] / std::pow(radius, deg));
  }
  return out.prune();
}

}  // namespace qg
