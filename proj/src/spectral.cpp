#include "qgraph/spectral.hpp"

#include "qgraph/errors.hpp"
#include "qgraph/kernels.hpp"
#include "qgraph/parallel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

namespace qg {

namespace {

struct Contribution {
  std::size_t row, col;
  Complex coeff;
  const std::vector<int>* shift;  // nullptr for a constant term
  int sign;                       // +1 for z^g, -1 for z^-g
};

struct Assembled {
  std::vector<long> row_of;  // -1 for Dirichlet vertices
  std::vector<std::size_t> rows;
  std::vector<double> extra_s;
  std::vector<std::size_t> severed;
  std::vector<std::size_t> flagged;
};

// Walks the edges and hands every matrix contribution to `add`.
Assembled assemble(const PeriodicGraph& g, double lambda, const AssemblyOptions& opts,
                   const std::function<void(const Contribution&)>& add) {
  Assembled a;
  a.row_of.assign(g.vertices().size(), -1);
  for (std::size_t i = 0; i < g.vertices().size(); ++i)
    if (!g.vertices()[i].condition.dirichlet) {
      a.row_of[i] = static_cast<long>(a.rows.size());
      a.rows.push_back(i);
    }

  std::vector<std::size_t> poles;
  std::vector<EdgeSpectralData> data(g.edges().size());
  for (std::size_t e = 0; e < g.edges().size(); ++e) {
    const auto& ed = g.edges()[e];
    data[e] = transfer_matrix(ed.potential, lambda);
    const bool td = g.vertex(ed.tail).condition.dirichlet;
    const bool hd = g.vertex(ed.head).condition.dirichlet;
    if (td && hd) continue;
    if (data[e].s == 0.0 || (opts.check_poles && is_pole(data[e]))) {
      poles.push_back(e);
    } else if (is_pole(data[e])) {
      a.flagged.push_back(e);
    }
  }
  if (!poles.empty()) throw PoleAtLambda(lambda, poles);

  for (std::size_t e = 0; e < g.edges().size(); ++e) {
    const auto& ed = g.edges()[e];
    const auto& t = data[e];
    const long rv = a.row_of[g.vertex_index(ed.tail)];
    const long rw = a.row_of[g.vertex_index(ed.head)];
    if (rv < 0 && rw < 0) {
      a.extra_s.push_back(t.s);
      a.severed.push_back(e);
      continue;
    }
    const double inv = 1.0 / t.s;
    if (rv >= 0 && rw >= 0) {
      const auto v = static_cast<std::size_t>(rv), w = static_cast<std::size_t>(rw);
      if (v == w) {
        add({v, v, inv, &ed.shift, +1});
        add({v, v, inv, &ed.shift, -1});
        add({v, v, -(t.c + t.sp) * inv, nullptr, 0});
      } else {
        add({v, v, -t.c * inv, nullptr, 0});
        add({w, w, -t.sp * inv, nullptr, 0});
        add({v, w, inv, &ed.shift, +1});
        add({w, v, inv, &ed.shift, -1});
      }
    } else if (rv >= 0) {
      add({static_cast<std::size_t>(rv), static_cast<std::size_t>(rv), -t.c * inv, nullptr, 0});
    } else {
      add({static_cast<std::size_t>(rw), static_cast<std::size_t>(rw), -t.sp * inv, nullptr, 0});
    }
  }
  for (std::size_t r = 0; r < a.rows.size(); ++r)
    add({r, r, -g.vertices()[a.rows[r]].condition.alpha, nullptr, 0});
  return a;
}

void check_point(const PeriodicGraph& g, std::span<const Complex> z) {
  if (static_cast<int>(z.size()) != g.dim())
    throw DimensionMismatch("evaluation point has " + std::to_string(z.size()) + " coordinates, graph has d=" +
                            std::to_string(g.dim()));
  for (auto zi : z)
    if (zi == Complex{}) throw ZeroEvaluationPoint("Floquet multiplier must be nonzero");
}

Complex zpow(std::span<const Complex> z, const std::vector<int>& shift, int sign) {
  Complex r = 1.0;
  for (std::size_t j = 0; j < shift.size(); ++j) {
    const int k = sign * shift[j];
    if (k != 0) r *= std::pow(z[j], k);
  }
  return r;
}

}  // namespace

SpectralMatrix spectral_matrix(const PeriodicGraph& g, double lambda, const AssemblyOptions& opts) {
  SpectralMatrix sm;
  sm.lambda = lambda;
  const int d = g.dim();
  sm.entries = LaurentMatrix(g.robin_count(), d);
  auto a = assemble(g, lambda, opts, [&](const Contribution& c) {
    Exponent e{};
    if (c.shift)
      for (int j = 0; j < d; ++j) e[j] = c.sign * (*c.shift)[j];
    sm.entries(c.row, c.col).add_term(e, c.coeff);
  });
  for (std::size_t i = 0; i < sm.entries.size(); ++i)
    for (std::size_t j = 0; j < sm.entries.size(); ++j) sm.entries(i, j).prune();
  sm.rows = std::move(a.rows);
  sm.extra_s_factors = std::move(a.extra_s);
  sm.severed_edges = std::move(a.severed);
  sm.pole_flags = std::move(a.flagged);
  return sm;
}

LaurentPoly dispersion(const PeriodicGraph& g, double lambda, const DispersionOptions& opts) {
  const SpectralMatrix sm = spectral_matrix(g, lambda, opts.assembly);
  LaurentPoly d = lp_det(sm.entries);
  if (opts.include_severed_factors)
    for (double s : sm.extra_s_factors) d *= s;
  return d;
}

std::vector<std::vector<Complex>> spectral_matrix_at(const PeriodicGraph& g, double lambda,
                                                     std::span<const Complex> z, const AssemblyOptions& opts) {
  check_point(g, z);
  const std::size_t n = g.robin_count();
  std::vector<std::vector<Complex>> m(n, std::vector<Complex>(n));
  assemble(g, lambda, opts, [&](const Contribution& c) {
    m[c.row][c.col] += c.shift ? c.coeff * zpow(z, *c.shift, c.sign) : c.coeff;
  });
  return m;
}

Complex dispersion_at(const PeriodicGraph& g, double lambda, std::span<const Complex> z,
                      const DispersionOptions& opts) {
  check_point(g, z);
  const std::size_t n = g.robin_count();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  auto a = assemble(g, lambda, opts.assembly, [&](const Contribution& c) {
    m(static_cast<Eigen::Index>(c.row), static_cast<Eigen::Index>(c.col)) +=
        c.shift ? c.coeff * zpow(z, *c.shift, c.sign) : c.coeff;
  });
  Complex det = n == 0 ? Complex{1.0} : m.partialPivLu().determinant();
  if (opts.include_severed_factors)
    for (double s : a.extra_s) det *= s;
  return det;
}

namespace {

struct TermList {
  int nvars = 0;
  std::vector<std::array<double, kMaxVars>> a;
  std::vector<Complex> c;
};

TermList term_list(const LaurentPoly& d) {
  TermList t;
  t.nvars = d.nvars();
  for (const auto& [e, c] : d.terms()) {
    std::array<double, kMaxVars> a{};
    for (int j = 0; j < t.nvars; ++j) a[j] = e[j];
    t.a.push_back(a);
    t.c.push_back(c);
  }
  return t;
}

// Real part of D(e^{ik}) with gradient and Hessian in k.
double eval_real(const TermList& t, const Eigen::VectorXd& k, Eigen::VectorXd* grad, Eigen::MatrixXd* hess) {
  const int n = t.nvars;
  double f = 0.0;
  if (grad) grad->setZero(n);
  if (hess) hess->setZero(n, n);
  for (std::size_t i = 0; i < t.c.size(); ++i) {
    double th = 0.0;
    for (int j = 0; j < n; ++j) th += t.a[i][j] * k[j];
    const Complex v = t.c[i] * std::polar(1.0, th);
    f += v.real();
    if (grad)
      for (int j = 0; j < n; ++j) (*grad)[j] -= t.a[i][j] * v.imag();
    if (hess)
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) (*hess)(j, l) -= t.a[i][j] * t.a[i][l] * v.real();
  }
  return f;
}

// Newton polish toward a local minimum (dir = +1) or maximum (dir = -1).
double polish(const TermList& t, Eigen::VectorXd& k, double dir) {
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
  double f = dir * eval_real(t, k, &grad, &hess);
  for (int it = 0; it < 40; ++it) {
    grad *= dir;
    hess *= dir;
    if (grad.norm() < 1e-15 * (1.0 + std::abs(f))) break;
    Eigen::VectorXd step;
    Eigen::LLT<Eigen::MatrixXd> llt(hess);
    if (llt.info() == Eigen::Success)
      step = -llt.solve(grad);
    else
      step = -grad / std::max(1.0, hess.norm());
    bool improved = false;
    for (int ls = 0; ls < 30; ++ls, step *= 0.5) {
      Eigen::VectorXd kn = k + step;
      Eigen::VectorXd gn;
      Eigen::MatrixXd hn;
      const double fn = dir * eval_real(t, kn, &gn, &hn);
      if (fn < f) {
        k = kn;
        f = fn;
        grad = gn;
        hess = hn;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  return dir * f;
}

}  // namespace

TorusRange torus_range(const LaurentPoly& d, int grid) {
  TorusRange r;
  for (const auto& [e, c] : d.terms()) r.scale += std::abs(c);
  const int nv = d.nvars();
  if (nv == 0 || d.is_zero()) {
    r.min = r.max = d.coeff(Exponent{}).real();
    r.max_imag = std::abs(d.coeff(Exponent{}).imag());
    return r;
  }
  if (grid < 1) throw DimensionMismatch("torus grid must be positive");

  const double h = 2.0 * std::numbers::pi / grid;
  // several starts for the polish: a sign change confined to a thin ring
  // between grid points is only reached from the neighbouring samples
  constexpr std::size_t kStarts = 8;
  using Cand = std::pair<double, std::vector<int>>;
  std::vector<Cand> low, high;  // heaps: worst candidate on top
  auto offer = [&](double v, auto&& idx) {
    auto keep = [&](std::vector<Cand>& heap, double key) {
      if (heap.size() < kStarts || key < heap.front().first) {
        heap.emplace_back(key, idx());
        std::push_heap(heap.begin(), heap.end(), [](const Cand& a, const Cand& b) { return a.first < b.first; });
        if (heap.size() > kStarts) {
          std::pop_heap(heap.begin(), heap.end(), [](const Cand& a, const Cand& b) { return a.first < b.first; });
          heap.pop_back();
        }
      }
    };
    keep(low, v);
    keep(high, -v);
  };
  r.min = std::numeric_limits<double>::infinity();
  r.max = -r.min;

  if (nv <= 2) {
    // rows over k1 (only one row for d = 1), vector lanes over k2
    const int bvar = nv - 1;
    const int blo = d.min_exponent()[bvar], bhi = d.max_exponent()[bvar];
    const std::size_t n = static_cast<std::size_t>(grid);
    std::vector<std::vector<double>> ctab(bhi - blo + 1, std::vector<double>(n)), stab = ctab;
    for (int b = blo; b <= bhi; ++b)
      for (std::size_t j = 0; j < n; ++j) {
        ctab[b - blo][j] = std::cos(b * h * static_cast<double>(j));
        stab[b - blo][j] = std::sin(b * h * static_cast<double>(j));
      }
    std::vector<double> re(n), im(n);
    std::vector<Complex> cb(bhi - blo + 1);
    const int nrows = nv == 2 ? grid : 1;
    for (int i = 0; i < nrows; ++i) {
      std::fill(cb.begin(), cb.end(), Complex{});
      for (const auto& [e, c] : d.terms())
        cb[e[bvar] - blo] += nv == 2 ? c * std::polar(1.0, e[0] * h * i) : c;
      std::fill(re.begin(), re.end(), 0.0);
      std::fill(im.begin(), im.end(), 0.0);
      for (std::size_t b = 0; b < cb.size(); ++b) {
        if (cb[b] == Complex{}) continue;
        kernels::accumulate(re.data(), ctab[b].data(), stab[b].data(), n, cb[b].real(), cb[b].imag());
        kernels::accumulate(im.data(), ctab[b].data(), stab[b].data(), n, cb[b].imag(), -cb[b].real());
      }
      const auto mm = kernels::minmax(re.data(), n);
      const auto mi = kernels::minmax(im.data(), n);
      r.max_imag = std::max({r.max_imag, std::abs(mi.min), std::abs(mi.max)});
      r.min = std::min(r.min, mm.min);
      r.max = std::max(r.max, mm.max);
      for (std::size_t j = 0; j < n; ++j)
        offer(re[j], [&] { return nv == 2 ? std::vector<int>{i, static_cast<int>(j)} : std::vector<int>{static_cast<int>(j)}; });
    }
  } else {
    std::size_t total = 1;
    for (int j = 0; j < nv; ++j) total *= static_cast<std::size_t>(grid);
    if (total > 20'000'000) throw DimensionMismatch("torus grid too large for d=" + std::to_string(nv));
    std::vector<Complex> z(nv);
    std::vector<int> idx(nv, 0);
    for (std::size_t flat = 0; flat < total; ++flat) {
      std::size_t rem = flat;
      for (int j = nv - 1; j >= 0; --j) {
        idx[j] = static_cast<int>(rem % grid);
        rem /= grid;
        z[j] = std::polar(1.0, h * idx[j]);
      }
      const Complex v = d.eval(z);
      r.max_imag = std::max(r.max_imag, std::abs(v.imag()));
      r.min = std::min(r.min, v.real());
      r.max = std::max(r.max, v.real());
      offer(v.real(), [&] { return idx; });
    }
  }

  const TermList t = term_list(d);
  auto run = [&](std::vector<Cand>& starts, double dir, double& best, std::vector<double>& arg) {
    std::sort(starts.begin(), starts.end(), [](const Cand& a, const Cand& b) { return a.first < b.first; });
    for (const auto& [key, idx] : starts) {
      Eigen::VectorXd k(nv);
      for (int j = 0; j < nv; ++j) k[j] = h * idx[j];
      const double v = polish(t, k, dir);
      if (arg.empty() || dir * v < dir * best) {
        best = dir > 0 ? std::min(best, v) : std::max(best, v);
        arg.assign(k.data(), k.data() + nv);
      }
    }
  };
  run(low, +1.0, r.min, r.argmin);
  run(high, -1.0, r.max, r.argmax);
  return r;
}

bool torus_contains_zero(const TorusRange& r) {
  // evaluation noise only: at an edge where two roots touch together the
  // minimum grows quadratically, so any slack here moves the edge by its root
  const double tol = 8.0 * std::numeric_limits<double>::epsilon() * r.scale;
  return r.min <= tol && r.max >= -tol;
}

std::vector<double> lambda_grid(Interval window, double step) {
  if (!(step > 0.0) || !(window.hi > window.lo)) throw DimensionMismatch("empty lambda window or step");
  const auto count = static_cast<std::size_t>(std::floor(window.width() / step + 1e-9)) + 1;
  std::vector<double> lam(count);
  for (std::size_t i = 0; i < count; ++i) lam[i] = window.lo + static_cast<double>(i) * step;
  if (lam.back() < window.hi - 1e-12) lam.push_back(window.hi);
  return lam;
}

namespace {

// out_l and in_l bracket a band edge.
double refine_edge(const std::function<SampleState(double)>& probe, double out_l, double in_l, double tol) {
  while (std::abs(in_l - out_l) > tol) {
    const double mid = 0.5 * (out_l + in_l);
    const SampleState s = probe(mid);
    if (s == SampleState::Pole) return mid;
    (s == SampleState::In ? in_l : out_l) = mid;
  }
  return 0.5 * (out_l + in_l);
}

}  // namespace

std::vector<BandInterval> merge_bands(const std::vector<double>& lam, const std::vector<SampleState>& state,
                                      const std::function<SampleState(double)>& probe, Interval window,
                                      double edge_tol, int component) {
  std::vector<BandInterval> bands;
  std::size_t i = 0;
  long last_out = -1;
  while (i < lam.size()) {
    if (state[i] == SampleState::Out) {
      last_out = static_cast<long>(i);
      ++i;
      continue;
    }
    if (state[i] == SampleState::Pole) {
      ++i;
      continue;
    }
    const std::size_t first = i;
    std::size_t last = i;
    std::size_t j = i + 1;
    while (j < lam.size() && state[j] != SampleState::Out) {
      if (state[j] == SampleState::In) last = j;
      ++j;
    }
    BandInterval b;
    b.component = component;
    b.lo = last_out < 0 ? window.lo : refine_edge(probe, lam[last_out], lam[first], edge_tol);
    b.hi = j >= lam.size() ? window.hi : refine_edge(probe, lam[j], lam[last], edge_tol);
    bands.push_back(b);
    last_out = j < lam.size() ? static_cast<long>(j) : last_out;
    i = j;
  }
  return bands;
}

std::vector<BandInterval> union_bands(std::vector<BandInterval> bands, double gap_tol) {
  std::sort(bands.begin(), bands.end(), [](const auto& a, const auto& b) { return a.lo < b.lo; });
  std::vector<BandInterval> out;
  for (auto b : bands) {
    b.component = 0;
    if (!out.empty() && b.lo <= out.back().hi + gap_tol)
      out.back().hi = std::max(out.back().hi, b.hi);
    else
      out.push_back(b);
  }
  return out;
}

namespace {

SampleState classify(const PeriodicGraph& g, double lambda, int grid, bool check_poles, bool* flat = nullptr) {
  DispersionOptions opts;
  opts.assembly.check_poles = check_poles;
  try {
    const LaurentPoly d = dispersion(g, lambda, opts);
    if (flat) {
      *flat = true;
      for (int j = 0; j < d.nvars(); ++j) *flat &= d.span(j) <= 0;
    }
    return torus_contains_zero(torus_range(d, grid)) ? SampleState::In : SampleState::Out;
  } catch (const PoleAtLambda&) {
    return SampleState::Pole;
  }
}

}  // namespace

SpectrumScan spectrum_scan(const PeriodicGraph& g, Interval window, double lambda_step, int torus_grid,
                           const ScanOptions& opts) {
  if (torus_grid < 8) throw DimensionMismatch("torus grid must be at least 8");
  const std::vector<double> lam = lambda_grid(window, lambda_step);

  std::vector<SampleState> state(lam.size());
  std::vector<char> flat(lam.size(), 0);
  parallel_for(lam.size(), [&](std::size_t i) {
    bool f = false;
    state[i] = classify(g, lam[i], torus_grid, true, &f);
    flat[i] = f;
  });

  SpectrumScan out;
  for (std::size_t i = 0; i < lam.size(); ++i)
    if (state[i] == SampleState::Pole) out.skipped_poles.push_back(lam[i]);
  if (g.dim() > 0 && std::all_of(flat.begin(), flat.end(), [](char f) { return f != 0; }))
    out.warnings.push_back("dispersion is independent of z; flat bands are not resolved by the torus scan");

  auto probe = [&](double l) { return classify(g, l, torus_grid, false); };
  out.bands = merge_bands(lam, state, probe, window, opts.edge_tol, 0);
  return out;
}

}  // namespace qg
