#include "qgraph/factor_probe.hpp"

#include "qgraph/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

namespace qg {

MonomialClass normalize_monomial_class(const LaurentPoly& d) {
  if (d.is_zero()) throw DimensionMismatch("cannot normalize the zero polynomial");
  MonomialClass mc;
  const Exponent lo = d.min_exponent();
  for (int j = 0; j < d.nvars(); ++j) mc.shift[j] = -lo[j];
  mc.poly = d.shifted(mc.shift);
  mc.scale = std::prev(mc.poly.terms().end())->second;
  mc.poly *= 1.0 / mc.scale;
  return mc;
}

namespace {

long cross(const LatticePoint& o, const LatticePoint& a, const LatticePoint& b) {
  return static_cast<long>(a[0] - o[0]) * (b[1] - o[1]) - static_cast<long>(a[1] - o[1]) * (b[0] - o[0]);
}

}  // namespace

std::vector<LatticePoint> convex_hull(std::vector<LatticePoint> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() <= 2) return pts;
  std::vector<LatticePoint> h(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], p) <= 0) --k;
    h[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

std::vector<LatticePoint> lattice_points(const std::vector<LatticePoint>& hull) {
  std::vector<LatticePoint> out;
  if (hull.empty()) return out;
  if (hull.size() == 1) return hull;
  int x0 = hull[0][0], x1 = x0, y0 = hull[0][1], y1 = y0;
  for (const auto& p : hull) {
    x0 = std::min(x0, p[0]);
    x1 = std::max(x1, p[0]);
    y0 = std::min(y0, p[1]);
    y1 = std::max(y1, p[1]);
  }
  for (int x = x0; x <= x1; ++x)
    for (int y = y0; y <= y1; ++y) {
      const LatticePoint q{x, y};
      bool inside = true;
      if (hull.size() == 2) {
        inside = cross(hull[0], hull[1], q) == 0;
      } else {
        for (std::size_t i = 0; i < hull.size() && inside; ++i)
          inside = cross(hull[i], hull[(i + 1) % hull.size()], q) >= 0;
      }
      if (inside) out.push_back(q);
    }
  return out;
}

std::string ProbeLog::summary() const {
  std::ostringstream os;
  os << "lattice_points=" << lattice_points << " edges=" << polytope_edges
     << " splits_enumerated=" << splits_enumerated << " splits_tried=" << splits_tried
     << " starts_per_split=" << starts_per_split << " max_support=" << max_support
     << " best_residual=" << best_residual;
  return os.str();
}

namespace {

struct EdgeDir {
  LatticePoint step;  // primitive
  int mult;
};

std::vector<EdgeDir> boundary_edges(const std::vector<LatticePoint>& hull) {
  std::vector<EdgeDir> edges;
  if (hull.size() < 2) return edges;
  const std::size_t n = hull.size() == 2 ? 2 : hull.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = hull[i];
    const auto& b = hull[(i + 1) % hull.size()];
    const int dx = b[0] - a[0], dy = b[1] - a[1];
    const int g = std::gcd(std::abs(dx), std::abs(dy));
    edges.push_back({{dx / g, dy / g}, g});
  }
  return edges;
}

std::vector<LatticePoint> polygon_from_edges(LatticePoint start, const std::vector<EdgeDir>& dirs,
                                             const std::vector<int>& k) {
  std::vector<LatticePoint> verts{start};
  LatticePoint cur = start;
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    cur[0] += k[i] * dirs[i].step[0];
    cur[1] += k[i] * dirs[i].step[1];
    verts.push_back(cur);
  }
  return lattice_points(convex_hull(verts));
}

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

// Solves the bilinear system conv(f, g) = d on the lattice points of P.
class BilinearFit {
 public:
  BilinearFit(const std::vector<LatticePoint>& ppts, const std::vector<LatticePoint>& q,
              const std::vector<LatticePoint>& r, const Vec& d)
      : q_(q), r_(r), d_(d) {
    std::map<LatticePoint, int> index;
    for (std::size_t i = 0; i < ppts.size(); ++i) index[ppts[i]] = static_cast<int>(i);
    pair_row_.resize(q.size() * r.size());
    for (std::size_t a = 0; a < q.size(); ++a)
      for (std::size_t b = 0; b < r.size(); ++b)
        pair_row_[a * r.size() + b] = index.at({q[a][0] + r[b][0], q[a][1] + r[b][1]});
    rows_ = static_cast<int>(ppts.size());
  }

  Mat conv_by_g(const Vec& g) const {  // acts on f
    Mat m = Mat::Zero(rows_, q_.size());
    for (std::size_t a = 0; a < q_.size(); ++a)
      for (std::size_t b = 0; b < r_.size(); ++b) m(pair_row_[a * r_.size() + b], a) += g[b];
    return m;
  }
  Mat conv_by_f(const Vec& f) const {  // acts on g
    Mat m = Mat::Zero(rows_, r_.size());
    for (std::size_t a = 0; a < q_.size(); ++a)
      for (std::size_t b = 0; b < r_.size(); ++b) m(pair_row_[a * r_.size() + b], b) += f[a];
    return m;
  }
  Vec product(const Vec& f, const Vec& g) const { return conv_by_g(g) * f; }
  double residual(const Vec& f, const Vec& g) const {
    return (product(f, g) - d_).cwiseAbs().maxCoeff() / d_.cwiseAbs().maxCoeff();
  }

  double solve(std::mt19937_64& rng, int starts, int als_iters, int newton_iters, Vec& best_f, Vec& best_g) const {
    std::normal_distribution<double> nd;
    double best = std::numeric_limits<double>::infinity();
    for (int s = 0; s < starts; ++s) {
      Vec g(r_.size());
      for (auto& x : g) x = Complex(nd(rng), nd(rng));
      Vec f;
      double prev = std::numeric_limits<double>::infinity();
      for (int it = 0; it < als_iters; ++it) {
        f = conv_by_g(g).colPivHouseholderQr().solve(d_);
        g = conv_by_f(f).colPivHouseholderQr().solve(d_);
        const double cur = residual(f, g);
        if (cur < 1e-14 || (it > 20 && cur > prev * (1.0 - 1e-6))) break;
        prev = cur;
      }
      polish(f, g, newton_iters);
      const double res = residual(f, g);
      if (res < best) {
        best = res;
        best_f = f;
        best_g = g;
      }
      if (best < 1e-13) break;
    }
    return best;
  }

 private:
  // Gauss-Newton on the joint unknowns; the scaling null direction is handled
  // by the minimum-norm least-squares step.
  void polish(Vec& f, Vec& g, int iters) const {
    const Eigen::Index nf = f.size();
    double cur = residual(f, g);
    for (int it = 0; it < iters && cur > 1e-15; ++it) {
      Mat j(rows_, nf + g.size());
      j << conv_by_g(g), conv_by_f(f);
      const Vec r = product(f, g) - d_;
      const Vec step = j.completeOrthogonalDecomposition().solve(-r);
      double t = 1.0;
      bool improved = false;
      for (int ls = 0; ls < 8; ++ls, t *= 0.5) {
        Vec nf_ = f + t * step.head(nf);
        Vec ng = g + t * step.tail(g.size());
        const double res = residual(nf_, ng);
        if (res < cur) {
          f = nf_;
          g = ng;
          cur = res;
          improved = true;
          break;
        }
      }
      if (!improved) break;
    }
  }

  std::vector<LatticePoint> q_, r_;
  Vec d_;
  std::vector<int> pair_row_;
  int rows_ = 0;
};

LaurentPoly to_poly(int nvars, const std::vector<LatticePoint>& pts, const Vec& c) {
  LaurentPoly p(nvars);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    Exponent e{};
    e[0] = pts[i][0];
    if (nvars > 1) e[1] = pts[i][1];
    p.add_term(e, c[static_cast<Eigen::Index>(i)]);
  }
  return p.prune();
}

}  // namespace

FactorVerdict lp_factor_probe(const LaurentPoly& d, const ProbeOptions& opts) {
  if (d.nvars() > 2) throw DimensionMismatch("factor probe supports at most two variables");
  if (d.is_zero()) throw DimensionMismatch("factor probe needs a nonzero polynomial");

  FactorVerdict verdict;
  verdict.log.max_support = opts.max_support;
  verdict.log.starts_per_split = opts.starts;
  if (d.nvars() == 0) return verdict;

  const MonomialClass mc = normalize_monomial_class(d);
  std::vector<LatticePoint> support;
  for (const auto& [e, c] : mc.poly.terms()) support.push_back({e[0], d.nvars() > 1 ? e[1] : 0});
  const auto hull = convex_hull(support);
  const auto ppts = lattice_points(hull);
  verdict.log.lattice_points = static_cast<int>(ppts.size());
  if (ppts.size() > 64)
    throw SupportTooLarge("Newton polytope has " + std::to_string(ppts.size()) + " lattice points (limit 64)");

  const auto dirs = boundary_edges(hull);
  verdict.log.polytope_edges = static_cast<int>(dirs.size());
  if (dirs.empty()) return verdict;  // monomial

  const double dnorm = mc.poly.max_abs();
  Vec dvec(static_cast<Eigen::Index>(ppts.size()));
  for (std::size_t i = 0; i < ppts.size(); ++i) {
    Exponent e{};
    e[0] = ppts[i][0];
    if (d.nvars() > 1) e[1] = ppts[i][1];
    dvec[static_cast<Eigen::Index>(i)] = mc.poly.coeff(e) / dnorm;
  }

  // Enumerate summand edge multiplicities 0 <= k_i <= m_i that close up.
  std::vector<std::vector<int>> splits;
  std::vector<int> k(dirs.size(), 0);
  auto rec = [&](auto&& self, std::size_t i, long sx, long sy) -> void {
    if (i == dirs.size()) {
      if (sx != 0 || sy != 0) return;
      bool all_zero = true, all_full = true;
      for (std::size_t t = 0; t < dirs.size(); ++t) {
        all_zero &= k[t] == 0;
        all_full &= k[t] == dirs[t].mult;
      }
      if (!all_zero && !all_full) splits.push_back(k);
      return;
    }
    for (int v = 0; v <= dirs[i].mult; ++v) {
      k[i] = v;
      self(self, i + 1, sx + static_cast<long>(v) * dirs[i].step[0], sy + static_cast<long>(v) * dirs[i].step[1]);
    }
    k[i] = 0;
  };
  rec(rec, 0, 0, 0);
  verdict.log.splits_enumerated = static_cast<int>(splits.size());

  std::mt19937_64 rng(opts.seed);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& kq : splits) {
    std::vector<int> kr(dirs.size());
    for (std::size_t t = 0; t < dirs.size(); ++t) kr[t] = dirs[t].mult - kq[t];
    const auto qpts = polygon_from_edges(hull[0], dirs, kq);
    const auto rpts = polygon_from_edges({0, 0}, dirs, kr);
    // each unordered pair once
    if (qpts.size() > rpts.size() || (qpts.size() == rpts.size() && kq > kr)) continue;
    if (static_cast<int>(qpts.size()) > opts.max_support) continue;
    ++verdict.log.splits_tried;

    BilinearFit fit(ppts, qpts, rpts, dvec);
    Vec f, g;
    const double res = fit.solve(rng, opts.starts, opts.als_iterations, opts.newton_iterations, f, g);
    best = std::min(best, res);
    if (res <= opts.accept_tol) {
      LaurentPoly fp = to_poly(d.nvars(), qpts, f);
      LaurentPoly gp = to_poly(d.nvars(), rpts, g);
      Exponent back{};
      for (int j = 0; j < d.nvars(); ++j) back[j] = -mc.shift[j];
      gp = gp.shifted(back) * (mc.scale * dnorm);
      const double check = rel_distance(fp * gp, d);
      if (check <= opts.accept_tol) {
        verdict.factored = true;
        verdict.f = std::move(fp);
        verdict.g = std::move(gp);
        verdict.residual = check;
        verdict.log.best_residual = check;
        return verdict;
      }
    }
  }
  verdict.residual = std::isfinite(best) ? best : 1.0;
  verdict.log.best_residual = verdict.residual;
  return verdict;
}

}  // namespace qg
