#include "qgraph/graphene.hpp"

#include "qgraph/errors.hpp"
#include "qgraph/kernels.hpp"
#include "qgraph/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace qg {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
const std::array<std::vector<int>, 3> kLayerShifts{std::vector<int>{0, 0}, {1, 0}, {0, 1}};

std::string vid(std::size_t layer, int which) { return "L" + std::to_string(layer + 1) + ".v" + std::to_string(which); }

bool same_s_function(const Potential& a, const Potential& b) { return a == b || a == reverse_potential(b); }

bool mu_is_real(Complex m) { return std::abs(m.imag()) <= 1e-6 * (1.0 + std::abs(m)); }

}  // namespace

std::array<Potential, 3> LayerSpec::effective_q() const {
  if (!rotated) return q;
  return {reverse_potential(q[0]), reverse_potential(q[1]), reverse_potential(q[2])};
}

std::array<double, 2> LayerSpec::effective_alpha() const {
  return rotated ? std::array<double, 2>{alpha[1], alpha[0]} : alpha;
}

char shift_name(Shift s) { return "ABC"[static_cast<int>(s)]; }

bool StackSpec::all_aligned() const {
  return std::all_of(layers.begin(), layers.end(), [&](const StackLayer& l) { return l.shift == layers[0].shift; });
}

void StackSpec::validate() const {
  if (layers.empty()) throw InvalidGraph("stack has no layers");
  if (connectors.size() + 1 != layers.size())
    throw InvalidGraph("stack with " + std::to_string(layers.size()) + " layers needs " +
                       std::to_string(layers.size() - 1) + " connector entries, got " +
                       std::to_string(connectors.size()));
  std::vector<std::vector<Potential>> edges;
  for (std::size_t j = 0; j < layers.size(); ++j) {
    const auto q = layers[j].layer.effective_q();
    for (std::size_t i = 0; i < 3; ++i)
      if (std::abs(q[i].total_length() - 1.0) > 1e-12)
        throw InvalidGraph("layer " + std::to_string(j) + " edge " + std::to_string(i) + " must have length 1");
    edges.emplace_back(q.begin(), q.end());
  }
  check_isospectral_layers(edges, iso_window);
}

PeriodicGraph single_layer(const LayerSpec& ls) {
  const auto q = ls.effective_q();
  const auto a = ls.effective_alpha();
  PeriodicGraph g(2);
  g.add_vertex("v1", VertexCondition::robin(a[0])).add_vertex("v2", VertexCondition::robin(a[1]));
  for (std::size_t i = 0; i < 3; ++i) g.add_edge("v1", "v2", kLayerShifts[i], q[i]);
  return g;
}

namespace {

PeriodicGraph assemble_stack(const StackSpec& ss) {
  PeriodicGraph g(2);
  for (std::size_t j = 0; j < ss.n(); ++j) {
    const auto a = ss.layers[j].layer.effective_alpha();
    g.add_vertex(vid(j, 1), VertexCondition::robin(a[0])).add_vertex(vid(j, 2), VertexCondition::robin(a[1]));
  }
  for (std::size_t j = 0; j < ss.n(); ++j) {
    const auto q = ss.layers[j].layer.effective_q();
    for (std::size_t i = 0; i < 3; ++i) g.add_edge(vid(j, 1), vid(j, 2), kLayerShifts[i], q[i]);
  }
  // Position class of v1 is the layer shift, of v2 one third behind it.
  for (std::size_t j = 0; j + 1 < ss.n(); ++j) {
    const int s = static_cast<int>(ss.layers[j].shift);
    const int t = static_cast<int>(ss.layers[j + 1].shift);
    const auto& c = ss.connectors[j];
    if (s == t) {
      g.add_edge(vid(j, 1), vid(j + 1, 1), {0, 0}, c.q1);
      g.add_edge(vid(j, 2), vid(j + 1, 2), {0, 0}, c.q2);
    } else if (t == (s + 1) % 3) {
      g.add_edge(vid(j, 1), vid(j + 1, 2), {0, 0}, c.q1);
    } else {
      g.add_edge(vid(j, 2), vid(j + 1, 1), {0, 0}, c.q1);
    }
  }
  return g;
}

Type2Layer base_layer(const StackSpec& ss) {
  Type2Layer l;
  const auto q = ss.layers[0].layer.effective_q();
  l.edges.assign(q.begin(), q.end());
  l.shifts.assign(kLayerShifts.begin(), kLayerShifts.end());
  const auto a = ss.layers[0].layer.effective_alpha();
  l.alpha1 = a[0];
  l.alpha2 = a[1];
  return l;
}

}  // namespace

PeriodicGraph stack(const StackSpec& ss, bool self_check) {
  ss.validate();
  PeriodicGraph g = assemble_stack(ss);
  if (!self_check) return g;

  const Type2Layer base = base_layer(ss);
  for (double lam : {2.3456789, 3.7182818, 5.4321987, 8.1234567}) {
    try {
      const LaurentPoly d = dispersion(g, lam);
      const LaurentPoly w = layer_w(base, 2, lam);
      const ZetaStructure zs = zeta_components(d, w * w.inverted(), static_cast<int>(ss.n()));
      if (zs.degree != static_cast<int>(ss.n())) {
        std::ostringstream os;
        os << "stack check: dispersion has degree " << zs.degree << " in zeta, expected " << ss.n();
        throw StructureNotFound(os.str());
      }
      return g;
    } catch (const PoleAtLambda&) {
      continue;
    }
  }
  throw StructureNotFound("stack check: no pole-free test energy found");
}

Type2Spec to_type2(const StackSpec& ss) {
  if (!ss.all_aligned()) throw InvalidGraph("type-2 view needs an aligned (AA) stack");
  Type2Spec t;
  for (std::size_t j = 0; j < ss.n(); ++j) {
    Type2Layer l;
    const auto q = ss.layers[j].layer.effective_q();
    l.edges.assign(q.begin(), q.end());
    l.shifts.assign(kLayerShifts.begin(), kLayerShifts.end());
    const auto a = ss.layers[j].layer.effective_alpha();
    l.alpha1 = a[0];
    l.alpha2 = a[1];
    t.layers.push_back(std::move(l));
  }
  for (const auto& c : ss.connectors) {
    t.connector1.push_back(c.q1);
    t.connector2.push_back(c.q2);
  }
  return t;
}

StackModel::StackModel(StackSpec ss) : spec_(std::move(ss)) {
  graph_ = stack(spec_);
  if (spec_.all_aligned()) type2_ = to_type2(spec_);
  base_ = base_layer(spec_);
  uniform_s_ = same_s_function(base_.edges[0], base_.edges[1]) && same_s_function(base_.edges[0], base_.edges[2]);
}

double StackModel::s0(double lambda) const { return transfer_matrix(base_.edges[0], lambda).s; }

LaurentPoly StackModel::zeta(double lambda) const {
  const LaurentPoly w = layer_w(base_, 2, lambda);
  return w * w.inverted();
}

Interval StackModel::mu_range(double lambda) const {
  if (uniform_s_) return {0.0, 9.0};
  const double s = s0(lambda);
  const TorusRange r = torus_range(zeta(lambda), 48);
  return {s * s * r.min, s * s * r.max};
}

std::vector<Complex> StackModel::mu(double lambda, bool check_poles) const {
  if (type2_) return type2_characteristic(*type2_, lambda, check_poles).mu;

  DispersionOptions opts;
  opts.assembly.check_poles = check_poles;
  const LaurentPoly d = dispersion(graph_, lambda, opts);
  const int n = static_cast<int>(components());
  // fit in s0^2 zeta, which stays O(1) on the torus; powers of zeta itself
  // scale like s0^-2k and wreck the roots near a Dirichlet eigenvalue
  const double s = s0(lambda);
  if (s == 0.0) throw PoleAtLambda(lambda, {0});
  const ZetaStructure zs = zeta_components(d, zeta(lambda) * Complex(s * s), n);
  if (zs.degree < 1) {
    std::ostringstream os;
    os << "dispersion is constant in zeta at lambda=" << lambda << ", expected degree " << n;
    throw StructureNotFound(os.str());
  }
  std::vector<Complex> out(zs.roots.begin(), zs.roots.end());
  for (std::size_t i = 0; i < out.size(); ++i)
    if (zs.real_within_noise[i]) out[i] = out[i].real();
  std::sort(out.begin(), out.end(), [](Complex a, Complex b) { return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag(); });
  // leading terms below the noise floor of D: those roots have left for
  // infinity, far outside any band
  out.resize(n, Complex(std::numeric_limits<double>::infinity(), 0.0));
  return out;
}

namespace {

// Distance for continuation; values at infinity match each other.
double mu_dist(Complex a, Complex b) {
  const bool fa = std::isfinite(a.real()) && std::isfinite(a.imag());
  const bool fb = std::isfinite(b.real()) && std::isfinite(b.imag());
  if (fa && fb) return std::abs(a - b);
  return fa == fb ? 0.0 : 1e300;
}

// Reorders `cur` to follow `pred` by the cheapest assignment.
std::vector<Complex> match(const std::vector<Complex>& pred, std::vector<Complex> cur) {
  const std::size_t n = cur.size();
  if (pred.size() != n) return cur;
  std::vector<std::size_t> perm(n), best;
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  if (n <= 7) {
    double best_cost = std::numeric_limits<double>::infinity();
    do {
      double c = 0.0;
      for (std::size_t i = 0; i < n; ++i) c += mu_dist(cur[perm[i]], pred[i]);
      if (c < best_cost) {
        best_cost = c;
        best = perm;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
  } else {
    std::vector<char> used(n, 0);
    best.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t arg = 0;
      double d = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < n; ++j)
        if (!used[j] && mu_dist(cur[j], pred[i]) <= d) {
          d = mu_dist(cur[j], pred[i]);
          arg = j;
        }
      used[arg] = 1;
      best[i] = arg;
    }
  }
  std::vector<Complex> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = cur[best[i]];
  return out;
}

double min_gap(const std::vector<Complex>& v, int* a, int* b) {
  double g = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j)
      if (std::isfinite(std::abs(v[i] - v[j])) && std::abs(v[i] - v[j]) < g) {
        g = std::abs(v[i] - v[j]);
        *a = static_cast<int>(i);
        *b = static_cast<int>(j);
      }
  return g;
}

struct GridMu {
  std::vector<double> lambda;
  std::vector<std::vector<Complex>> mu;  // empty vector on pole samples
  std::vector<char> pole;
};

GridMu sample_mu(const StackModel& m, Interval window, double step) {
  GridMu gm;
  gm.lambda = lambda_grid(window, step);
  gm.mu.resize(gm.lambda.size());
  gm.pole.assign(gm.lambda.size(), 0);
  parallel_for(gm.lambda.size(), [&](std::size_t i) {
    try {
      gm.mu[i] = m.mu(gm.lambda[i], true);
    } catch (const PoleAtLambda&) {
      gm.pole[i] = 1;
    }
  });
  return gm;
}

}  // namespace

MuCurves mu_curves(const StackModel& m, Interval window, double lambda_step) {
  const GridMu gm = sample_mu(m, window, lambda_step);
  MuCurves out;
  std::vector<Complex> prev, prev2;
  double lprev = 0.0, lprev2 = 0.0;
  auto predict = [&](double l) {
    if (prev2.empty()) return prev;
    std::vector<Complex> p(prev.size());
    const double r = (l - lprev) / (lprev - lprev2);
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = prev[i] + r * (prev[i] - prev2[i]);
    return p;
  };
  auto push = [&](double l, std::vector<Complex> v) {
    prev2 = std::move(prev);
    lprev2 = lprev;
    prev = std::move(v);
    lprev = l;
  };

  for (std::size_t i = 0; i < gm.lambda.size(); ++i) {
    const double l = gm.lambda[i];
    if (gm.pole[i]) {
      out.skipped_poles.push_back(l);
      prev2.clear();  // no extrapolation across a pole
      continue;
    }
    std::vector<Complex> cur = gm.mu[i];
    if (!prev.empty()) {
      int a = 0, b = 0;
      if (min_gap(cur, &a, &b) < 1e-3 || min_gap(prev, &a, &b) < 1e-3) {
        // close approach: walk in eighths of the step
        for (int k = 1; k < 8; ++k) {
          const double lm = lprev + (l - lprev) * k / 8.0;
          try {
            push(lm, match(predict(lm), m.mu(lm, true)));
          } catch (const PoleAtLambda&) {
          }
        }
      }
      cur = match(predict(l), std::move(cur));
      if (min_gap(cur, &a, &b) < 1e-3) out.crossings.push_back({l, a, b});
    }
    for (Complex v : cur)
      if (!mu_is_real(v)) {
        std::ostringstream os;
        os << "non-real mu " << v << " at lambda=" << l;
        out.warnings.push_back(os.str());
        break;
      }
    out.lambda.push_back(l);
    out.mu.push_back(cur);
    push(l, std::move(cur));
  }
  return out;
}

namespace {

SampleState member(const StackModel& m, double lambda, std::size_t comp, bool check_poles) {
  try {
    const auto mu = m.mu(lambda, check_poles);
    const Interval r = m.mu_range(lambda);
    const Complex v = mu[comp];
    const bool in = mu_is_real(v) && v.real() >= r.lo - 1e-10 && v.real() <= r.hi + 1e-10;
    return in ? SampleState::In : SampleState::Out;
  } catch (const PoleAtLambda&) {
    return SampleState::Pole;
  }
}

}  // namespace

BandsResult bands(const StackModel& m, Interval window, double lambda_step, double edge_tol) {
  const GridMu gm = sample_mu(m, window, lambda_step);
  BandsResult out;
  std::vector<Interval> ranges(gm.lambda.size());
  parallel_for(gm.lambda.size(), [&](std::size_t i) {
    if (!gm.pole[i]) ranges[i] = m.mu_range(gm.lambda[i]);
  });
  for (std::size_t i = 0; i < gm.lambda.size(); ++i) {
    if (gm.pole[i]) {
      out.skipped_poles.push_back(gm.lambda[i]);
      continue;
    }
    for (Complex v : gm.mu[i])
      if (!mu_is_real(v)) {
        std::ostringstream os;
        os << "non-real mu " << v << " at lambda=" << gm.lambda[i];
        out.warnings.push_back(os.str());
        break;
      }
  }
  for (std::size_t c = 0; c < m.components(); ++c) {
    std::vector<SampleState> st(gm.lambda.size());
    for (std::size_t i = 0; i < gm.lambda.size(); ++i) {
      if (gm.pole[i]) {
        st[i] = SampleState::Pole;
        continue;
      }
      const Complex v = gm.mu[i][c];
      const bool in = mu_is_real(v) && v.real() >= ranges[i].lo - 1e-10 && v.real() <= ranges[i].hi + 1e-10;
      st[i] = in ? SampleState::In : SampleState::Out;
    }
    auto probe = [&](double l) { return member(m, l, c, false); };
    auto b = merge_bands(gm.lambda, st, probe, window, edge_tol, static_cast<int>(c));
    out.bands.insert(out.bands.end(), b.begin(), b.end());
  }
  return out;
}

const char* cone_class_name(ConeClass c) {
  switch (c) {
    case ConeClass::Cone:
      return "Cone";
    case ConeClass::Transversal:
      return "Transversal";
    default:
      return "Degenerate";
  }
}

ConeClass classify_zero(double mu_prime, double mu_second, const ConeTolerances& tol) {
  const double slope_tol = tol.slope * tol.scale;
  if (std::abs(mu_prime) >= slope_tol) return ConeClass::Transversal;
  if (mu_second > tol.curvature) return ConeClass::Cone;
  return ConeClass::Degenerate;
}

namespace {

// Brent's minimizer on [a, b].
double brent_min(const std::function<double(double)>& f, double a, double b, double tol = 1e-12) {
  const double gold = 0.3819660112501051;
  double x = a + gold * (b - a), w = x, v = x;
  double fx = f(x), fw = fx, fv = fx;
  double d = 0.0, e = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double xm = 0.5 * (a + b);
    const double tol1 = tol * std::abs(x) + 1e-14, tol2 = 2.0 * tol1;
    if (std::abs(x - xm) <= tol2 - 0.5 * (b - a)) break;
    bool golden = true;
    if (std::abs(e) > tol1) {
      const double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) p = -p;
      q = std::abs(q);
      const double etemp = e;
      e = d;
      if (std::abs(p) < std::abs(0.5 * q * etemp) && p > q * (a - x) && p < q * (b - x)) {
        d = p / q;
        const double u = x + d;
        if (u - a < tol2 || b - u < tol2) d = xm >= x ? tol1 : -tol1;
        golden = false;
      }
    }
    if (golden) {
      e = (x >= xm ? a : b) - x;
      d = gold * e;
    }
    const double u = std::abs(d) >= tol1 ? x + d : x + (d > 0 ? tol1 : -tol1);
    const double fu = f(u);
    if (fu <= fx) {
      (u >= x ? a : b) = x;
      v = w;
      fv = fw;
      w = x;
      fw = fx;
      x = u;
      fx = fu;
    } else {
      (u < x ? a : b) = u;
      if (fu <= fw || w == x) {
        v = w;
        fv = fw;
        w = u;
        fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u;
        fv = fu;
      }
    }
  }
  return x;
}

}  // namespace

std::vector<ConeReport> cone_scan(const StackModel& m, Interval window, double lambda_step,
                                  const ConeTolerances& tol) {
  const GridMu gm = sample_mu(m, window, lambda_step);
  const double zero_tol = tol.zero * std::max(1.0, tol.scale);
  std::vector<ConeReport> out;

  for (std::size_t c = 0; c < m.components(); ++c) {
    auto f = [&](double l) {
      try {
        return m.mu(l, false)[c].real();
      } catch (const PoleAtLambda&) {
        return kNaN;
      }
    };
    std::vector<double> y(gm.lambda.size(), kNaN);
    for (std::size_t i = 0; i < y.size(); ++i)
      if (!gm.pole[i]) y[i] = gm.mu[i][c].real();

    std::vector<double> zeros;
    for (std::size_t i = 0; i + 1 < y.size(); ++i) {
      if (std::isnan(y[i]) || std::isnan(y[i + 1])) continue;
      if (y[i] == 0.0) zeros.push_back(gm.lambda[i]);
      if (y[i] * y[i + 1] < 0.0) {
        double lo = gm.lambda[i], hi = gm.lambda[i + 1];
        const bool neg_lo = y[i] < 0.0;
        for (int it = 0; it < 80 && hi - lo > 1e-13 * (1.0 + std::abs(lo)); ++it) {
          const double mid = 0.5 * (lo + hi);
          const double fm = f(mid);
          if (std::isnan(fm)) break;
          ((fm < 0.0) == neg_lo ? lo : hi) = mid;
        }
        const double r = 0.5 * (lo + hi);
        const double fr = f(r);
        if (!std::isnan(fr) && std::abs(fr) <= zero_tol) zeros.push_back(r);  // pole jumps fail here
      }
    }
    for (std::size_t i = 1; i + 1 < y.size(); ++i) {
      if (std::isnan(y[i - 1]) || std::isnan(y[i]) || std::isnan(y[i + 1])) continue;
      if (!(std::abs(y[i]) <= std::abs(y[i - 1]) && std::abs(y[i]) <= std::abs(y[i + 1]))) continue;
      if (y[i - 1] * y[i] < 0.0 || y[i] * y[i + 1] < 0.0) continue;  // handled as sign change
      const double r0 = brent_min([&](double l) {
        const double v = f(l);
        return std::isnan(v) ? std::numeric_limits<double>::infinity() : std::abs(v);
      }, gm.lambda[i - 1], gm.lambda[i + 1]);
      // the minimiser of |mu| is only sqrt(eps) accurate; polish on mu' = 0
      double r = r0;
      for (int it = 0; it < 8; ++it) {
        const double h = tol.fd_step, fp = f(r + h), f0 = f(r), fm = f(r - h);
        const double d1 = (fp - fm) / (2.0 * h), d2 = (fp - 2.0 * f0 + fm) / (h * h);
        if (std::isnan(d1) || std::isnan(d2) || d2 == 0.0) break;
        const double step = d1 / d2;
        if (!(std::abs(step) < lambda_step) || r - step < gm.lambda[i - 1] || r - step > gm.lambda[i + 1]) break;
        r -= step;
        if (std::abs(step) < 1e-14 * (1.0 + std::abs(r))) break;
      }
      const double fr = f(r);
      if (!std::isnan(fr) && std::abs(fr) <= zero_tol) zeros.push_back(r);
    }
    std::sort(zeros.begin(), zeros.end());
    zeros.erase(std::unique(zeros.begin(), zeros.end(), [](double a, double b) { return b - a < 1e-5; }),
                zeros.end());

    for (double l : zeros) {
      auto diffs = [&](double h, double* d1, double* d2) {
        const double fp = f(l + h), f0 = f(l), fm = f(l - h);
        *d1 = (fp - fm) / (2.0 * h);
        *d2 = (fp - 2.0 * f0 + fm) / (h * h);
        return !(std::isnan(fp) || std::isnan(f0) || std::isnan(fm));
      };
      double d1 = 0.0, d2 = 0.0;
      if (!diffs(tol.fd_step, &d1, &d2)) {
        // Richardson on the halved steps
        double a1, a2, b1, b2;
        diffs(tol.fd_step / 2.0, &a1, &a2);
        diffs(tol.fd_step / 4.0, &b1, &b2);
        d1 = (4.0 * b1 - a1) / 3.0;
        d2 = (4.0 * b2 - a2) / 3.0;
      }
      out.push_back({static_cast<int>(c), l, classify_zero(d1, d2, tol), d1, d2});
    }
  }
  std::sort(out.begin(), out.end(), [](const ConeReport& a, const ConeReport& b) {
    return a.lambda_star != b.lambda_star ? a.lambda_star < b.lambda_star : a.component < b.component;
  });
  return out;
}

double gtilde(double k1, double k2) { return 3.0 + 2.0 * std::cos(k1) + 2.0 * std::cos(k2) + 2.0 * std::cos(k1 - k2); }

std::vector<SurfacePoint> dispersion_surface(const StackModel& m, Interval window, int k_grid, double lambda_step) {
  if (k_grid < 2) throw DimensionMismatch("k grid needs at least 2 points");
  if (!m.uniform_s())
    throw DimensionMismatch("surface export needs layer edges sharing one Dirichlet spectral function");
  const GridMu gm = sample_mu(m, window, lambda_step);
  const auto nk = static_cast<std::size_t>(k_grid);
  std::vector<double> k(nk), ck(nk), sk(nk);
  for (std::size_t i = 0; i < nk; ++i) {
    k[i] = -std::numbers::pi + 2.0 * std::numbers::pi * static_cast<double>(i) / (k_grid - 1);
    ck[i] = std::cos(k[i]);
    sk[i] = std::sin(k[i]);
  }

  std::vector<std::vector<SurfacePoint>> rows(nk);
  parallel_for(nk, [&](std::size_t i1) {
    std::vector<double> g(nk);
    kernels::gtilde_row(g.data(), ck.data(), sk.data(), nk, ck[i1], sk[i1]);
    for (std::size_t c = 0; c < m.components(); ++c) {
      auto f = [&](double l) {
        try {
          return m.mu(l, false)[c].real();
        } catch (const PoleAtLambda&) {
          return kNaN;
        }
      };
      for (std::size_t s = 0; s + 1 < gm.lambda.size(); ++s) {
        if (gm.pole[s] || gm.pole[s + 1]) continue;
        const double ya = gm.mu[s][c].real(), yb = gm.mu[s + 1][c].real();
        for (std::size_t i2 = 0; i2 < nk; ++i2) {
          const double target = g[i2];
          if ((ya - target) * (yb - target) > 0.0 || ya == yb) continue;
          double lo = gm.lambda[s], hi = gm.lambda[s + 1];
          const bool below_lo = ya < target;
          bool ok = true;
          while (hi - lo > 1e-10) {
            const double mid = 0.5 * (lo + hi);
            const double fm = f(mid);
            if (std::isnan(fm)) {
              ok = false;
              break;
            }
            ((fm < target) == below_lo ? lo : hi) = mid;
          }
          const double r = 0.5 * (lo + hi);
          const double fr = f(r);
          if (!ok || std::isnan(fr) || std::abs(fr - target) > 1e-6 * std::max(1.0, std::abs(target))) continue;
          rows[i1].push_back({k[i1], k[i2], r, static_cast<int>(c)});
        }
      }
    }
  });
  std::vector<SurfacePoint> out;
  for (auto& r : rows) {
    std::sort(r.begin(), r.end(), [](const SurfacePoint& a, const SurfacePoint& b) {
      if (a.k2 != b.k2) return a.k2 < b.k2;
      if (a.component != b.component) return a.component < b.component;
      return a.lambda < b.lambda;
    });
    out.insert(out.end(), r.begin(), r.end());
  }
  return out;
}

GtildeExtrema gtilde_extrema(int n) {
  if (n < 3) throw DimensionMismatch("grid too small");
  const auto nn = static_cast<std::size_t>(n);
  std::vector<double> k(nn), ck(nn), sk(nn), row(nn);
  for (std::size_t i = 0; i < nn; ++i) {
    k[i] = -std::numbers::pi + 2.0 * std::numbers::pi * static_cast<double>(i) / n;
    ck[i] = std::cos(k[i]);
    sk[i] = std::sin(k[i]);
  }
  GtildeExtrema ex{};
  ex.min = std::numeric_limits<double>::infinity();
  ex.max = -ex.min;
  for (std::size_t i = 0; i < nn; ++i) {
    kernels::gtilde_row(row.data(), ck.data(), sk.data(), nn, ck[i], sk[i]);
    const auto mm = kernels::minmax(row.data(), nn);
    if (mm.min < ex.min) {
      ex.min = mm.min;
      ex.argmin_grid = {k[i], k[static_cast<std::size_t>(std::find(row.begin(), row.end(), mm.min) - row.begin())]};
    }
    if (mm.max > ex.max) {
      ex.max = mm.max;
      ex.argmax_grid = {k[i], k[static_cast<std::size_t>(std::find(row.begin(), row.end(), mm.max) - row.begin())]};
    }
  }

  // Newton on the analytic gradient and Hessian
  auto newton = [](std::array<double, 2> p) {
    for (int it = 0; it < 50; ++it) {
      const double d = p[0] - p[1];
      const double g1 = -2.0 * std::sin(p[0]) - 2.0 * std::sin(d);
      const double g2 = -2.0 * std::sin(p[1]) + 2.0 * std::sin(d);
      const double h11 = -2.0 * std::cos(p[0]) - 2.0 * std::cos(d);
      const double h22 = -2.0 * std::cos(p[1]) - 2.0 * std::cos(d);
      const double h12 = 2.0 * std::cos(d);
      const double det = h11 * h22 - h12 * h12;
      if (std::abs(det) < 1e-300) break;
      const double s1 = (h22 * g1 - h12 * g2) / det, s2 = (h11 * g2 - h12 * g1) / det;
      p[0] -= s1;
      p[1] -= s2;
      if (std::abs(s1) + std::abs(s2) < 1e-15) break;
    }
    return p;
  };
  ex.argmin = newton(ex.argmin_grid);
  ex.argmax = newton(ex.argmax_grid);
  ex.min = std::min(ex.min, gtilde(ex.argmin[0], ex.argmin[1]));
  ex.max = std::max(ex.max, gtilde(ex.argmax[0], ex.argmax[1]));
  return ex;
}

}  // namespace qg
