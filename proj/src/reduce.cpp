#include "qgraph/reduce.hpp"

#include "qgraph/errors.hpp"
#include "qgraph/spectral.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <sstream>

namespace qg {

JoinCheck join_dispersion(const PeriodicGraph& g1, const std::string& v1, const PeriodicGraph& g2,
                          const std::string& v2, double lambda, std::optional<double> alpha_override, double tol) {
  const PeriodicGraph joined = single_vertex_join(g1, g2, {v1, v2, alpha_override});
  const LaurentPoly d1 = dispersion(g1, lambda);
  const LaurentPoly d2 = dispersion(g2, lambda);
  const LaurentPoly d1v = dispersion(dirichlet_at_orbit(g1, v1), lambda);
  const LaurentPoly d2v = dispersion(dirichlet_at_orbit(g2, v2), lambda);

  JoinCheck jc;
  jc.formula = d1 * d2v + d1v * d2;
  if (alpha_override) {
    // the diagonal carries -alpha, so raising alpha lowers the merged entry
    const double extra = *alpha_override - g1.vertex(v1).condition.alpha - g2.vertex(v2).condition.alpha;
    jc.formula -= (d1v * d2v) * extra;
  }
  jc.direct = dispersion(joined, lambda);
  jc.rel_err = rel_distance(jc.formula, jc.direct);
  if (jc.rel_err > tol) {
    std::ostringstream os;
    os << "join identity off by " << jc.rel_err << " (relative) at lambda=" << lambda;
    throw JoinIdentityViolation(os.str());
  }
  return jc;
}

namespace {

bool root_less(Complex a, Complex b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

}  // namespace

std::vector<Complex> poly_roots(const std::vector<Complex>& coeffs) {
  int n = static_cast<int>(coeffs.size()) - 1;
  while (n > 0 && coeffs[n] == Complex{}) --n;
  if (n <= 0) return {};
  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) comp(i, n - 1) = -coeffs[i] / coeffs[n];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
  std::vector<Complex> r(es.eigenvalues().data(), es.eigenvalues().data() + n);
  std::sort(r.begin(), r.end(), root_less);
  return r;
}

constexpr double kEps = std::numeric_limits<double>::epsilon();

ZetaStructure zeta_components(const LaurentPoly& d, const LaurentPoly& zeta, int max_deg) {
  if (max_deg < 1) throw RankDeficient("max_deg must be at least 1");
  const ZetaFit fit = lp_fit_in_zeta(d, zeta, max_deg);
  if (fit.residual > 1e-6) {
    std::ostringstream os;
    os << "dispersion is not a polynomial in zeta up to degree " << max_deg << " (residual " << fit.residual << ")";
    throw StructureNotFound(os.str());
  }

  ZetaStructure zs;
  zs.zeta = zeta;
  zs.residual = fit.residual;
  // below the spectrum the top coefficients decay geometrically, so a term
  // counts once it clears the noise the fit itself propagates into it
  for (int k = 0; k <= max_deg; ++k)
    if (fit.term_size[k] > std::max(1e-15, 10.0 * fit.noise[k])) zs.degree = k;
  zs.coeffs.assign(fit.coeffs.begin(), fit.coeffs.begin() + zs.degree + 1);
  zs.roots = poly_roots(zs.coeffs);

  // pseudozero test at the real part: |p(x)| against the noise the fit
  // carries into each coefficient plus the rounding of the evaluation
  std::vector<double> da(zs.degree + 1);
  {
    LaurentPoly pk = LaurentPoly::constant(d.nvars(), 1.0);
    for (int k = 0; k <= zs.degree; ++k) {
      da[k] = fit.noise[k] * d.max_abs() / pk.max_abs() + 4.0 * kEps * std::abs(zs.coeffs[k]);
      pk = pk * zeta;
    }
  }
  for (Complex r : zs.roots) {
    const double x = r.real();
    Complex px = 0.0;
    double eta = 0.0, xk = 1.0;
    for (int k = zs.degree; k >= 0; --k) px = px * x + zs.coeffs[k];
    for (int k = 0; k <= zs.degree; ++k, xk *= std::abs(x)) eta += da[k] * xk;
    zs.real_within_noise.push_back(std::abs(px) <= 10.0 * eta);
  }

  for (Complex r : zs.roots) {
    auto it = std::find_if(zs.clusters.begin(), zs.clusters.end(), [&](const RootCluster& c) {
      return std::abs(c.value - r) <= 1e-6 * std::max(1.0, std::abs(r));
    });
    if (it == zs.clusters.end()) {
      zs.clusters.push_back({r, 1});
    } else {
      it->value = (it->value * static_cast<double>(it->multiplicity) + r) / static_cast<double>(it->multiplicity + 1);
      ++it->multiplicity;
    }
  }
  return zs;
}

void check_isospectral_layers(const std::vector<std::vector<Potential>>& layer_edges, Interval window, double tol) {
  if (layer_edges.empty()) return;
  std::vector<std::vector<double>> ref;
  for (const auto& p : layer_edges[0]) ref.push_back(dirichlet_zeros(p, window).zeros);
  for (std::size_t j = 1; j < layer_edges.size(); ++j) {
    if (layer_edges[j].size() != layer_edges[0].size())
      throw IsospectralityViolation(j, 0, "layer has a different number of edges");
    for (std::size_t i = 0; i < layer_edges[j].size(); ++i) {
      const auto z = dirichlet_zeros(layer_edges[j][i], window).zeros;
      if (z.size() != ref[i].size())
        throw IsospectralityViolation(j, i,
                                      std::to_string(z.size()) + " Dirichlet eigenvalues in the window, expected " +
                                          std::to_string(ref[i].size()));
      for (std::size_t k = 0; k < z.size(); ++k)
        if (std::abs(z[k] - ref[i][k]) > tol) {
          std::ostringstream os;
          os << "Dirichlet eigenvalue " << z[k] << " differs from " << ref[i][k];
          throw IsospectralityViolation(j, i, os.str());
        }
    }
  }
}

LaurentPoly layer_w(const Type2Layer& layer, int d, double lambda) {
  LaurentPoly w(d);
  for (std::size_t i = 0; i < layer.edges.size(); ++i) {
    const auto t = transfer_matrix(layer.edges[i], lambda);
    Exponent e{};
    for (int j = 0; j < d; ++j) e[j] = layer.shifts[i][j];
    w.add_term(e, 1.0 / t.s);
  }
  return w;
}

Type2Characteristic type2_characteristic(const Type2Spec& spec, double lambda, bool check_poles) {
  const std::size_t n = spec.n();
  if (n == 0) throw DimensionMismatch("type-2 stack needs at least one layer");
  if (spec.connector1.size() + 1 != n || spec.connector2.size() + 1 != n)
    throw DimensionMismatch("type-2 stack with " + std::to_string(n) + " layers needs " + std::to_string(n - 1) +
                            " connectors per vertex");

  std::vector<std::size_t> poles;
  std::size_t index = 0;
  auto data = [&](const Potential& p) {
    const auto t = transfer_matrix(p, lambda);
    if (t.s == 0.0 || (check_poles && is_pole(t))) poles.push_back(index);
    ++index;
    return t;
  };

  Type2Characteristic out;
  const auto ni = static_cast<Eigen::Index>(n);
  out.b1 = Eigen::MatrixXd::Zero(ni, ni);
  out.b2 = Eigen::MatrixXd::Zero(ni, ni);
  for (std::size_t j = 0; j < n; ++j) {
    const auto& layer = spec.layers[j];
    double b1 = -layer.alpha1, b2 = -layer.alpha2;
    for (std::size_t i = 0; i < layer.edges.size(); ++i) {
      const auto t = data(layer.edges[i]);
      if (j == 0 && i == 0) out.s0 = t.s;
      b1 -= t.c / t.s;
      b2 -= t.sp / t.s;
    }
    out.b1(j, j) += b1;
    out.b2(j, j) += b2;
  }
  auto add_chain = [&](Eigen::MatrixXd& b, const std::vector<Potential>& chain) {
    for (std::size_t j = 0; j + 1 < n; ++j) {
      const auto t = data(chain[j]);
      const auto a = static_cast<Eigen::Index>(j);
      b(a, a) -= t.c / t.s;
      b(a + 1, a + 1) -= t.sp / t.s;
      b(a, a + 1) += 1.0 / t.s;
      b(a + 1, a) += 1.0 / t.s;
    }
  };
  add_chain(out.b1, spec.connector1);
  add_chain(out.b2, spec.connector2);
  if (!poles.empty()) throw PoleAtLambda(lambda, poles);

  out.delta = out.s0 * out.s0 * out.b1 * out.b2;
  Eigen::EigenSolver<Eigen::MatrixXd> es(out.delta, false);
  for (Eigen::Index i = 0; i < ni; ++i) {
    const Complex m = es.eigenvalues()[i];
    out.mu.push_back(m);
    if (std::abs(m.imag()) > 1e-8 * (1.0 + std::abs(m))) {
      std::ostringstream os;
      os << "eigenvalue " << m << " of the characteristic matrix is not real at lambda=" << lambda;
      out.warnings.push_back(os.str());
    }
  }
  std::sort(out.mu.begin(), out.mu.end(), root_less);
  return out;
}

std::string PoleMoveReport::to_json() const {
  nlohmann::json j{{"identity", "s1*s2*D_dot = sign*s*D"},
                   {"samples", samples},
                   {"max_rel_err", max_rel_err},
                   {"sign", sign}};
  return j.dump();
}

PoleMoveReport verify_pole_move(const PeriodicGraph& g, std::size_t e, double t,
                                const std::vector<PoleMoveSample>& samples) {
  const PeriodicGraph dotted = subdivide_edge(g, e, t);
  const Potential& pot = g.edges()[e].potential;
  const auto [p1, p2] = pot.split_at(t * pot.total_length());

  PoleMoveReport rep;
  for (const auto& smp : samples) {
    const auto te = transfer_matrix(pot, smp.lambda);
    const auto t1 = transfer_matrix(p1, smp.lambda);
    const auto t2 = transfer_matrix(p2, smp.lambda);
    if (is_pole(te) || is_pole(t1) || is_pole(t2)) {
      std::ostringstream os;
      os << "lambda=" << smp.lambda << " is a Dirichlet eigenvalue of the split edge or one of its parts";
      throw SampleAtPole(os.str());
    }
    Complex d, dd;
    try {
      d = dispersion_at(g, smp.lambda, smp.z);
      dd = dispersion_at(dotted, smp.lambda, smp.z);
    } catch (const PoleAtLambda& p) {
      throw SampleAtPole(std::string("sample hits a pole: ") + p.what());
    }
    const Complex lhs = t1.s * t2.s * dd;
    const Complex rhs = te.s * d;
    const double scale = std::max(std::abs(lhs), std::abs(rhs));
    if (rep.sign == 0 && scale > 0.0) rep.sign = (lhs / rhs).real() >= 0.0 ? 1 : -1;
    const double err = scale > 0.0 ? std::abs(lhs - static_cast<double>(rep.sign) * rhs) / scale : 0.0;
    rep.errors.push_back(err);
    rep.max_rel_err = std::max(rep.max_rel_err, err);
    ++rep.samples;
  }
  return rep;
}

LaurentMatrix build_section6_example(Section6 which, const Section6Coeffs& k) {
  auto cst = [](double v) { return LaurentPoly::constant(2, v); };
  auto z = [](int j, int p) { return LaurentPoly::variable(2, j, p); };
  const LaurentPoly one = cst(1.0);

  if (which == Section6::Tripartite) {
    LaurentMatrix m(6, 2);
    const double is = 1.0 / k.s;
    const LaurentPoly a = (one + z(1, 1)) * is, ab = (one + z(1, -1)) * is;
    const LaurentPoly b = (one + z(0, 1)) * is, bb = (one + z(0, -1)) * is;
    for (int h = 0; h < 2; ++h) {
      m(0 + h, 0 + h) = cst(-3.0 * k.c * is);
      m(0 + h, 2 + h) = a;
      m(0 + h, 4 + h) = cst(is);
      m(2 + h, 0 + h) = ab;
      m(2 + h, 2 + h) = cst((-2.0 * k.c - 2.0 * k.sp) * is);
      m(2 + h, 4 + h) = b;
      m(4 + h, 0 + h) = cst(is);
      m(4 + h, 2 + h) = bb;
      m(4 + h, 4 + h) = cst(-3.0 * k.sp * is);
    }
    m(0, 0) += cst(-k.c1 / k.s1);
    m(0, 1) += cst(1.0 / k.s1);
    m(1, 0) += cst(1.0 / k.s1);
    m(1, 1) += cst(-k.sp1 / k.s1);
    m(2, 2) += cst(-k.c2 / k.s2);
    m(2, 3) += cst(1.0 / k.s2);
    m(3, 2) += cst(1.0 / k.s2);
    m(3, 3) += cst(-k.sp2 / k.s2);
    return m;
  }

  LaurentMatrix m(4, 2);
  const double is = 1.0 / k.s;
  const LaurentPoly w = (one + z(0, -1) + z(1, -1)) * is;
  const LaurentPoly wp = (one + z(0, 1) + z(1, 1)) * is;
  m(0, 0) = cst(-3.0 * k.c * is - k.c1 / k.s1);
  m(0, 2) = w;
  m(0, 3) = cst(1.0 / k.s1);
  m(1, 1) = cst(-3.0 * k.c * is - k.c2 / k.s2);
  m(1, 2) = cst(1.0 / k.s2);
  m(1, 3) = w;
  m(2, 0) = wp;
  m(2, 1) = cst(1.0 / k.s2);
  m(2, 2) = cst(-3.0 * k.sp * is - k.sp2 / k.s2);
  m(3, 0) = cst(1.0 / k.s1);
  m(3, 1) = wp;
  m(3, 3) = cst(-3.0 * k.sp * is - k.sp1 / k.s1);
  return m;
}

std::string IrreducibilityReport::summary() const {
  std::ostringstream os;
  os << (verdict.factored ? "Factored" : "NoFactorizationFound") << " residual=" << verdict.residual << " ["
     << verdict.log.summary() << "] specializations=" << (specializations_consistent ? "consistent" : "degenerate");
  return os.str();
}

IrreducibilityReport irreducibility_probe(const LaurentPoly& d, std::uint64_t seed, const ProbeOptions& opts) {
  IrreducibilityReport rep;
  rep.verdict = lp_factor_probe(d, opts);
  if (d.nvars() != 2) return rep;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * 3.14159265358979323846);
  const int full = d.span(0);
  for (int trial = 0; trial < 5; ++trial) {
    const Complex t = std::polar(1.0, ang(rng));
    std::map<int, Complex> uni;
    for (const auto& [e, c] : d.terms()) uni[e[0]] += c * std::pow(t, e[1]);
    double big = 0.0;
    for (const auto& [a, c] : uni) big = std::max(big, std::abs(c));
    int lo = 0, hi = -1;
    bool any = false;
    for (const auto& [a, c] : uni)
      if (std::abs(c) > 1e-9 * big) {
        if (!any) lo = a;
        hi = a;
        any = true;
      }
    const int span = any ? hi - lo : -1;
    rep.specializations.push_back({t, span});
    rep.specializations_consistent &= span == full;
  }
  return rep;
}

}  // namespace qg
