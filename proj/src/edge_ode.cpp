#include "qgraph/edge_ode.hpp"

#include "qgraph/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace qg {

PoleAtLambda::PoleAtLambda(double lambda, std::vector<std::size_t> edges)
    : Error([&] {
        std::ostringstream os;
        os << "pole at lambda=" << lambda << " (edges";
        for (auto e : edges) os << ' ' << e;
        os << ')';
        return os.str();
      }()),
      lambda_(lambda),
      edges_(std::move(edges)) {}

IsospectralityViolation::IsospectralityViolation(std::size_t layer, std::size_t edge,
                                                 const std::string& detail)
    : Error("isospectrality violated at layer " + std::to_string(layer) + ", edge " +
            std::to_string(edge) + ": " + detail),
      layer_(layer),
      edge_(edge) {}

ParseError::ParseError(std::string where, const std::string& what)
    : Error(where + ": " + what), where_(std::move(where)) {}

Potential::Potential(std::vector<Segment> segments) : segments_(std::move(segments)) {
  if (segments_.empty()) throw InvalidPotential("potential has no segments");
  for (const auto& seg : segments_) {
    if (!(seg.length > 0.0) || !std::isfinite(seg.length))
      throw InvalidPotential("segment length must be positive and finite");
    if (!std::isfinite(seg.value)) throw InvalidPotential("segment value must be finite");
  }
  total_length_ = std::accumulate(segments_.begin(), segments_.end(), 0.0,
                                  [](double acc, const Segment& s) { return acc + s.length; });
}

Potential Potential::zero(double length) { return Potential({{length, 0.0}}); }

Potential Potential::constant(double value, double length) { return Potential({{length, value}}); }

Potential Potential::well(double value, double a, double b, double length) {
  if (!(a >= 0.0 && a < b && b <= 1.0))
    throw InvalidPotential("well bounds must satisfy 0 <= a < b <= 1");
  std::vector<Segment> segs;
  if (a > 0.0) segs.push_back({a * length, 0.0});
  segs.push_back({(b - a) * length, value});
  if (b < 1.0) segs.push_back({(1.0 - b) * length, 0.0});
  return Potential(std::move(segs));
}

double Potential::value_at(double x) const {
  double pos = 0.0;
  for (const auto& seg : segments_) {
    pos += seg.length;
    if (x < pos) return seg.value;
  }
  return segments_.back().value;
}

bool Potential::is_palindrome(double tol) const {
  const std::size_t n = segments_.size();
  for (std::size_t i = 0; i < n / 2 + 1 && i < n; ++i) {
    const auto& a = segments_[i];
    const auto& b = segments_[n - 1 - i];
    if (std::abs(a.length - b.length) > tol * total_length_ || std::abs(a.value - b.value) > tol * (1.0 + std::abs(a.value)))
      return false;
  }
  return true;
}

std::pair<Potential, Potential> Potential::split_at(double x) const {
  if (!(x > 0.0 && x < total_length_)) throw InvalidPotential("split point must be interior");
  const double snap = 1e-12 * total_length_;
  std::vector<Segment> left, right;
  double pos = 0.0;
  for (const auto& seg : segments_) {
    const double end = pos + seg.length;
    if (end <= x + snap) {
      left.push_back(seg);
    } else if (pos >= x - snap) {
      right.push_back(seg);
    } else {
      left.push_back({x - pos, seg.value});
      right.push_back({end - x, seg.value});
    }
    pos = end;
  }
  return {Potential(std::move(left)), Potential(std::move(right))};
}

Potential Potential::scaled_to(double length) const {
  const double f = length / total_length_;
  std::vector<Segment> segs = segments_;
  for (auto& s : segs) s.length *= f;
  return Potential(std::move(segs));
}

Potential reverse_potential(const Potential& pot) {
  std::vector<Segment> segs(pot.segments().rbegin(), pot.segments().rend());
  return Potential(std::move(segs));
}

Eigen::Matrix2d EdgeSpectralData::matrix() const {
  Eigen::Matrix2d m;
  m << c, s, cp, sp;
  return m;
}

namespace {

// cos(sqrt(x)) and sin(sqrt(x))/sqrt(x) for real x of either sign, with a
// Taylor branch near zero.
void cos_sinc(long double x, long double& cs, long double& sn) {
  if (std::abs(x) < 1e-5L) {
    cs = 1.0L - x / 2.0L + x * x / 24.0L - x * x * x / 720.0L + x * x * x * x / 40320.0L;
    sn = 1.0L - x / 6.0L + x * x / 120.0L - x * x * x / 5040.0L + x * x * x * x / 362880.0L;
  } else if (x > 0.0L) {
    const long double r = std::sqrt(x);
    cs = std::cos(r);
    sn = std::sin(r) / r;
  } else {
    const long double r = std::sqrt(-x);
    cs = std::cosh(r);
    sn = std::sinh(r) / r;
  }
}

}  // namespace

EdgeSpectralData transfer_matrix(const Potential& pot, double lambda) {
  // Entries grow like exp(sqrt(q - lambda)) below the spectrum while det T = 1
  // is a difference of their products; extended precision keeps the rounded
  // entries consistent with that.
  long double c = 1.0L, s = 0.0L, cp = 0.0L, sp = 1.0L;
  for (const auto& seg : pot.segments()) {
    const long double k2 = static_cast<long double>(lambda) - seg.value;
    const long double len = seg.length;
    long double cs, sn;
    cos_sinc(k2 * len * len, cs, sn);
    const long double t11 = cs, t12 = len * sn, t21 = -k2 * len * sn, t22 = cs;
    // later segments multiply on the left
    const long double nc = t11 * c + t12 * cp;
    const long double ns = t11 * s + t12 * sp;
    const long double ncp = t21 * c + t22 * cp;
    const long double nsp = t21 * s + t22 * sp;
    c = nc;
    s = ns;
    cp = ncp;
    sp = nsp;
  }
  return {static_cast<double>(c), static_cast<double>(s), static_cast<double>(cp), static_cast<double>(sp), lambda};
}

EdgeSpectralData transfer_matrix_ode(const Potential& pot, double lambda, int steps) {
  if (steps < 1) throw InvalidPotential("steps must be positive");
  // y = (u1, u1', u2, u2')
  double y[4] = {1.0, 0.0, 0.0, 1.0};
  for (const auto& seg : pot.segments()) {
    const int n = std::max(1, static_cast<int>(std::lround(steps * seg.length / pot.total_length())));
    const double h = seg.length / n;
    const double k = seg.value - lambda;
    auto f = [k](const double* in, double* out) {
      out[0] = in[1];
      out[1] = k * in[0];
      out[2] = in[3];
      out[3] = k * in[2];
    };
    double k1[4], k2[4], k3[4], k4[4], tmp[4];
    for (int i = 0; i < n; ++i) {
      f(y, k1);
      for (int j = 0; j < 4; ++j) tmp[j] = y[j] + 0.5 * h * k1[j];
      f(tmp, k2);
      for (int j = 0; j < 4; ++j) tmp[j] = y[j] + 0.5 * h * k2[j];
      f(tmp, k3);
      for (int j = 0; j < 4; ++j) tmp[j] = y[j] + h * k3[j];
      f(tmp, k4);
      for (int j = 0; j < 4; ++j) y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    }
  }
  return {y[0], y[2], y[1], y[3], lambda};
}

double pole_tolerance(double lambda) { return 1e-9 * (1.0 + std::abs(lambda)); }

bool is_pole(const EdgeSpectralData& esd) { return std::abs(esd.s) <= pole_tolerance(esd.lambda); }

DirichletZeros dirichlet_zeros(const Potential& pot, Interval window, double scan_step) {
  if (!std::isfinite(window.lo) || !std::isfinite(window.hi) || window.hi < window.lo)
    throw InvalidPotential("dirichlet_zeros: window must be finite and ordered");
  if (!(scan_step > 0.0)) throw InvalidPotential("dirichlet_zeros: scan step must be positive");

  auto s_at = [&](double lam) { return transfer_matrix(pot, lam).s; };
  auto bisect = [&](double a, double b, double fa) {
    while (b - a > 1e-9) {
      const double m = 0.5 * (a + b);
      const double fm = s_at(m);
      if (fm == 0.0) return m;
      if ((fm < 0.0) == (fa < 0.0)) {
        a = m;
        fa = fm;
      } else {
        b = m;
      }
    }
    return 0.5 * (a + b);
  };

  DirichletZeros out;
  const auto cells = static_cast<std::size_t>(std::ceil(window.width() / scan_step));
  double a = window.lo;
  double fa = s_at(a);
  if (fa == 0.0) out.zeros.push_back(a);
  for (std::size_t i = 0; i < cells; ++i) {
    const double b = std::min(window.hi, window.lo + static_cast<double>(i + 1) * scan_step);
    const double fb = s_at(b);
    const double m = 0.5 * (a + b);
    const double fm = s_at(m);
    const bool left = fa != 0.0 && fm != 0.0 && ((fa < 0.0) != (fm < 0.0));
    const bool right = fm != 0.0 && fb != 0.0 && ((fm < 0.0) != (fb < 0.0));
    if (left && right) {
      std::ostringstream os;
      os << "two zeros of s in scan cell [" << a << ", " << b << "]; refine the scan step";
      out.warnings.push_back(os.str());
      out.zeros.push_back(bisect(a, m, fa));
      out.zeros.push_back(bisect(m, b, fm));
    } else if (left || right || (fa != 0.0 && fb != 0.0 && (fa < 0.0) != (fb < 0.0))) {
      out.zeros.push_back(bisect(a, b, fa));
    } else if (fb == 0.0) {
      out.zeros.push_back(b);
    } else if (fm == 0.0) {
      out.zeros.push_back(m);
    }
    a = b;
    fa = fb;
  }
  std::sort(out.zeros.begin(), out.zeros.end());
  return out;
}

Eigen::Matrix2d dtn_edge(const EdgeSpectralData& esd) {
  if (is_pole(esd)) throw PoleAtLambda(esd.lambda, {});
  Eigen::Matrix2d m;
  m << -esd.c, 1.0, 1.0, -esd.sp;
  return m / esd.s;
}

}  // namespace qg
