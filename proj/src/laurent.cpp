#include "qgraph/laurent.hpp"

#include "qgraph/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace qg {

namespace {

void check_nvars(int nvars) {
  if (nvars < 0 || nvars > kMaxVars)
    throw DimensionMismatch("LaurentPoly supports 0.." + std::to_string(kMaxVars) + " variables");
}

void require_same(const LaurentPoly& a, const LaurentPoly& b) {
  if (a.nvars() != b.nvars())
    throw DimensionMismatch("Laurent polynomials in " + std::to_string(a.nvars()) + " and " +
                            std::to_string(b.nvars()) + " variables");
}

Complex ipow(Complex z, int k) {
  if (k < 0) {
    z = 1.0 / z;
    k = -k;
  }
  Complex r = 1.0;
  while (k) {
    if (k & 1) r *= z;
    z *= z;
    k >>= 1;
  }
  return r;
}

}  // namespace

LaurentPoly::LaurentPoly(int nvars) : nvars_(nvars) { check_nvars(nvars); }

LaurentPoly LaurentPoly::constant(int nvars, Complex c) {
  LaurentPoly p(nvars);
  p.add_term(Exponent{}, c);
  return p;
}

LaurentPoly LaurentPoly::monomial(int nvars, const Exponent& e, Complex c) {
  LaurentPoly p(nvars);
  for (int j = nvars; j < kMaxVars; ++j)
    if (e[j] != 0) throw DimensionMismatch("exponent uses a variable beyond nvars");
  p.add_term(e, c);
  return p;
}

LaurentPoly LaurentPoly::variable(int nvars, int index, int power) {
  if (index < 0 || index >= nvars) throw DimensionMismatch("variable index out of range");
  Exponent e{};
  e[index] = power;
  return monomial(nvars, e);
}

bool LaurentPoly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == Exponent{});
}

Complex LaurentPoly::coeff(const Exponent& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? Complex{} : it->second;
}

void LaurentPoly::add_term(const Exponent& e, Complex c) {
  if (c == Complex{}) return;
  auto [it, inserted] = terms_.emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == Complex{}) terms_.erase(it);
  }
}

LaurentPoly& LaurentPoly::prune(double rel_tol) {
  const double cut = rel_tol * max_abs();
  std::erase_if(terms_, [cut](const auto& kv) { return std::abs(kv.second) <= cut; });
  return *this;
}

double LaurentPoly::max_abs() const {
  double m = 0.0;
  for (const auto& [e, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

Complex LaurentPoly::coeff_sum() const {
  Complex s{};
  for (const auto& [e, c] : terms_) s += c;
  return s;
}

Complex LaurentPoly::eval(std::span<const Complex> z) const {
  if (static_cast<int>(z.size()) != nvars_)
    throw DimensionMismatch("evaluation point has " + std::to_string(z.size()) + " coordinates, expected " +
                            std::to_string(nvars_));
  for (auto zi : z)
    if (zi == Complex{}) throw ZeroEvaluationPoint("Laurent polynomial evaluated with a zero coordinate");
  Complex sum{};
  for (const auto& [e, c] : terms_) {
    Complex t = c;
    for (int j = 0; j < nvars_; ++j) t *= ipow(z[j], e[j]);
    sum += t;
  }
  return sum;
}

Exponent LaurentPoly::min_exponent() const {
  Exponent m{};
  if (terms_.empty()) return m;
  m = terms_.begin()->first;
  for (const auto& [e, c] : terms_)
    for (int j = 0; j < nvars_; ++j) m[j] = std::min(m[j], e[j]);
  return m;
}

Exponent LaurentPoly::max_exponent() const {
  Exponent m{};
  if (terms_.empty()) return m;
  m = terms_.begin()->first;
  for (const auto& [e, c] : terms_)
    for (int j = 0; j < nvars_; ++j) m[j] = std::max(m[j], e[j]);
  return m;
}

int LaurentPoly::span(int j) const {
  if (terms_.empty()) return -1;
  return max_exponent()[j] - min_exponent()[j];
}

LaurentPoly LaurentPoly::shifted(const Exponent& by) const {
  LaurentPoly out(nvars_);
  for (const auto& [e, c] : terms_) {
    Exponent f = e;
    for (int j = 0; j < nvars_; ++j) f[j] += by[j];
    out.terms_.emplace(f, c);
  }
  return out;
}

LaurentPoly LaurentPoly::inverted() const {
  LaurentPoly out(nvars_);
  for (const auto& [e, c] : terms_) {
    Exponent f{};
    for (int j = 0; j < nvars_; ++j) f[j] = -e[j];
    out.terms_.emplace(f, c);
  }
  return out;
}

LaurentPoly LaurentPoly::conj_coeffs() const {
  LaurentPoly out(nvars_);
  for (const auto& [e, c] : terms_) out.terms_.emplace(e, std::conj(c));
  return out;
}

LaurentPoly& LaurentPoly::operator+=(const LaurentPoly& o) {
  require_same(*this, o);
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return prune();
}

LaurentPoly& LaurentPoly::operator-=(const LaurentPoly& o) {
  require_same(*this, o);
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return prune();
}

LaurentPoly& LaurentPoly::operator*=(Complex c) {
  if (c == Complex{}) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, v] : terms_) v *= c;
  return *this;
}

std::string LaurentPoly::to_text(int precision) const {
  std::ostringstream os;
  os.precision(precision);
  for (const auto& [e, c] : terms_) {
    os << '(' << c.real() << ", " << c.imag() << ") *";
    if (nvars_ == 0) os << " 1";
    for (int j = 0; j < nvars_; ++j) os << " z" << (j + 1) << '^' << e[j];
    os << '\n';
  }
  return os.str();
}

LaurentPoly operator+(LaurentPoly a, const LaurentPoly& b) { return a += b; }
LaurentPoly operator-(LaurentPoly a, const LaurentPoly& b) { return a -= b; }
LaurentPoly operator-(LaurentPoly a) { return a *= -1.0; }
LaurentPoly operator*(LaurentPoly a, Complex c) { return a *= c; }
LaurentPoly operator*(Complex c, LaurentPoly a) { return a *= c; }

LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b) {
  require_same(a, b);
  LaurentPoly out(a.nvars());
  for (const auto& [ea, ca] : a.terms())
    for (const auto& [eb, cb] : b.terms()) {
      Exponent e{};
      for (int j = 0; j < a.nvars(); ++j) e[j] = ea[j] + eb[j];
      out.add_term(e, ca * cb);
    }
  return out.prune();
}

LaurentPoly pow(const LaurentPoly& p, int k) {
  if (k < 0) throw DimensionMismatch("negative power of a Laurent polynomial");
  LaurentPoly r = LaurentPoly::constant(p.nvars(), 1.0);
  for (int i = 0; i < k; ++i) r = r * p;
  return r;
}

double rel_distance(const LaurentPoly& a, const LaurentPoly& b) {
  require_same(a, b);
  const double scale = std::max(a.max_abs(), b.max_abs());
  if (scale == 0.0) return 0.0;
  double worst = 0.0;
  for (const auto& [e, c] : a.terms()) worst = std::max(worst, std::abs(c - b.coeff(e)));
  for (const auto& [e, c] : b.terms())
    if (!a.terms().count(e)) worst = std::max(worst, std::abs(c));
  return worst / scale;
}

LaurentMatrix::LaurentMatrix(std::size_t n, int nvars) : n_(n), nvars_(nvars), entries_(n * n, LaurentPoly(nvars)) {}

std::vector<std::vector<Complex>> LaurentMatrix::eval(std::span<const Complex> z) const {
  std::vector<std::vector<Complex>> out(n_, std::vector<Complex>(n_));
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) out[i][j] = (*this)(i, j).eval(z);
  return out;
}

ZetaFit lp_fit_in_zeta(const LaurentPoly& d, const LaurentPoly& zeta, int max_deg) {
  require_same(d, zeta);
  if (max_deg < 0) throw RankDeficient("max_deg must be non-negative");

  std::vector<LaurentPoly> powers;
  powers.reserve(max_deg + 1);
  powers.push_back(LaurentPoly::constant(d.nvars(), 1.0));
  for (int k = 1; k <= max_deg; ++k) powers.push_back(powers.back() * zeta);

  std::map<Exponent, int> rows;
  for (const auto& [e, c] : d.terms()) rows.emplace(e, 0);
  for (const auto& p : powers)
    for (const auto& [e, c] : p.terms()) rows.emplace(e, 0);
  int r = 0;
  for (auto& [e, idx] : rows) idx = r++;

  const int ncols = max_deg + 1;
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(r, ncols);
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(r);
  Eigen::VectorXd colscale(ncols);
  for (int k = 0; k < ncols; ++k) {
    const double s = powers[k].max_abs();
    if (s == 0.0) throw RankDeficient("zeta^" + std::to_string(k) + " vanishes");
    colscale[k] = s;
    for (const auto& [e, c] : powers[k].terms()) a(rows[e], k) = c / s;
  }
  for (const auto& [e, c] : d.terms()) rhs[rows[e]] = c;

  Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(a);
  qr.setThreshold(1e-10);
  if (qr.rank() < ncols)
    throw RankDeficient("powers of zeta up to degree " + std::to_string(max_deg) +
                        " are linearly dependent (rank " + std::to_string(qr.rank()) + ")");
  Eigen::VectorXcd sol = qr.solve(rhs);

  ZetaFit fit;
  fit.coeffs.resize(ncols);
  for (int k = 0; k < ncols; ++k) fit.coeffs[k] = sol[k] / colscale[k];

  const double dn = d.max_abs();
  const Eigen::VectorXcd res = a * sol - rhs;
  const double rn = res.size() ? res.cwiseAbs().maxCoeff() : 0.0;
  fit.residual = dn > 0.0 ? rn / dn : rn;

  // coefficients of D carry noise of relative size max(1e-14, residual);
  // row k of the pseudo-inverse carries it into a_k
  const Eigen::MatrixXcd pinv = qr.solve(Eigen::MatrixXcd::Identity(r, r));
  const double eps_d = std::max(1e-14, fit.residual);
  fit.term_size.resize(ncols);
  fit.noise.resize(ncols);
  for (int k = 0; k < ncols; ++k) {
    fit.term_size[k] = dn > 0.0 ? std::abs(sol[k]) / dn : 0.0;
    fit.noise[k] = pinv.row(k).norm() * eps_d;
  }
  return fit;
}

}  // namespace qg
