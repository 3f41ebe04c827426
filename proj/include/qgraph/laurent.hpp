#pragma once

// Sparse multivariate Laurent polynomials with complex coefficients.

#include <array>
#include <complex>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace qg {

using Complex = std::complex<double>;

inline constexpr int kMaxVars = 4;
using Exponent = std::array<int, kMaxVars>;

// Coefficients below this fraction of the largest modulus are dropped.
inline constexpr double kDropTolerance = 1e-12;

class LaurentPoly {
 public:
  using TermMap = std::map<Exponent, Complex>;

  explicit LaurentPoly(int nvars = 0);

  static LaurentPoly constant(int nvars, Complex c);
  static LaurentPoly monomial(int nvars, const Exponent& e, Complex c = 1.0);
  // z_index^power
  static LaurentPoly variable(int nvars, int index, int power = 1);

  int nvars() const { return nvars_; }
  const TermMap& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;

  Complex coeff(const Exponent& e) const;
  // Accumulates without pruning; exact zeros are erased.
  void add_term(const Exponent& e, Complex c);
  LaurentPoly& prune(double rel_tol = kDropTolerance);

  double max_abs() const;
  Complex coeff_sum() const;
  Complex eval(std::span<const Complex> z) const;

  // Componentwise min/max exponent over the support (zeros for the zero poly).
  Exponent min_exponent() const;
  Exponent max_exponent() const;
  // max - min in variable j; -1 for the zero polynomial.
  int span(int j) const;

  LaurentPoly shifted(const Exponent& by) const;
  // p(z^{-1})
  LaurentPoly inverted() const;
  LaurentPoly conj_coeffs() const;

  LaurentPoly& operator+=(const LaurentPoly& o);
  LaurentPoly& operator-=(const LaurentPoly& o);
  LaurentPoly& operator*=(Complex c);

  // Deterministic "coeff * z1^a z2^b" lines in lexicographic exponent order.
  std::string to_text(int precision = 12) const;

 private:
  int nvars_;
  TermMap terms_;
};

LaurentPoly operator+(LaurentPoly a, const LaurentPoly& b);
LaurentPoly operator-(LaurentPoly a, const LaurentPoly& b);
LaurentPoly operator-(LaurentPoly a);
LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b);
LaurentPoly operator*(LaurentPoly a, Complex c);
LaurentPoly operator*(Complex c, LaurentPoly a);
LaurentPoly pow(const LaurentPoly& p, int k);

// max |a - b| / max(|a|, |b|) over coefficients; 0 when both are zero.
double rel_distance(const LaurentPoly& a, const LaurentPoly& b);

class LaurentMatrix {
 public:
  LaurentMatrix() = default;
  LaurentMatrix(std::size_t n, int nvars);

  std::size_t size() const { return n_; }
  int nvars() const { return nvars_; }
  LaurentPoly& operator()(std::size_t i, std::size_t j) { return entries_[i * n_ + j]; }
  const LaurentPoly& operator()(std::size_t i, std::size_t j) const { return entries_[i * n_ + j]; }

  std::vector<std::vector<Complex>> eval(std::span<const Complex> z) const;

 private:
  std::size_t n_ = 0;
  int nvars_ = 0;
  std::vector<LaurentPoly> entries_;
};

// Determinant by evaluation on a root-of-unity grid and inverse DFT.
LaurentPoly lp_det(const LaurentMatrix& m);

struct ZetaFit {
  std::vector<Complex> coeffs;  // a_0 .. a_max_deg
  double residual = 0.0;        // max-norm of D - sum a_k zeta^k relative to D
  // |a_k| max|zeta^k| / max|D| and the size the coefficient noise of D
  // induces in it through the least-squares solve
  std::vector<double> term_size;
  std::vector<double> noise;
};

// Least-squares D ~ sum_k a_k zeta^k; throws RankDeficient when the powers of
// zeta are linearly dependent.
ZetaFit lp_fit_in_zeta(const LaurentPoly& d, const LaurentPoly& zeta, int max_deg);

}  // namespace qg
