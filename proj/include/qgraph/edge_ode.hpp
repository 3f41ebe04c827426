#pragma once

// Transfer matrices and Dirichlet-to-Neumann data for -u'' + q(x) u = lambda u
// on a single edge with a piecewise-constant potential.

#include <Eigen/Core>

#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace qg {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
  bool contains(double x) const { return x >= lo && x <= hi; }
};

struct Segment {
  double length = 0.0;
  double value = 0.0;
  bool operator==(const Segment&) const = default;
};

class Potential {
 public:
  Potential() : Potential(zero()) {}
  explicit Potential(std::vector<Segment> segments);

  static Potential zero(double length = 1.0);
  static Potential constant(double value, double length = 1.0);
  // value * chi_[a,b] on [0, length]; a and b are fractions of the length.
  static Potential well(double value, double a, double b, double length = 1.0);

  const std::vector<Segment>& segments() const { return segments_; }
  double total_length() const { return total_length_; }
  // Value at position x in [0, total_length]; right-continuous at breakpoints.
  double value_at(double x) const;
  bool is_palindrome(double tol = 1e-12) const;

  // Cut at x in (0, total_length); segments straddling x are split.
  std::pair<Potential, Potential> split_at(double x) const;
  Potential scaled_to(double length) const;

  bool operator==(const Potential&) const = default;

 private:
  std::vector<Segment> segments_;
  double total_length_ = 0.0;
};

Potential reverse_potential(const Potential& pot);

// Entries of the transfer matrix T = [[c, s], [cp, sp]] mapping
// (u(0), u'(0)) to (u(L), u'(L)). The energy is real, so are the entries.
struct EdgeSpectralData {
  double c = 1.0;
  double s = 0.0;
  double cp = 0.0;
  double sp = 1.0;
  double lambda = 0.0;

  // c sp - s cp with the cancellation error compensated by fma
  double det() const {
    const double w = s * cp;
    return std::fma(c, sp, -w) + std::fma(-s, cp, w);
  }
  Eigen::Matrix2d matrix() const;
};

EdgeSpectralData transfer_matrix(const Potential& pot, double lambda);

// Fixed-step RK4 for the two fundamental solutions. Steps are distributed
// over segments in proportion to their length so that every step lies inside
// one segment. Independent of transfer_matrix; used as its oracle.
EdgeSpectralData transfer_matrix_ode(const Potential& pot, double lambda, int steps);

double pole_tolerance(double lambda);
bool is_pole(const EdgeSpectralData& esd);

struct DirichletZeros {
  std::vector<double> zeros;
  std::vector<std::string> warnings;
};

// Roots of s(lambda) in the window, bracketed on a uniform scan grid and
// bisected to 1e-9.
DirichletZeros dirichlet_zeros(const Potential& pot, Interval window, double scan_step = 0.01);

// (1/s) [[-c, 1], [1, -s']]; throws PoleAtLambda when |s| is below tolerance.
Eigen::Matrix2d dtn_edge(const EdgeSpectralData& esd);

}  // namespace qg
