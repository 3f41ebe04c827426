#include "verify.hpp"

#include "qgraph/config.hpp"
#include "qgraph/errors.hpp"
#include "qgraph/random_graph.hpp"
#include "qgraph/reduce.hpp"
#include "qgraph/report.hpp"
#include "qgraph/spectral.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace qg::verify {

namespace {

std::vector<Complex> torus_point(std::mt19937_64& rng, int d) {
  std::uniform_real_distribution<double> k(-std::numbers::pi, std::numbers::pi);
  std::vector<Complex> z(d);
  for (auto& x : z) x = std::polar(1.0, k(rng));
  return z;
}

std::string z_text(const std::vector<Complex>& z) {
  std::ostringstream os;
  os.precision(17);
  os << '[';
  for (std::size_t i = 0; i < z.size(); ++i) os << (i ? ", " : "") << '[' << z[i].real() << ", " << z[i].imag() << ']';
  os << ']';
  return os.str();
}

void print_instance(std::ostream& os, const std::string& label, const PeriodicGraph& g) {
  os << "  " << label << ": " << graph_to_json(g) << '\n';
}

// Hill bands {lambda : |c + s'| <= 2} by scanning and bisection.
std::vector<BandInterval> hill_bands(const Potential& q, Interval window, double step) {
  auto inside = [&](double l) {
    const auto t = transfer_matrix(q, l);
    return std::abs(t.c + t.sp) <= 2.0 ? SampleState::In : SampleState::Out;
  };
  const auto grid = lambda_grid(window, step);
  std::vector<SampleState> st(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) st[i] = inside(grid[i]);
  return merge_bands(grid, st, inside, window, 1e-10, 0);
}

}  // namespace

bool join_suite(std::uint64_t seed, std::ostream& os) {
  os << "join: seed " << seed << '\n';
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> lam(-10.0, 60.0), alpha(-2.0, 2.0);
  int failures = 0;
  double worst = 0.0;
  for (int inst = 0; inst < 100; ++inst) {
    RandomGraphOptions o;
    o.d = 1 + inst % 2;
    o.extra_edges = 1;
    o.max_value = 10.0;
    const PeriodicGraph g1 = random_graph(rng, o), g2 = random_graph(rng, o);
    const auto& v1 = g1.vertices()[std::uniform_int_distribution<std::size_t>(0, g1.vertices().size() - 1)(rng)].id;
    const auto& v2 = g2.vertices()[std::uniform_int_distribution<std::size_t>(0, g2.vertices().size() - 1)(rng)].id;
    const std::optional<double> ov = inst % 3 == 0 ? std::optional<double>(alpha(rng)) : std::nullopt;
    for (int k = 0, got = 0; got < 5 && k < 50; ++k) {
      const double l = lam(rng);
      try {
        const JoinCheck jc = join_dispersion(g1, v1, g2, v2, l, ov, 1e-8);
        worst = std::max(worst, jc.rel_err);
        ++got;
      } catch (const PoleAtLambda&) {
        continue;
      } catch (const JoinIdentityViolation& e) {
        ++failures;
        ++got;
        os << "  FAIL instance " << inst << " lambda=" << fmt_double(l) << ": " << e.what() << '\n';
        print_instance(os, "g1", g1);
        print_instance(os, "g2", g2);
        os << "  v1=" << v1 << " v2=" << v2 << '\n';
      }
    }
  }
  os << "join: 100 pairs, max rel err " << worst << (failures ? ", FAILED " + std::to_string(failures) : ", ok") << '\n';
  return failures == 0;
}

bool pole_suite(std::uint64_t seed, std::ostream& os) {
  os << "pole: seed " << seed << '\n';
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> lam(-10.0, 60.0), tt(0.15, 0.85);
  int failures = 0;
  double worst = 0.0;
  for (int inst = 0; inst < 50; ++inst) {
    RandomGraphOptions o;
    o.d = 1 + inst % 2;
    o.extra_edges = 1;
    o.max_value = 10.0;
    const PeriodicGraph g = random_graph(rng, o);
    const std::size_t e = std::uniform_int_distribution<std::size_t>(0, g.edges().size() - 1)(rng);
    const double t = tt(rng);
    for (int attempt = 0; attempt < 20; ++attempt) {
      std::vector<PoleMoveSample> samples;
      for (int k = 0; k < 4; ++k) samples.push_back({torus_point(rng, g.dim()), lam(rng)});
      try {
        const PoleMoveReport r = verify_pole_move(g, e, t, samples);
        worst = std::max(worst, r.max_rel_err);
        if (!r.holds(1e-8)) {
          ++failures;
          os << "  FAIL instance " << inst << " edge=" << e << " t=" << t << ": " << r.to_json() << '\n';
          print_instance(os, "graph", g);
          for (const auto& s : samples) os << "  lambda=" << fmt_double(s.lambda) << " z=" << z_text(s.z) << '\n';
        }
        break;
      } catch (const SampleAtPole&) {
        continue;
      } catch (const PoleAtLambda&) {
        continue;
      }
    }
  }
  os << "pole: 50 instances, max rel err " << worst << (failures ? ", FAILED " + std::to_string(failures) : ", ok") << '\n';
  return failures == 0;
}

bool hermitian_suite(std::uint64_t seed, std::ostream& os) {
  os << "hermitian: seed " << seed << '\n';
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> lam(-10.0, 60.0);
  int failures = 0;
  for (int inst = 0; inst < 50; ++inst) {
    RandomGraphOptions o;
    o.d = 1 + inst % 2;
    const PeriodicGraph g = random_graph(rng, o);
    const double l = lam(rng);
    const auto z = torus_point(rng, g.dim());
    try {
      const auto a = spectral_matrix_at(g, l, z);
      double scale = 0.0, asym = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j) {
          scale = std::max(scale, std::abs(a[i][j]));
          asym = std::max(asym, std::abs(a[i][j] - std::conj(a[j][i])));
        }
      const Complex det = dispersion_at(g, l, z);
      if (asym > 1e-12 * scale || std::abs(det.imag()) > 1e-8 * std::max(1.0, std::abs(det))) {
        ++failures;
        os << "  FAIL instance " << inst << " lambda=" << fmt_double(l) << " z=" << z_text(z) << " asym=" << asym
           << " imD=" << det.imag() << '\n';
        print_instance(os, "graph", g);
      }
    } catch (const PoleAtLambda&) {
      continue;
    }
  }
  os << "hermitian: 50 instances" << (failures ? ", FAILED " + std::to_string(failures) : ", ok") << '\n';
  return failures == 0;
}

bool hill_suite(std::ostream& os) {
  const Interval window{-20.0, 120.0};
  bool ok = true;
  const Potential q0 = Potential::well(-16.0, 1.0 / 3.0, 2.0 / 3.0);
  const std::pair<const char*, Potential> cases[] = {{"q0", q0}, {"q=0", Potential::zero()}};
  for (const auto& [name, q] : cases) {
    StackSpec ss;
    LayerSpec ls;
    ls.q.fill(q);
    ss.layers.push_back({ls, Shift::A});
    const StackModel m(ss);
    const auto got = union_bands(bands(m, window, 0.05).bands, 1e-9);
    const auto want = union_bands(hill_bands(q, window, 0.05), 1e-9);
    double worst = 0.0;
    bool same = got.size() == want.size();
    for (std::size_t i = 0; same && i < got.size(); ++i)
      worst = std::max({worst, std::abs(got[i].lo - want[i].lo), std::abs(got[i].hi - want[i].hi)});
    const bool pass = same && worst <= 1e-6;
    os << "hill: " << name << ' ' << got.size() << " bands vs " << want.size()
       << ", max edge gap " << worst << (pass ? ", ok" : ", FAILED") << '\n';
    ok = ok && pass;
  }
  return ok;
}

bool section6_suite(std::uint64_t seed, std::ostream& os) {
  os << "section6: seed " << seed << '\n';
  bool ok = true;
  for (auto which : {Section6::Tripartite, Section6::CrossedBilayer}) {
    const LaurentPoly d = lp_det(build_section6_example(which));
    const IrreducibilityReport r = irreducibility_probe(d, seed);
    const char* name = which == Section6::Tripartite ? "tripartite" : "crossed-bilayer";
    os << "section6: " << name << ' ' << r.summary() << '\n';
    if (r.verdict.factored) {
      ok = false;
      os << "  FAIL " << name << " factored, residual " << r.verdict.residual << '\n';
    }
  }
  // control: G = (1 + z1 + z2)(1 + 1/z1 + 1/z2) must be found
  LaurentPoly w(2);
  w.add_term({0, 0}, 1.0);
  w.add_term({1, 0}, 1.0);
  w.add_term({0, 1}, 1.0);
  ProbeOptions po;
  po.seed = seed;
  const FactorVerdict fv = lp_factor_probe(w * w.inverted(), po);
  os << "section6: control G " << (fv.factored ? "Factored" : "NoFactorizationFound") << " [" << fv.log.summary()
     << "]\n";
  return ok && fv.factored;
}

bool graph_self_check(const PeriodicGraph& g, std::uint64_t seed, std::ostream& os) {
  os << "self-check: seed " << seed << '\n';
  const auto rep = validate(g);
  if (!rep.ok()) {
    os << rep.text();
    return false;
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> lam(-10.0, 60.0);
  bool ok = true;
  for (int k = 0; k < 20; ++k) {
    const double l = lam(rng);
    const auto z = torus_point(rng, g.dim());
    try {
      const Complex det = dispersion_at(g, l, z);
      if (std::abs(det.imag()) > 1e-8 * std::max(1.0, std::abs(det))) {
        ok = false;
        os << "  FAIL non-real dispersion at lambda=" << fmt_double(l) << " z=" << z_text(z) << '\n';
      }
    } catch (const PoleAtLambda&) {
    }
  }
  for (std::size_t e = 0; e < g.edges().size(); ++e) {
    for (int attempt = 0; attempt < 10; ++attempt) {
      std::vector<PoleMoveSample> s;
      for (int k = 0; k < 3; ++k) s.push_back({torus_point(rng, g.dim()), lam(rng)});
      try {
        const auto r = verify_pole_move(g, e, 0.5, s);
        if (!r.holds(1e-8)) {
          ok = false;
          os << "  FAIL pole move on edge " << e << ": " << r.to_json() << '\n';
        }
        break;
      } catch (const SampleAtPole&) {
      } catch (const PoleAtLambda&) {
      }
    }
  }
  os << "self-check: " << (ok ? "ok" : "FAILED") << '\n';
  return ok;
}

bool stack_self_check(const StackSpec& ss, std::uint64_t seed, std::ostream& os) {
  os << "self-check: seed " << seed << '\n';
  const StackModel m(ss);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> lam(-10.0, 60.0);
  bool ok = graph_self_check(m.graph(), seed, os);
  int done = 0;
  double worst = 0.0;
  for (int k = 0; k < 200 && done < 20; ++k) {
    const double l = lam(rng);
    try {
      const LaurentPoly d = dispersion(m.graph(), l);
      const ZetaStructure zs = zeta_components(d, m.zeta(l), static_cast<int>(m.components()));
      worst = std::max(worst, zs.residual);
      if (zs.degree != static_cast<int>(m.components())) {
        ok = false;
        os << "  FAIL zeta degree " << zs.degree << " at lambda=" << fmt_double(l) << '\n';
      }
      ++done;
    } catch (const PoleAtLambda&) {
    } catch (const StructureNotFound& e) {
      ok = false;
      ++done;
      os << "  FAIL " << e.what() << " at lambda=" << fmt_double(l) << '\n';
    }
  }
  os << "self-check: zeta structure at " << done << " energies, max residual " << worst << (ok ? ", ok" : ", FAILED")
     << '\n';
  return ok;
}

}  // namespace qg::verify
