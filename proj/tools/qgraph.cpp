// qgraph: command-line front end for the periodic quantum graph solver.

#include "verify.hpp"

#include "qgraph/config.hpp"
#include "qgraph/errors.hpp"
#include "qgraph/graphene.hpp"
#include "qgraph/kernels.hpp"
#include "qgraph/reduce.hpp"
#include "qgraph/report.hpp"
#include "qgraph/spectral.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

namespace fs = std::filesystem;
using namespace qg;

namespace {

constexpr int kExitParse = 2;
constexpr int kExitVerify = 3;
constexpr int kExitPole = 4;

struct Options {
  std::string config;
  std::string potential;
  std::string lambda = "-20:120:0.05";
  std::string window;
  std::optional<double> at;
  std::size_t edge = 0;
  int k_grid = 64;
  int torus_grid = 48;
  std::uint64_t seed = 7;
  std::string out = ".";
  bool svg = false;
  std::string suite = "all";
};

struct LambdaRange {
  Interval window;
  double step;
};

std::vector<double> split_numbers(const std::string& s, std::size_t want, const std::string& flag) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ':')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ParseError(flag, "bad number '" + item + "'");
    }
  }
  if (v.size() != want) throw ParseError(flag, "expected " + std::to_string(want) + " colon-separated numbers");
  return v;
}

LambdaRange lambda_range(const Options& o) {
  const auto v = split_numbers(o.lambda, 3, "--lambda");
  if (!(v[1] > v[0])) throw ParseError("--lambda", "window is empty");
  if (!(v[2] > 0.0)) throw ParseError("--lambda", "step must be positive");
  LambdaRange r{{v[0], v[1]}, v[2]};
  if (!o.window.empty()) {
    const auto w = split_numbers(o.window, 2, "--window");
    if (!(w[1] > w[0])) throw ParseError("--window", "window is empty");
    r.window = {w[0], w[1]};
  }
  return r;
}

ParsedConfig load(const Options& o) {
  if (o.config.empty()) throw ParseError("--config", "a config file is required");
  if (!fs::exists(o.config)) throw ParseError(o.config, "file does not exist");
  return parse_config(o.config);
}

PeriodicGraph graph_of(const ParsedConfig& c) {
  if (auto* g = std::get_if<PeriodicGraph>(&c)) return *g;
  if (auto* s = std::get_if<StackSpec>(&c)) return stack(*s);
  throw ParseError("--config", "expected a graph or stack config");
}

const StackSpec& stack_of(const ParsedConfig& c, const char* cmd) {
  if (auto* s = std::get_if<StackSpec>(&c)) return *s;
  throw ParseError("--config", std::string(cmd) + " needs a stack config");
}

void write_file(const Options& o, const std::string& name, const std::string& body) {
  fs::create_directories(o.out);
  const fs::path p = fs::path(o.out) / name;
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error("cannot write " + p.string());
  f << body;
  std::cout << "wrote " << p.string() << '\n';
}

template <class F>
std::string to_string_with(F&& fn) {
  std::ostringstream os;
  fn(os);
  return os.str();
}

void print_warnings(const std::vector<std::string>& w) {
  for (const auto& s : w) std::cerr << "warning: " << s << '\n';
}

int cmd_transfer(const Options& o) {
  Potential pot;
  if (!o.potential.empty()) {
    pot = parse_potential_text(o.potential, "--potential");
  } else {
    const PeriodicGraph g = graph_of(load(o));
    if (o.edge >= g.edges().size()) throw ParseError("--edge", "edge index out of range");
    pot = g.edges()[o.edge].potential;
  }
  const auto r = lambda_range(o);
  const std::string csv = to_string_with([&](std::ostream& os) {
    os << "lambda,c,s,cp,sp,det\n";
    for (double l : lambda_grid(r.window, r.step)) {
      const auto t = transfer_matrix(pot, l);
      os << fmt_double(l) << ',' << fmt_double(t.c) << ',' << fmt_double(t.s) << ',' << fmt_double(t.cp) << ','
         << fmt_double(t.sp) << ',' << fmt_double(t.det()) << '\n';
    }
  });
  if (o.out == ".")
    std::cout << csv;
  else
    write_file(o, "transfer.csv", csv);
  return 0;
}

int cmd_dispersion(const Options& o) {
  if (!o.at) throw ParseError("--at", "dispersion needs --at <lambda>");
  const PeriodicGraph g = graph_of(load(o));
  const SpectralMatrix sm = spectral_matrix(g, *o.at);
  std::cout << "# lambda = " << fmt_double(*o.at) << ", " << sm.rows.size() << " rows, "
            << sm.severed_edges.size() << " severed edges\n";
  std::cout << dispersion(g, *o.at).to_text();
  return 0;
}

int cmd_bands(const Options& o) {
  const auto cfg = load(o);
  const auto r = lambda_range(o);
  if (auto* g = std::get_if<PeriodicGraph>(&cfg)) {
    const SpectrumScan sc = spectrum_scan(*g, r.window, r.step, o.torus_grid);
    print_warnings(sc.warnings);
    write_file(o, "bands.csv", to_string_with([&](std::ostream& os) { write_bands_csv(os, sc.bands); }));
    return 0;
  }
  const StackModel m(stack_of(cfg, "bands"));
  const BandsResult b = bands(m, r.window, r.step);
  print_warnings(b.warnings);
  write_file(o, "bands.csv", to_string_with([&](std::ostream& os) { write_bands_csv(os, b.bands); }));
  const MuCurves mc = mu_curves(m, r.window, r.step);
  print_warnings(mc.warnings);
  write_file(o, "mu.csv", to_string_with([&](std::ostream& os) { write_mu_csv(os, mc); }));
  if (o.svg) write_file(o, "mu.svg", mu_curves_svg(mc));
  std::cout << b.bands.size() << " band pieces over " << m.components() << " components\n";
  return 0;
}

int cmd_cones(const Options& o) {
  const StackModel m(stack_of(load(o), "cones"));
  const auto r = lambda_range(o);
  const auto cones = cone_scan(m, r.window, r.step);
  write_file(o, "cones.csv", to_string_with([&](std::ostream& os) { write_cones_csv(os, cones); }));
  for (const auto& c : cones)
    std::cout << "mu_" << c.component + 1 << " = 0 at " << fmt_double(c.lambda_star) << ": "
              << cone_class_name(c.classification) << '\n';
  return 0;
}

int cmd_surface(const Options& o) {
  const StackModel m(stack_of(load(o), "surface"));
  const auto r = lambda_range(o);
  const auto pts = dispersion_surface(m, r.window, o.k_grid, std::min(r.step, 0.01));
  write_file(o, "surface.csv", to_string_with([&](std::ostream& os) { write_surface_csv(os, pts); }));
  if (o.svg) {
    // lambda along the k1 = -k2 diagonal, one series per component
    PlotSpec p;
    p.title = "dispersion along k1 = -k2";
    p.xlabel = "k1";
    p.ylabel = "lambda";
    std::map<int, PlotSeries> by;
    for (const auto& q : pts)
      if (std::abs(q.k1 + q.k2) < 1e-12) by[q.component].points.push_back({q.k1, q.lambda});
    for (auto& [c, s] : by) {
      s.name = "branch " + std::to_string(c);
      std::sort(s.points.begin(), s.points.end());
      p.series.push_back(std::move(s));
    }
    write_file(o, "surface.svg", svg_line_plot(p));
  }
  std::cout << pts.size() << " surface points\n";
  return 0;
}

nlohmann::json complex_json(Complex c) { return {c.real(), c.imag()}; }

int cmd_reduce(const Options& o) {
  if (!o.at) throw ParseError("--at", "reduce needs --at <lambda>");
  const auto cfg = load(o);
  nlohmann::json out;
  out["lambda"] = *o.at;
  if (auto* ss = std::get_if<StackSpec>(&cfg)) {
    const StackModel m(*ss);
    const LaurentPoly d = dispersion(m.graph(), *o.at);
    const int n = static_cast<int>(m.components());
    const ZetaStructure zs = zeta_components(d, m.zeta(*o.at), n);
    out["degree"] = zs.degree;
    out["residual"] = zs.residual;
    for (auto c : zs.coeffs) out["coeffs"].push_back(complex_json(c));
    for (auto c : zs.roots) out["roots"].push_back(complex_json(c));
    const double s0 = m.s0(*o.at);
    for (auto c : m.mu(*o.at)) out["mu"].push_back(complex_json(c));
    out["s0"] = s0;
  } else {
    const PeriodicGraph g = graph_of(cfg);
    const LaurentPoly d = dispersion(g, *o.at);
    out["terms"] = d.terms().size();
    if (g.dim() >= 1 && g.dim() <= 2 && !d.is_constant()) {
      try {
        const auto rep = irreducibility_probe(d, o.seed);
        out["factor_probe"] = rep.summary();
      } catch (const SupportTooLarge& e) {
        out["factor_probe"] = std::string("skipped: ") + e.what();
      }
    }
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

int cmd_verify(const Options& o) {
  std::cout << "seed " << o.seed << '\n';
  if (!o.config.empty()) {
    const auto cfg = load(o);
    bool ok = false;
    if (auto* g = std::get_if<PeriodicGraph>(&cfg))
      ok = verify::graph_self_check(*g, o.seed, std::cout);
    else if (auto* s = std::get_if<StackSpec>(&cfg))
      ok = verify::stack_self_check(*s, o.seed, std::cout);
    else
      throw ParseError("--config", "verify needs a graph or stack config");
    return ok ? 0 : kExitVerify;
  }
  const std::string& s = o.suite;
  static const std::set<std::string> known{"join", "pole", "hermitian", "hill", "section6", "all"};
  if (!known.count(s)) throw ParseError("--suite", "unknown suite '" + s + "'");
  bool ok = true;
  if (s == "join" || s == "all") ok = verify::join_suite(o.seed, std::cout) && ok;
  if (s == "pole" || s == "all") ok = verify::pole_suite(o.seed, std::cout) && ok;
  if (s == "hermitian" || s == "all") ok = verify::hermitian_suite(o.seed, std::cout) && ok;
  if (s == "hill" || s == "all") ok = verify::hill_suite(std::cout) && ok;
  if (s == "section6" || s == "all") ok = verify::section6_suite(o.seed, std::cout) && ok;
  std::cout << (ok ? "verify: all passed\n" : "verify: FAILED\n");
  return ok ? 0 : kExitVerify;
}

int dispatch(const std::string& cmd, const Options& o);

int cmd_run(const Options& o) {
  const auto cfg = load(o);
  const auto* rc = std::get_if<RunConfig>(&cfg);
  if (!rc) throw ParseError("--config", "run needs a run config (with a \"command\" key)");
  Options sub = o;
  sub.config = rc->input_path;
  sub.out = rc->output_dir;
  sub.lambda = fmt_double(rc->lambda_window.lo) + ":" + fmt_double(rc->lambda_window.hi) + ":" +
               fmt_double(rc->lambda_step);
  sub.window.clear();
  sub.torus_grid = rc->torus_grid;
  sub.k_grid = rc->k_grid;
  sub.seed = rc->seed;
  sub.svg = rc->svg;
  sub.suite = rc->suite;
  return dispatch(rc->command, sub);
}

int dispatch(const std::string& cmd, const Options& o) {
  if (cmd == "transfer") return cmd_transfer(o);
  if (cmd == "dispersion") return cmd_dispersion(o);
  if (cmd == "bands") return cmd_bands(o);
  if (cmd == "cones") return cmd_cones(o);
  if (cmd == "surface") return cmd_surface(o);
  if (cmd == "reduce") return cmd_reduce(o);
  if (cmd == "verify") return cmd_verify(o);
  if (cmd == "run") return cmd_run(o);
  throw ParseError("command", "unknown command '" + cmd + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qgraph: spectra of periodic quantum graphs and stacked graphene"};
  app.require_subcommand(1);
  app.footer(
      "Exit codes: 0 ok, 2 config/parse error, 3 verification failure, 4 pole at the requested lambda.\n"
      "CSV schemas:\n"
      "  transfer.csv  lambda,c,s,cp,sp,det\n"
      "  bands.csv     component_id,lambda_lo,lambda_hi\n"
      "  mu.csv        lambda,component,re_mu,im_mu\n"
      "  cones.csv     component,lambda_star,classification,mu_prime,mu_second\n"
      "  surface.csv   k1,k2,lambda,component\n"
      "Set QGRAPH_FORCE_SCALAR=1 to disable the AVX2 kernels.");

  Options o;
  auto add_common = [&](CLI::App* c, bool need_config) {
    auto* opt = c->add_option("--config", o.config, "graph, stack or run config (JSON)");
    if (need_config) opt->required();
    c->add_option("--lambda", o.lambda, "lo:hi:step energy grid")->capture_default_str();
    c->add_option("--window", o.window, "lo:hi, overrides the window of --lambda");
    c->add_option("--out", o.out, "output directory")->capture_default_str();
    c->add_option("--seed", o.seed, "seed for randomized checks")->capture_default_str();
  };
  struct Cmd {
    const char* name;
    const char* help;
  };
  const Cmd cmds[] = {{"transfer", "transfer matrix entries over a lambda grid"},
                      {"dispersion", "dispersion function as a Laurent polynomial at --at"},
                      {"bands", "band intervals (and mu curves for stacks)"},
                      {"cones", "zeros of mu and their cone classification"},
                      {"surface", "dispersion surface over a k grid"},
                      {"reduce", "structure in the composite variable at --at"},
                      {"verify", "run verification suites or self-check a config"},
                      {"run", "execute a run config"}};
  std::map<std::string, CLI::App*> sub;
  for (const auto& c : cmds) {
    auto* s = app.add_subcommand(c.name, c.help);
    const std::string n = c.name;
    add_common(s, n != "transfer" && n != "verify");
    sub[n] = s;
  }
  sub["transfer"]->add_option("--potential", o.potential, "zero | const:v | well:depth,a,b");
  sub["transfer"]->add_option("--edge", o.edge, "edge index when --config is given");
  sub["dispersion"]->add_option("--at", o.at, "energy")->required();
  sub["reduce"]->add_option("--at", o.at, "energy")->required();
  for (const char* n : {"bands", "surface"}) sub[n]->add_flag("--svg", o.svg, "also write an SVG plot");
  sub["bands"]->add_option("--torus-grid", o.torus_grid, "torus samples per direction (graph configs)")
      ->check(CLI::Range(8, 4096));
  sub["surface"]->add_option("--k-grid", o.k_grid, "k samples per direction")->check(CLI::Range(2, 4096));
  sub["verify"]
      ->add_option("--suite", o.suite, "join | pole | hermitian | hill | section6 | all")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitParse;
  }

  try {
    for (auto& [name, s] : sub)
      if (s->parsed()) return dispatch(name, o);
  } catch (const ParseError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitParse;
  } catch (const IsospectralityViolation& e) {
    std::cerr << "config error: layer " << e.layer() << " edge " << e.edge() << ": " << e.what() << '\n';
    return kExitParse;
  } catch (const InvalidGraph& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitParse;
  } catch (const PoleAtLambda& e) {
    std::cerr << "pole at lambda " << fmt_double(e.lambda()) << ": " << e.what() << '\n';
    return kExitPole;
  } catch (const StructureNotFound& e) {
    std::cerr << "verification failure: " << e.what() << '\n';
    return kExitVerify;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
