#include "qgraph/config.hpp"

#include "qgraph/errors.hpp"

#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace qg {

using nlohmann::json;

namespace {

std::string child(const std::string& ptr, const std::string& key) { return ptr + "/" + key; }
std::string child(const std::string& ptr, std::size_t i) { return ptr + "/" + std::to_string(i); }

void only_keys(const json& j, const std::string& ptr, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ParseError(ptr.empty() ? "/" : ptr, "expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items())
    if (!ok.count(k)) throw ParseError(child(ptr, k), "unknown key '" + k + "'");
}

const json& need(const json& j, const std::string& ptr, const char* key) {
  if (!j.contains(key)) throw ParseError(child(ptr, key), std::string("missing key '") + key + "'");
  return j.at(key);
}

double num(const json& j, const std::string& ptr) {
  if (!j.is_number()) throw ParseError(ptr, "expected a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& ptr) {
  if (!j.is_number_integer()) throw ParseError(ptr, "expected an integer");
  return j.get<int>();
}

bool boolean(const json& j, const std::string& ptr) {
  if (!j.is_boolean()) throw ParseError(ptr, "expected true or false");
  return j.get<bool>();
}

std::string str(const json& j, const std::string& ptr) {
  if (!j.is_string()) throw ParseError(ptr, "expected a string");
  return j.get<std::string>();
}

double parse_number(std::string s, const std::string& where) {
  auto trim = [](std::string t) {
    const auto a = t.find_first_not_of(" \t");
    const auto b = t.find_last_not_of(" \t");
    return a == std::string::npos ? std::string() : t.substr(a, b - a + 1);
  };
  s = trim(s);
  auto one = [&](const std::string& t) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(t, &used);
    } catch (const std::exception&) {
      throw ParseError(where, "bad number '" + s + "'");
    }
    if (used != t.size()) throw ParseError(where, "bad number '" + s + "'");
    return v;
  };
  const auto slash = s.find('/');
  if (slash == std::string::npos) return one(s);
  const double den = one(trim(s.substr(slash + 1)));
  if (den == 0.0) throw ParseError(where, "zero denominator in '" + s + "'");
  return one(trim(s.substr(0, slash))) / den;
}

Potential parse_potential(const json& j, const std::string& ptr) {
  try {
    if (j.is_string()) return parse_potential_text(j.get<std::string>(), ptr);
    only_keys(j, ptr, {"segments"});
    const json& segs = need(j, ptr, "segments");
    const std::string sp = child(ptr, "segments");
    if (!segs.is_array() || segs.empty()) throw ParseError(sp, "expected a non-empty array of [length, value]");
    std::vector<Segment> out;
    for (std::size_t i = 0; i < segs.size(); ++i) {
      const auto& s = segs[i];
      if (!s.is_array() || s.size() != 2) throw ParseError(child(sp, i), "expected [length, value]");
      out.push_back({num(s[0], child(child(sp, i), 0)), num(s[1], child(child(sp, i), 1))});
    }
    return Potential(std::move(out));
  } catch (const InvalidPotential& e) {
    throw ParseError(ptr, e.what());
  }
}

std::vector<int> parse_shift(const json& j, const std::string& ptr, int d) {
  if (!j.is_array()) throw ParseError(ptr, "shift must be an array of integers");
  if (static_cast<int>(j.size()) != d)
    throw ParseError(ptr, "shift has " + std::to_string(j.size()) + " entries, expected " + std::to_string(d));
  std::vector<int> s;
  for (std::size_t i = 0; i < j.size(); ++i) s.push_back(integer(j[i], child(ptr, i)));
  return s;
}

PeriodicGraph graph_from_json(const json& j) {
  only_keys(j, "", {"d", "vertices", "edges"});
  const int d = integer(need(j, "", "d"), "/d");
  if (d < 0 || d > 4) throw ParseError("/d", "periodicity dimension must be 0..4");
  PeriodicGraph g(d);
  const json& vs = need(j, "", "vertices");
  if (!vs.is_array()) throw ParseError("/vertices", "expected an array");
  for (std::size_t i = 0; i < vs.size(); ++i) {
    const std::string p = child("/vertices", i);
    only_keys(vs[i], p, {"id", "robin", "dirichlet"});
    const std::string id = str(need(vs[i], p, "id"), child(p, "id"));
    if (g.has_vertex(id)) throw ParseError(child(p, "id"), "duplicate vertex id '" + id + "'");
    const bool dir = vs[i].contains("dirichlet") && boolean(vs[i]["dirichlet"], child(p, "dirichlet"));
    if (dir && vs[i].contains("robin")) throw ParseError(p, "a vertex is either robin or dirichlet");
    const double a = vs[i].contains("robin") ? num(vs[i]["robin"], child(p, "robin")) : 0.0;
    g.add_vertex(id, dir ? VertexCondition::dirichlet_condition() : VertexCondition::robin(a));
  }
  const json& es = j.contains("edges") ? j["edges"] : json::array();
  if (!es.is_array()) throw ParseError("/edges", "expected an array");
  for (std::size_t i = 0; i < es.size(); ++i) {
    const std::string p = child("/edges", i);
    only_keys(es[i], p, {"tail", "head", "shift", "potential"});
    const std::string tail = str(need(es[i], p, "tail"), child(p, "tail"));
    const std::string head = str(need(es[i], p, "head"), child(p, "head"));
    if (!g.has_vertex(tail)) throw ParseError(child(p, "tail"), "unknown vertex '" + tail + "'");
    if (!g.has_vertex(head)) throw ParseError(child(p, "head"), "unknown vertex '" + head + "'");
    const auto shift =
        es[i].contains("shift") ? parse_shift(es[i]["shift"], child(p, "shift"), d) : std::vector<int>(d, 0);
    const Potential pot =
        es[i].contains("potential") ? parse_potential(es[i]["potential"], child(p, "potential")) : Potential::zero();
    g.add_edge(tail, head, shift, pot);
  }
  return g;
}

LayerSpec layer_from_json(const json& j, const std::string& p, Shift* shift) {
  only_keys(j, p, {"q", "alpha", "rotated", "shift"});
  LayerSpec ls;
  const json& q = need(j, p, "q");
  const std::string qp = child(p, "q");
  if (q.is_string()) {
    ls.q.fill(parse_potential(q, qp));
  } else if (q.is_array() && q.size() == 3) {
    for (std::size_t i = 0; i < 3; ++i) ls.q[i] = parse_potential(q[i], child(qp, i));
  } else {
    throw ParseError(qp, "expected one potential or three");
  }
  if (j.contains("alpha")) {
    const json& a = j["alpha"];
    const std::string ap = child(p, "alpha");
    if (a.is_number()) {
      ls.alpha = {a.get<double>(), a.get<double>()};
    } else if (a.is_array() && a.size() == 2) {
      ls.alpha = {num(a[0], child(ap, 0)), num(a[1], child(ap, 1))};
    } else {
      throw ParseError(ap, "expected a number or [alpha1, alpha2]");
    }
  }
  if (j.contains("rotated")) ls.rotated = boolean(j["rotated"], child(p, "rotated"));
  if (shift) {
    *shift = Shift::A;
    if (j.contains("shift")) {
      const std::string s = str(j["shift"], child(p, "shift"));
      if (s == "A")
        *shift = Shift::A;
      else if (s == "B")
        *shift = Shift::B;
      else if (s == "C")
        *shift = Shift::C;
      else
        throw ParseError(child(p, "shift"), "shift must be \"A\", \"B\" or \"C\"");
    }
  } else if (j.contains("shift")) {
    throw ParseError(child(p, "shift"), "unknown key 'shift'");
  }
  return ls;
}

ConnectorSpec connector_from_json(const json& j, const std::string& p) {
  if (j.is_array()) {
    if (j.size() != 2) throw ParseError(p, "expected one potential or a pair");
    return {parse_potential(j[0], child(p, 0)), parse_potential(j[1], child(p, 1))};
  }
  if (j.is_object() && (j.contains("q1") || j.contains("q2"))) {
    only_keys(j, p, {"q1", "q2"});
    const Potential q1 = parse_potential(need(j, p, "q1"), child(p, "q1"));
    const Potential q2 = j.contains("q2") ? parse_potential(j["q2"], child(p, "q2")) : q1;
    return {q1, q2};
  }
  const Potential q = parse_potential(j, p);
  return {q, q};
}

StackSpec stack_from_json(const json& j) {
  StackSpec ss;
  if (!j.contains("layers")) {  // a bare layer
    ss.layers.push_back({layer_from_json(j, "", nullptr), Shift::A});
    return ss;
  }
  only_keys(j, "", {"layers", "connectors", "iso_window"});
  const json& ls = j["layers"];
  if (!ls.is_array() || ls.empty()) throw ParseError("/layers", "expected a non-empty array");
  for (std::size_t i = 0; i < ls.size(); ++i) {
    Shift s;
    LayerSpec l = layer_from_json(ls[i], child("/layers", i), &s);
    ss.layers.push_back({std::move(l), s});
  }
  const json& cs = j.contains("connectors") ? j["connectors"] : json::array();
  if (!cs.is_array()) throw ParseError("/connectors", "expected an array");
  if (cs.size() + 1 != ss.layers.size())
    throw ParseError("/connectors", "expected " + std::to_string(ss.layers.size() - 1) + " connector entries");
  for (std::size_t i = 0; i < cs.size(); ++i) ss.connectors.push_back(connector_from_json(cs[i], child("/connectors", i)));
  if (j.contains("iso_window")) {
    const json& w = j["iso_window"];
    if (!w.is_array() || w.size() != 2) throw ParseError("/iso_window", "expected [lo, hi]");
    ss.iso_window = {num(w[0], "/iso_window/0"), num(w[1], "/iso_window/1")};
    if (!(ss.iso_window.hi > ss.iso_window.lo)) throw ParseError("/iso_window", "window is empty");
  }
  return ss;
}

RunConfig run_from_json(const json& j, const std::string& base_dir) {
  only_keys(j, "", {"command", "input", "output_dir", "lambda_window", "lambda_step", "torus_grid", "k_grid",
                    "seed", "svg", "suite"});
  RunConfig rc;
  rc.command = str(need(j, "", "command"), "/command");
  static const std::set<std::string> commands{"transfer", "dispersion", "bands", "cones",
                                              "surface",  "reduce",     "verify"};
  if (!commands.count(rc.command)) throw ParseError("/command", "unknown command '" + rc.command + "'");
  if (j.contains("input")) {
    std::filesystem::path p = str(j["input"], "/input");
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    rc.input_path = p.string();
  }
  if (j.contains("output_dir")) rc.output_dir = str(j["output_dir"], "/output_dir");
  if (j.contains("lambda_window")) {
    const json& w = j["lambda_window"];
    if (!w.is_array() || w.size() != 2) throw ParseError("/lambda_window", "expected [lo, hi]");
    rc.lambda_window = {num(w[0], "/lambda_window/0"), num(w[1], "/lambda_window/1")};
    if (!(rc.lambda_window.hi > rc.lambda_window.lo)) throw ParseError("/lambda_window", "window is empty");
  }
  if (j.contains("lambda_step")) {
    rc.lambda_step = num(j["lambda_step"], "/lambda_step");
    if (!(rc.lambda_step > 0.0)) throw ParseError("/lambda_step", "step must be positive");
  }
  if (j.contains("torus_grid")) {
    rc.torus_grid = integer(j["torus_grid"], "/torus_grid");
    if (rc.torus_grid < 8) throw ParseError("/torus_grid", "must be at least 8");
  }
  if (j.contains("k_grid")) {
    rc.k_grid = integer(j["k_grid"], "/k_grid");
    if (rc.k_grid < 2) throw ParseError("/k_grid", "must be at least 2");
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw ParseError("/seed", "expected a non-negative integer");
    rc.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("svg")) rc.svg = boolean(j["svg"], "/svg");
  if (j.contains("suite")) rc.suite = str(j["suite"], "/suite");
  return rc;
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(std::to_string(line) + ":" + std::to_string(col), "JSON syntax error");
  }
}

}  // namespace

Potential parse_potential_text(const std::string& text, const std::string& where) {
  try {
    if (text == "zero") return Potential::zero();
    if (text.rfind("const:", 0) == 0) return Potential::constant(parse_number(text.substr(6), where));
    if (text.rfind("well:", 0) == 0) {
      std::vector<double> v;
      std::stringstream ss(text.substr(5));
      std::string item;
      while (std::getline(ss, item, ',')) v.push_back(parse_number(item, where));
      if (v.size() != 3) throw ParseError(where, "well needs depth,a,b");
      if (!(v[1] >= 0.0 && v[1] < v[2] && v[2] <= 1.0)) throw ParseError(where, "well needs 0 <= a < b <= 1");
      return Potential::well(v[0], v[1], v[2]);
    }
  } catch (const InvalidPotential& e) {
    throw ParseError(where, e.what());
  }
  throw ParseError(where, "unknown potential '" + text + "' (zero, const:v, well:depth,a,b)");
}

ParsedConfig parse_config_text(const std::string& text, const std::string& base_dir) {
  const json j = parse_json(text);
  if (!j.is_object()) throw ParseError("/", "expected an object at the top level");
  if (j.contains("command")) return run_from_json(j, base_dir);
  if (j.contains("vertices")) return graph_from_json(j);
  if (j.contains("layers") || j.contains("q")) return stack_from_json(j);
  throw ParseError("/", "cannot tell the config kind (expected 'vertices', 'layers', 'q' or 'command')");
}

ParsedConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, "cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  const auto dir = std::filesystem::path(path).parent_path();
  return parse_config_text(buf.str(), dir.empty() ? "." : dir.string());
}

PeriodicGraph parse_graph_text(const std::string& text) {
  auto c = parse_config_text(text);
  if (auto* g = std::get_if<PeriodicGraph>(&c)) return *g;
  throw ParseError("/", "not a graph config");
}

StackSpec parse_stack_text(const std::string& text) {
  auto c = parse_config_text(text);
  if (auto* s = std::get_if<StackSpec>(&c)) return *s;
  throw ParseError("/", "not a stack config");
}

namespace {

json potential_json(const Potential& p) {
  json segs = json::array();
  for (const auto& s : p.segments()) segs.push_back({s.length, s.value});
  return {{"segments", segs}};
}

}  // namespace

std::string potential_to_json(const Potential& p) { return potential_json(p).dump(); }

std::string graph_to_json(const PeriodicGraph& g) {
  json j{{"d", g.dim()}, {"vertices", json::array()}, {"edges", json::array()}};
  for (const auto& v : g.vertices()) {
    json jv{{"id", v.id}};
    if (v.condition.dirichlet)
      jv["dirichlet"] = true;
    else
      jv["robin"] = v.condition.alpha;
    j["vertices"].push_back(jv);
  }
  for (const auto& e : g.edges())
    j["edges"].push_back({{"tail", e.tail}, {"head", e.head}, {"shift", e.shift}, {"potential", potential_json(e.potential)}});
  return j.dump();
}

}  // namespace qg
