#include "qgraph/random_graph.hpp"

namespace qg {

Potential random_potential(std::mt19937_64& rng, int max_segments, double max_value, double total_length) {
  std::uniform_int_distribution<int> nseg(1, std::max(1, max_segments));
  std::uniform_real_distribution<double> len(0.2, 1.0), val(-max_value, max_value);
  const int n = nseg(rng);
  std::vector<Segment> segs;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    segs.push_back({len(rng), val(rng)});
    sum += segs.back().length;
  }
  const double target = total_length > 0.0 ? total_length : std::uniform_real_distribution<double>(0.5, 1.5)(rng);
  for (auto& s : segs) s.length *= target / sum;
  return Potential(std::move(segs));
}

PeriodicGraph random_graph(std::mt19937_64& rng, const RandomGraphOptions& o) {
  PeriodicGraph g(o.d);
  const int nv = std::uniform_int_distribution<int>(1, std::max(1, o.max_vertices))(rng);
  std::uniform_real_distribution<double> alpha(-o.robin_range, o.robin_range);
  std::uniform_int_distribution<int> vpick(0, nv - 1), spick(-1, 1);
  for (int i = 0; i < nv; ++i) g.add_vertex("v" + std::to_string(i), VertexCondition::robin(i % 2 ? alpha(rng) : 0.0));
  auto name = [](int i) { return "v" + std::to_string(i); };
  auto pot = [&] { return random_potential(rng, o.max_segments, o.max_value); };
  for (int i = 0; i + 1 < nv; ++i) g.add_edge(name(i), name(i + 1), std::vector<int>(o.d, 0), pot());
  for (int k = 0; k < o.d; ++k) {
    std::vector<int> sh(o.d, 0);
    sh[k] = 1;
    g.add_edge(name(vpick(rng)), name(vpick(rng)), sh, pot());
  }
  for (int k = 0; k < o.extra_edges; ++k) {
    std::vector<int> sh(o.d);
    for (auto& x : sh) x = spick(rng);
    g.add_edge(name(vpick(rng)), name(vpick(rng)), sh, pot());
  }
  return g;
}

}  // namespace qg
