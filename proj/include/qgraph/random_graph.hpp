#pragma once

// Seeded random instances for property checks and the verify suites.

#include "qgraph/graph.hpp"

#include <random>

namespace qg {

struct RandomGraphOptions {
  int d = 1;
  int max_vertices = 4;
  int extra_edges = 3;  // on top of a spanning path and one edge per direction
  int max_segments = 3;
  double max_value = 20.0;
  double robin_range = 2.0;
};

// Lengths in [0.5, 1.5] unless total_length > 0; values in [-max_value, max_value].
Potential random_potential(std::mt19937_64& rng, int max_segments = 3, double max_value = 20.0,
                           double total_length = 0.0);

PeriodicGraph random_graph(std::mt19937_64& rng, const RandomGraphOptions& opts = {});

}  // namespace qg
