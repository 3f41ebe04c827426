#pragma once

// JSON config files for graphs, graphene stacks and CLI runs. Parsing is
// strict: unknown keys and malformed values raise ParseError with a JSON
// pointer to the offending field.

#include "qgraph/graph.hpp"
#include "qgraph/graphene.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

namespace qg {

// "zero", "const:v", "well:depth,a,b" (numbers may be fractions like 1/3).
Potential parse_potential_text(const std::string& text, const std::string& where = "");

struct RunConfig {
  std::string command;
  std::string input_path;  // resolved relative to the run config's directory
  std::string output_dir = ".";
  Interval lambda_window{-20.0, 120.0};
  double lambda_step = 0.05;
  int torus_grid = 48;
  int k_grid = 64;
  std::uint64_t seed = 7;
  bool svg = false;
  std::string suite = "all";
};

using ParsedConfig = std::variant<PeriodicGraph, StackSpec, RunConfig>;

// Picks the kind from the top-level keys: "vertices" (graph), "layers" or
// "q" (stack; a bare layer is a one-layer stack), "command" (run).
ParsedConfig parse_config_text(const std::string& text, const std::string& base_dir = ".");
ParsedConfig parse_config(const std::string& path);

PeriodicGraph parse_graph_text(const std::string& text);
StackSpec parse_stack_text(const std::string& text);

// Serializations used to print reproducing instances.
std::string potential_to_json(const Potential& p);
std::string graph_to_json(const PeriodicGraph& g);

}  // namespace qg
