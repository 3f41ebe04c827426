#pragma once

#include "qgraph/graph.hpp"
#include "qgraph/graphene.hpp"

#include <cstdint>
#include <ostream>
#include <string>

// Verification suites behind `qgraph verify`. Each prints its seed and, on a
// failure, the reproducing instance; the return value is true when all
// checks passed.
namespace qg::verify {

bool join_suite(std::uint64_t seed, std::ostream& os);
bool pole_suite(std::uint64_t seed, std::ostream& os);
bool hermitian_suite(std::uint64_t seed, std::ostream& os);
bool hill_suite(std::ostream& os);
bool section6_suite(std::uint64_t seed, std::ostream& os);

// Checks a user-supplied instance against itself.
bool graph_self_check(const PeriodicGraph& g, std::uint64_t seed, std::ostream& os);
bool stack_self_check(const StackSpec& ss, std::uint64_t seed, std::ostream& os);

}  // namespace qg::verify
