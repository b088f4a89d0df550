#pragma once

#include <random>

#include "parasched/dag.hpp"

namespace parasched {

/// Deterministic random DAG builder for property tests and benchmarks.
/// Output always passes build_graph and verify with no diagnostics.
Dag random_valid_dag(std::mt19937& rng, std::size_t max_nodes = 20);

} // namespace parasched
