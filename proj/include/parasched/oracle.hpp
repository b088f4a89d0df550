#pragma once

#include "parasched/scheduler.hpp"

namespace parasched {

struct OracleResult {
    long optimal_makespan{};
    Plan witness; // passes validate_plan with zero violations
    std::size_t nodes_explored{};
};

/// Exact minimum makespan over all dependency-, exclusivity- and
/// chain-consistent assignments, by memoized branch and bound.
/// Throws DomainError when the dag exceeds node_limit.
OracleResult optimal_makespan(const Dag& dag, std::size_t node_limit = 10);

} // namespace parasched
