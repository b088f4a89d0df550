#pragma once

#include <string>
#include <vector>

#include "parasched/dag.hpp"

namespace parasched {

enum class ProblemCode { P1, P2, P3 };

std::string_view to_string(ProblemCode c);
/// Fixed description per problem class, used verbatim in correction prompts.
std::string_view problem_description(ProblemCode c);

struct Diagnostic {
    int node_index{};
    ProblemCode code{};
    int edge_from{}; // predecessor j of the offending edge j -> node_index
    std::string message;
};

/// Structural dependency checks over every (node, predecessor) pair.
/// Empty result means the graph is accepted. Container switch nodes are
/// never flagged themselves but still count as predecessors.
std::vector<Diagnostic> verify(const Dag& dag);

/// One line per diagnostic, spliceable into the correction prompt.
std::string render_problems(const std::vector<Diagnostic>& diags);

std::string diagnostics_to_json(const std::vector<Diagnostic>& diags);

} // namespace parasched
