#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "parasched/package.hpp"
#include "parasched/skills.hpp"

namespace parasched {

/// Domain failure that is not a parse problem (bad graph shape etc).
class DomainError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DagNode {
    int index{};          // 1-based, as written in the node_<k> header
    SkillCategory type{}; // derived from the type: field
    std::string skill;    // the literal type: value, e.g. "cut", "pick"
    std::string name;     // full call text, e.g. `cut(source="knife", target="carrots")`
    std::optional<std::string> source;
    std::optional<std::string> target;
    int arm_num{};   // 0 (completion), 1 or 2
    int take_time{}; // seconds
    int delay_after{0};
    std::vector<int> edges; // predecessor indices
};

struct Dag {
    std::vector<DagNode> nodes; // sorted by index
    std::map<int, std::vector<int>> successors;
    std::map<int, int> indegree;
    int completion_index{};

    const DagNode& node(int index) const;
    bool has_node(int index) const;
    /// Sum of take_time + delay_after over all nodes.
    long sequential_sum() const;
};

/// Assemble a Dag from raw nodes: checks indices, edges, acyclicity,
/// exactly one completion node which must be a sink with predecessors.
Dag build_graph(std::vector<DagNode> nodes);

/// Parse the `Nodes: / node_k:` block format.
Dag parse_dag_text(std::string_view text);

/// Canonical rendering; parse_dag_text(serialize_dag(d)) == d.
std::string serialize_dag(const Dag& dag);

/// JSON mirror of serialize_dag's fields.
std::string dag_to_json(const Dag& dag);

/// Longest path by take_time plus delays along the path; a makespan
/// lower bound that ignores arm limits.
long critical_path(const Dag& dag);

/// Indices in a valid topological order (ascending start feasibility).
std::vector<int> topological_order(const Dag& dag);

} // namespace parasched
