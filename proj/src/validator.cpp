#include "parasched/validator.hpp"

#include <sstream>

#include "json.hpp"

namespace parasched {

std::string_view to_string(ProblemCode c) {
    switch (c) {
    case ProblemCode::P1: return "P1";
    case ProblemCode::P2: return "P2";
    case ProblemCode::P3: return "P3";
    }
    return "?";
}

std::string_view problem_description(ProblemCode c) {
    switch (c) {
    case ProblemCode::P1: return "Depends on another object's place node.";
    case ProblemCode::P2:
        return "Does not depend on the tool usage node but directly depends on the pick node.";
    case ProblemCode::P3: return "Depends on another object's tool usage node.";
    }
    return "?";
}

namespace {

bool same_str(const std::optional<std::string>& a, const std::optional<std::string>& b) {
    return a && b && *a == *b;
}

// A pick's target becomes a tool when some direct successor uses it as source.
bool pick_feeds_tool_use(const Dag& dag, const DagNode& pick) {
    for (int s : dag.successors.at(pick.index)) {
        const DagNode& succ = dag.node(s);
        if (succ.type == SkillCategory::ToolUse && same_str(succ.source, pick.target))
            return true;
    }
    return false;
}

} // namespace

std::vector<Diagnostic> verify(const Dag& dag) {
    std::vector<Diagnostic> diags;
    for (const auto& node : dag.nodes) {
        if (node.type == SkillCategory::ContainerSwitch) continue;
        for (int e : node.edges) {
            const DagNode& pred = dag.node(e);
            std::optional<ProblemCode> code;
            if (node.type != SkillCategory::Pick && pred.type == SkillCategory::Place &&
                node.source && !same_str(node.source, pred.source)) {
                code = ProblemCode::P1;
            } else if (pred.type == SkillCategory::Pick && pick_feeds_tool_use(dag, pred) &&
                       node.type == SkillCategory::Place &&
                       same_str(node.source, pred.target)) {
                code = ProblemCode::P2;
            } else if (pred.type == SkillCategory::ToolUse && node.source &&
                       !same_str(node.source, pred.source)) {
                code = ProblemCode::P3;
            }
            if (!code) continue;
            std::ostringstream msg;
            msg << "node_" << node.index << " (" << node.name << "): "
                << problem_description(*code) << " (edge from node_" << pred.index << ")";
            diags.push_back({node.index, *code, pred.index, msg.str()});
        }
    }
    return diags;
}

std::string render_problems(const std::vector<Diagnostic>& diags) {
    std::ostringstream out;
    for (const auto& d : diags)
        out << "node_" << d.node_index << ": " << to_string(d.code) << " - "
            << problem_description(d.code) << '\n';
    return out.str();
}

std::string diagnostics_to_json(const std::vector<Diagnostic>& diags) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& d : diags)
        arr.push_back({{"node", d.node_index},
                       {"code", to_string(d.code)},
                       {"edge", {d.edge_from, d.node_index}},
                       {"message", d.message}});
    return arr.dump(2);
}

} // namespace parasched
