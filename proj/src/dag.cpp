#include "parasched/dag.hpp"

#include <algorithm>
#include <cctype>
#include <queue>
#include <set>
#include <sstream>

#include "json.hpp"

namespace parasched {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

int parse_int(std::string_view value, std::size_t offset, const char* field) {
    auto v = trim(value);
    if (v.empty() || !std::all_of(v.begin(), v.end(), [](char c) {
            return std::isdigit(static_cast<unsigned char>(c));
        }))
        throw ParseError(std::string("non-numeric ") + field + " value", offset);
    return std::stoi(std::string(v));
}

std::vector<int> parse_edge_list(std::string_view value, std::size_t offset) {
    auto v = trim(value);
    if (v.size() < 2 || v.front() != '[' || v.back() != ']')
        throw ParseError("edge value must be a bracketed list", offset);
    v = trim(v.substr(1, v.size() - 2));
    std::vector<int> edges;
    while (!v.empty()) {
        std::size_t comma = v.find(',');
        std::string_view item = comma == std::string_view::npos ? v : v.substr(0, comma);
        edges.push_back(parse_int(item, offset, "edge"));
        if (comma == std::string_view::npos) break;
        v = trim(v.substr(comma + 1));
        if (v.empty()) throw ParseError("trailing comma in edge list", offset);
    }
    return edges;
}

void finish_node(DagNode& n, bool saw_arm, bool saw_time, bool saw_edge, std::size_t offset) {
    if (n.skill.empty()) throw ParseError("node missing type field", offset);
    if (n.name.empty()) throw ParseError("node missing name field", offset);
    if (!saw_arm) throw ParseError("node missing arm_num field", offset);
    if (!saw_time) throw ParseError("node missing take_time field", offset);
    if (!saw_edge) throw ParseError("node missing edge field", offset);

    if (n.skill == "task_completion") {
        if (n.name != "task_completion")
            throw ParseError("completion node name must be task_completion", offset);
        n.type = SkillCategory::Completion;
        if (n.arm_num != 0 || n.take_time != 0)
            throw ParseError("completion node must have arm_num 0 and take_time 0", offset);
        return;
    }
    SkillCall call = parse_skill_call(n.name);
    if (call.skill != n.skill)
        throw ParseError("node type '" + n.skill + "' disagrees with name skill '" +
                             call.skill + "'",
                         offset);
    n.type = call.spec->category;
    n.source = std::move(call.source);
    n.target = call.target;
    if (n.arm_num != call.spec->default_arms)
        throw ParseError("arm_num " + std::to_string(n.arm_num) + " disagrees with skill '" +
                             n.skill + "'",
                         offset);
    if (n.take_time < 0) throw ParseError("negative take_time", offset);
}

} // namespace

const DagNode& Dag::node(int index) const {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), index,
                               [](const DagNode& n, int i) { return n.index < i; });
    if (it == nodes.end() || it->index != index)
        throw DomainError("no such node: " + std::to_string(index));
    return *it;
}

bool Dag::has_node(int index) const {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), index,
                               [](const DagNode& n, int i) { return n.index < i; });
    return it != nodes.end() && it->index == index;
}

long Dag::sequential_sum() const {
    long total = 0;
    for (const auto& n : nodes) total += n.take_time + n.delay_after;
    return total;
}

Dag build_graph(std::vector<DagNode> nodes) {
    Dag dag;
    dag.nodes = std::move(nodes);
    std::sort(dag.nodes.begin(), dag.nodes.end(),
              [](const DagNode& a, const DagNode& b) { return a.index < b.index; });
    std::set<int> indices;
    for (const auto& n : dag.nodes) {
        if (n.index <= 0) throw DomainError("node index must be positive");
        if (!indices.insert(n.index).second)
            throw DomainError("duplicate node index: " + std::to_string(n.index));
    }
    for (const auto& n : dag.nodes) {
        dag.indegree[n.index] = 0;
        dag.successors[n.index];
    }
    for (const auto& n : dag.nodes) {
        std::set<int> seen;
        for (int e : n.edges) {
            if (e == n.index)
                throw DomainError("self-loop on node " + std::to_string(n.index));
            if (!indices.contains(e))
                throw DomainError("node " + std::to_string(n.index) +
                                  " references missing node " + std::to_string(e));
            if (!seen.insert(e).second)
                throw DomainError("duplicate edge " + std::to_string(e) + " on node " +
                                  std::to_string(n.index));
            dag.successors[e].push_back(n.index);
            ++dag.indegree[n.index];
        }
    }

    // Kahn's algorithm; leftovers expose a cycle via one back-edge.
    auto indeg = dag.indegree;
    std::priority_queue<int, std::vector<int>, std::greater<>> ready;
    for (const auto& [idx, d] : indeg)
        if (d == 0) ready.push(idx);
    std::size_t emitted = 0;
    while (!ready.empty()) {
        int idx = ready.top();
        ready.pop();
        ++emitted;
        for (int s : dag.successors[idx])
            if (--indeg[s] == 0) ready.push(s);
    }
    if (emitted != dag.nodes.size()) {
        for (const auto& n : dag.nodes) {
            if (indeg[n.index] == 0) continue;
            for (int e : n.edges)
                if (indeg[e] > 0)
                    throw DomainError("cycle through edge " + std::to_string(e) + " -> " +
                                      std::to_string(n.index));
        }
        throw DomainError("cycle detected");
    }

    dag.completion_index = 0;
    for (const auto& n : dag.nodes) {
        if (n.type != SkillCategory::Completion) continue;
        if (dag.completion_index)
            throw DomainError("multiple task_completion nodes");
        dag.completion_index = n.index;
    }
    if (!dag.completion_index) throw DomainError("missing task_completion sink");
    const DagNode& sink = dag.node(dag.completion_index);
    if (!dag.successors[sink.index].empty())
        throw DomainError("task_completion node has outgoing edges");
    if (sink.edges.empty() && dag.nodes.size() > 1)
        throw DomainError("task_completion node has no predecessors");
    return dag;
}

Dag parse_dag_text(std::string_view text) {
    std::vector<DagNode> nodes;
    std::optional<DagNode> current;
    bool saw_arm = false, saw_time = false, saw_edge = false;
    std::size_t node_offset = 0;
    std::size_t offset = 0;

    auto flush = [&] {
        if (!current) return;
        finish_node(*current, saw_arm, saw_time, saw_edge, node_offset);
        nodes.push_back(std::move(*current));
        current.reset();
    };

    while (offset <= text.size()) {
        std::size_t eol = text.find('\n', offset);
        std::string_view raw = text.substr(offset, eol == std::string_view::npos
                                                       ? std::string_view::npos
                                                       : eol - offset);
        std::string_view line = trim(raw);
        if (line.empty() || line == "Nodes:") {
            // blank separators and the optional list header
        } else if (line.starts_with("node_")) {
            flush();
            std::string_view rest = line.substr(5);
            if (!rest.ends_with(":"))
                throw ParseError("node header must end with ':'", offset);
            current = DagNode{};
            current->index = parse_int(rest.substr(0, rest.size() - 1), offset, "node index");
            node_offset = offset;
            saw_arm = saw_time = saw_edge = false;
        } else {
            std::size_t colon = line.find(':');
            if (colon == std::string_view::npos)
                throw ParseError("expected 'field: value' line", offset);
            if (!current)
                throw ParseError("field line outside a node block", offset);
            std::string field(trim(line.substr(0, colon)));
            std::string_view value = trim(line.substr(colon + 1));
            if (field == "type") {
                current->skill = std::string(value);
            } else if (field == "name") {
                current->name = std::string(value);
            } else if (field == "arm_num") {
                current->arm_num = parse_int(value, offset, "arm_num");
                saw_arm = true;
            } else if (field == "take_time") {
                current->take_time = parse_int(value, offset, "take_time");
                saw_time = true;
            } else if (field == "delay_after") {
                current->delay_after = parse_int(value, offset, "delay_after");
            } else if (field == "edge") {
                current->edges = parse_edge_list(value, offset);
                saw_edge = true;
            } else {
                throw ParseError("unknown field: " + field, offset);
            }
        }
        if (eol == std::string_view::npos) break;
        offset = eol + 1;
    }
    flush();
    if (nodes.empty()) throw ParseError("no nodes found", 0);
    return build_graph(std::move(nodes));
}

std::string serialize_dag(const Dag& dag) {
    std::ostringstream out;
    out << "Nodes:\n";
    bool first = true;
    for (const auto& n : dag.nodes) {
        if (!first) out << '\n';
        first = false;
        out << "node_" << n.index << ":\n";
        out << "type: " << n.skill << '\n';
        out << "name: " << n.name << '\n';
        out << "arm_num: " << n.arm_num << '\n';
        out << "take_time: " << n.take_time << '\n';
        out << "edge: [";
        for (std::size_t i = 0; i < n.edges.size(); ++i) {
            if (i) out << ", ";
            out << n.edges[i];
        }
        out << "]\n";
        if (n.delay_after) out << "delay_after: " << n.delay_after << '\n';
    }
    return out.str();
}

std::string dag_to_json(const Dag& dag) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& n : dag.nodes) {
        nlohmann::json node{{"index", n.index},   {"type", n.skill},
                            {"name", n.name},     {"arm_num", n.arm_num},
                            {"take_time", n.take_time}, {"edge", n.edges}};
        if (n.delay_after) node["delay_after"] = n.delay_after;
        arr.push_back(std::move(node));
    }
    return nlohmann::json{{"nodes", arr}}.dump(2);
}

std::vector<int> topological_order(const Dag& dag) {
    auto indeg = dag.indegree;
    std::priority_queue<int, std::vector<int>, std::greater<>> ready;
    for (const auto& [idx, d] : indeg)
        if (d == 0) ready.push(idx);
    std::vector<int> order;
    order.reserve(dag.nodes.size());
    while (!ready.empty()) {
        int idx = ready.top();
        ready.pop();
        order.push_back(idx);
        for (int s : dag.successors.at(idx))
            if (--indeg[s] == 0) ready.push(s);
    }
    return order;
}

long critical_path(const Dag& dag) {
    std::map<int, long> len;
    long best = 0;
    for (int idx : topological_order(dag)) {
        const DagNode& n = dag.node(idx);
        long start = 0;
        for (int e : n.edges) start = std::max(start, len[e] + n.delay_after);
        len[idx] = start + n.take_time;
        best = std::max(best, len[idx]);
    }
    return best;
}

} // namespace parasched
