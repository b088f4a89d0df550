#include "parasched/random_dag.hpp"

#include <algorithm>
#include <array>
#include <set>

namespace parasched {

namespace {

DagNode make_node(int index, const std::string& skill, std::optional<std::string> source,
                  std::optional<std::string> target, int take_time, std::vector<int> edges) {
    DagNode n;
    n.index = index;
    n.skill = skill;
    const SkillSpec* spec = SkillTable::instance().find(skill);
    n.type = spec->category;
    if (skill == "task_completion") {
        n.name = "task_completion";
        n.arm_num = 0;
        n.take_time = 0;
    } else {
        n.name = skill + "(";
        if (source) n.name += "source=\"" + *source + "\", ";
        n.name += "target=\"" + *target + "\")";
        n.arm_num = spec->default_arms;
        n.take_time = take_time;
    }
    n.source = std::move(source);
    n.target = std::move(target);
    n.edges = std::move(edges);
    return n;
}

} // namespace

Dag random_valid_dag(std::mt19937& rng, std::size_t max_nodes) {
    static const std::array<const char*, 4> single_uses{"wipe", "stick_on", "pour_into",
                                                        "push_to"};
    static const std::array<const char*, 2> dual_uses{"cut", "stir"};
    static const std::array<const char*, 3> surfaces{"table", "shelf", "counter"};

    auto pick_int = [&](int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(rng);
    };

    std::vector<DagNode> nodes;
    std::vector<int> last_place; // place nodes emitted so far, cross-edge targets
    int last_dual_place = 0;     // place ending the previous dual-bearing chain
    int next = 1;
    int object_id = 0;

    if (max_nodes < 3) throw DomainError("random dag needs at least 3 nodes");

    // Each object contributes a pick, zero or more uses, and a place:
    // 2 to 5 nodes per chain plus the completion sink.
    while (nodes.size() + 3 <= max_nodes) {
        std::string object = "obj" + std::to_string(++object_id);
        std::string surface = surfaces[static_cast<std::size_t>(pick_int(0, 2))];

        std::size_t budget = max_nodes - nodes.size() - 1; // keep room for the sink
        int max_uses = static_cast<int>(std::min<std::size_t>(3, budget >= 2 ? budget - 2 : 0));
        int use_count = max_uses > 0 ? pick_int(0, max_uses) : 0;

        std::vector<const char*> uses;
        bool has_dual = false;
        for (int u = 0; u < use_count; ++u) {
            bool dual = pick_int(0, 3) == 0;
            has_dual = has_dual || dual;
            uses.push_back(dual ? dual_uses[static_cast<std::size_t>(pick_int(0, 1))]
                                : single_uses[static_cast<std::size_t>(pick_int(0, 3))]);
        }

        std::vector<int> pick_edges;
        // Chains holding a dual-arm use run one at a time: two arms locked
        // to different objects that each still need a dual task cannot be
        // untangled by the pick-rollback policy.
        if (has_dual && last_dual_place != 0) pick_edges.push_back(last_dual_place);
        // Sometimes order this chain after an earlier object's placement.
        if (!last_place.empty() && pick_int(0, 2) == 0) {
            int extra = last_place[static_cast<std::size_t>(
                pick_int(0, static_cast<int>(last_place.size()) - 1))];
            if (std::find(pick_edges.begin(), pick_edges.end(), extra) == pick_edges.end())
                pick_edges.push_back(extra);
        }

        int pick_idx = next++;
        nodes.push_back(
            make_node(pick_idx, "pick", surface, object, pick_int(1, 9), pick_edges));

        int tail = pick_idx;
        for (const char* skill : uses) {
            int use_idx = next++;
            nodes.push_back(make_node(use_idx, skill, object,
                                      "item" + std::to_string(pick_int(1, 5)),
                                      pick_int(1, 9), {tail}));
            tail = use_idx;
        }

        int place_idx = next++;
        nodes.push_back(make_node(place_idx, "place", object, surface, pick_int(1, 9), {tail}));
        last_place.push_back(place_idx);
        if (has_dual) last_dual_place = place_idx;

        if (pick_int(0, 3) == 0) break;
    }

    std::set<int> has_successor;
    for (const auto& n : nodes)
        for (int e : n.edges) has_successor.insert(e);
    std::vector<int> sinks;
    for (const auto& n : nodes)
        if (!has_successor.contains(n.index)) sinks.push_back(n.index);
    nodes.push_back(make_node(next, "task_completion", std::nullopt, std::nullopt, 0, sinks));

    return build_graph(std::move(nodes));
}

} // namespace parasched
