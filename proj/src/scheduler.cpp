#include "parasched/scheduler.hpp"

#include <algorithm>
#include <cassert>
#include <set>
#include <sstream>

#include "json.hpp"

namespace parasched {

std::string_view to_string(Constraint c) {
    switch (c) {
    case Constraint::C1_Dependency: return "C1_Dependency";
    case Constraint::C2_ArmOverlap: return "C2_ArmOverlap";
    case Constraint::C3_LockChain: return "C3_LockChain";
    }
    return "?";
}

namespace {

constexpr int kCompleted = 0; // pops before Available at equal times
constexpr int kAvailable = 1;

struct Event {
    long time{};
    int kind{};
    int node{};
    auto operator<=>(const Event&) const = default;
};

struct Sim {
    const Dag& dag;
    std::set<Event> queue;
    std::map<int, int> indeg;
    std::map<int, long> completion; // node -> completion time
    ArmState left{Arm::Left};
    ArmState right{Arm::Right};
    Plan plan;
    long cap;

    explicit Sim(const Dag& d) : dag(d), indeg(d.indegree) {
        cap = 4 * d.sequential_sum() + 64;
        for (const auto& [idx, deg] : indeg)
            if (deg == 0) queue.insert({0, kAvailable, idx});
    }

    ArmState& state(ArmChoice c) { return c == ArmChoice::Left ? left : right; }
    std::vector<ScheduleEntry>& trace(ArmChoice c) {
        return c == ArmChoice::Left ? plan.left_trace : plan.right_trace;
    }

    // Dependency-ready time: all predecessors are complete by now.
    long ready_time(const DagNode& n) const {
        long t = 0;
        for (int e : n.edges) t = std::max(t, completion.at(e) + n.delay_after);
        return t;
    }

    void complete_at(int node, long time) {
        completion[node] = time;
        for (int s : dag.successors.at(node))
            if (--indeg[s] == 0) {
                long ready = 0;
                for (int e : dag.node(s).edges)
                    ready = std::max(ready, completion.at(e) + dag.node(s).delay_after);
                queue.insert({ready, kAvailable, s});
            }
    }

    void record(ArmChoice arm, const DagNode& n, long s) {
        trace(arm).push_back({s, s + n.take_time, n.index, n.name});
        state(arm).free_time = s + n.take_time;
    }

    void schedule_single(ArmChoice arm, const DagNode& n, long start) {
        long s = std::max(state(arm).free_time, start);
        record(arm, n, s);
        plan.arm_assignment[n.index] = arm;
        if (n.type == SkillCategory::Pick) {
            state(arm).locked = true;
            state(arm).chain = n.target;
        }
        queue.insert({s + n.take_time, kCompleted, n.index});
    }

    void schedule_both(const DagNode& n, long start) {
        long s = std::max({left.free_time, right.free_time, start});
        record(ArmChoice::Left, n, s);
        record(ArmChoice::Right, n, s);
        plan.arm_assignment[n.index] = ArmChoice::Both;
        queue.insert({s + n.take_time, kCompleted, n.index});
    }

    bool last_entry_is_pick(const std::vector<ScheduleEntry>& tr) const {
        return !tr.empty() && dag.node(tr.back().node_index).type == SkillCategory::Pick;
    }

    bool depends_on(int node, int ancestor) const {
        std::vector<int> stack{node};
        std::set<int> seen;
        while (!stack.empty()) {
            int cur = stack.back();
            stack.pop_back();
            if (cur == ancestor) return true;
            if (!seen.insert(cur).second) continue;
            for (int e : dag.node(cur).edges) stack.push_back(e);
        }
        return false;
    }

    // Undo the latest pick of the arm not holding the dual task's
    // source, schedule the dual task, then replay the pick.
    bool rollback(const DagNode& task, long now) {
        const std::string& object = *task.source;
        bool l_owns = left.chain && *left.chain == object;
        bool r_owns = right.chain && *right.chain == object;
        if (!l_owns && !r_owns) return false;
        ArmChoice other = l_owns ? ArmChoice::Right : ArmChoice::Left;
        auto& other_trace = trace(other);
        if (!last_entry_is_pick(other_trace)) return false;
        ScheduleEntry pick = other_trace.back();
        const DagNode& pick_node = dag.node(pick.node_index);
        if (depends_on(task.index, pick.node_index)) return false;

        other_trace.pop_back();
        state(other).free_time = pick.start;
        state(other).locked = false;
        state(other).chain.reset();
        plan.arm_assignment.erase(pick.node_index);

        if (queue.erase({pick.end, kCompleted, pick.node_index}) == 0) {
            // The pick already completed; take back its effects.
            completion.erase(pick.node_index);
            for (int s : dag.successors.at(pick.node_index)) {
                if (completion.contains(s) || plan.arm_assignment.contains(s))
                    throw std::logic_error("rollback found a scheduled descendant");
                if (indeg[s]++ == 0) {
                    auto it = std::find_if(queue.begin(), queue.end(), [&](const Event& e) {
                        return e.kind == kAvailable && e.node == s;
                    });
                    if (it != queue.end()) queue.erase(it);
                }
            }
        }

        schedule_both(task, ready_time(task));
        queue.insert({now, kAvailable, pick.node_index});
        ++plan.rollback_count;
        return true;
    }

    std::string snapshot() const {
        std::ostringstream out;
        for (const auto& e : queue)
            out << '(' << e.time << ", " << (e.kind == kCompleted ? "completed" : "available")
                << ", node_" << e.node << ")\n";
        return out.str();
    }

    Plan run() {
        while (!queue.empty()) {
            Event ev = *queue.begin();
            queue.erase(queue.begin());
            if (ev.time > cap) {
                queue.insert(ev); // keep the stuck event visible in the snapshot
                throw LivelockError("no progress by simulation time " + std::to_string(cap),
                                    snapshot());
            }
            const DagNode& node = dag.node(ev.node);
            if (ev.kind == kCompleted) {
                complete_at(ev.node, ev.time);
                if (node.type == SkillCategory::Place) {
                    ArmState& a = state(plan.arm_assignment.at(ev.node));
                    a.locked = false;
                    a.chain.reset();
                }
                continue;
            }
            if (node.type == SkillCategory::Completion) {
                complete_at(ev.node, ready_time(node));
                continue;
            }
            long start = ready_time(node);
            auto [choice, branch] = choose_arm(node, start, left, right);
            switch (choice) {
            case ArmChoice::None:
                if (node.arm_num == 2 && left.locked && right.locked && node.source &&
                    rollback(node, ev.time))
                    break;
                queue.insert({ev.time + 1, kAvailable, ev.node});
                break;
            case ArmChoice::Both:
                schedule_both(node, start);
                break;
            default:
                if ((node.type == SkillCategory::Pick && state(choice).locked) ||
                    (node.type == SkillCategory::Place &&
                     (!state(choice).chain || *state(choice).chain != *node.source))) {
                    queue.insert({ev.time + 1, kAvailable, ev.node});
                    break;
                }
                schedule_single(choice, node, start);
                break;
            }
        }
        if (completion.size() != dag.nodes.size())
            throw std::logic_error("scheduler finished with unprocessed nodes");
        for (const auto& e : plan.left_trace) plan.makespan = std::max(plan.makespan, e.end);
        for (const auto& e : plan.right_trace) plan.makespan = std::max(plan.makespan, e.end);
        std::stable_sort(plan.left_trace.begin(), plan.left_trace.end(),
                         [](const auto& a, const auto& b) { return a.start < b.start; });
        std::stable_sort(plan.right_trace.begin(), plan.right_trace.end(),
                         [](const auto& a, const auto& b) { return a.start < b.start; });
        return plan;
    }
};

} // namespace

Plan schedule(const Dag& dag) {
    Sim sim(dag);
    return sim.run();
}

namespace {

struct Placed {
    long start{};
    long end{};
    ArmChoice arm{};
};

std::map<int, Placed> placements(const Plan& plan) {
    std::map<int, Placed> out;
    for (const auto& e : plan.left_trace) out[e.node_index] = {e.start, e.end, ArmChoice::Left};
    for (const auto& e : plan.right_trace) {
        auto it = out.find(e.node_index);
        if (it != out.end()) it->second.arm = ArmChoice::Both;
        else out[e.node_index] = {e.start, e.end, ArmChoice::Right};
    }
    return out;
}

} // namespace

std::vector<Violation> validate_plan(const Plan& plan, const Dag& dag) {
    std::vector<Violation> out;
    auto placed = placements(plan);

    for (const auto& n : dag.nodes) {
        if (n.type == SkillCategory::Completion) continue;
        if (!placed.contains(n.index)) {
            out.push_back({Constraint::C1_Dependency, {n.index}, "node not scheduled"});
            continue;
        }
        const Placed& p = placed.at(n.index);
        for (int e : n.edges) {
            const DagNode& pred = dag.node(e);
            if (pred.type == SkillCategory::Completion) continue;
            if (!placed.contains(e)) continue;
            long pred_done = placed.at(e).end;
            if (p.start < pred_done + n.delay_after)
                out.push_back({Constraint::C1_Dependency,
                               {e, n.index},
                               "node_" + std::to_string(n.index) + " starts at " +
                                   std::to_string(p.start) + " before predecessor node_" +
                                   std::to_string(e) + " allows " +
                                   std::to_string(pred_done + n.delay_after)});
        }
    }

    for (const auto* tr : {&plan.left_trace, &plan.right_trace}) {
        auto sorted = *tr;
        std::sort(sorted.begin(), sorted.end(),
                  [](const auto& a, const auto& b) { return a.start < b.start; });
        for (std::size_t i = 1; i < sorted.size(); ++i)
            if (sorted[i].start < sorted[i - 1].end)
                out.push_back({Constraint::C2_ArmOverlap,
                               {sorted[i - 1].node_index, sorted[i].node_index},
                               "entries overlap on one arm: node_" +
                                   std::to_string(sorted[i - 1].node_index) + " and node_" +
                                   std::to_string(sorted[i].node_index)});
    }

    // Chain consistency: pair each pick with the next place of the same
    // object; intervening single-arm uses must ride the same arm.
    std::map<std::string, std::vector<int>> picks, places, uses;
    for (const auto& n : dag.nodes) {
        if (!placed.contains(n.index)) continue;
        if (n.type == SkillCategory::Pick) picks[*n.target].push_back(n.index);
        else if (n.type == SkillCategory::Place) places[*n.source].push_back(n.index);
        else if (n.type == SkillCategory::ToolUse && n.source)
            uses[*n.source].push_back(n.index);
    }
    for (auto& [object, pick_list] : picks) {
        auto by_start = [&](int a, int b) { return placed.at(a).start < placed.at(b).start; };
        std::sort(pick_list.begin(), pick_list.end(), by_start);
        auto& place_list = places[object];
        std::sort(place_list.begin(), place_list.end(), by_start);
        for (std::size_t k = 0; k < pick_list.size() && k < place_list.size(); ++k) {
            const Placed& pk = placed.at(pick_list[k]);
            const Placed& pl = placed.at(place_list[k]);
            if (pk.arm != pl.arm) {
                out.push_back({Constraint::C3_LockChain,
                               {pick_list[k], place_list[k]},
                               "pick and place of '" + object + "' on different arms"});
                continue;
            }
            for (int u : uses[object]) {
                const Placed& pu = placed.at(u);
                if (pu.start < pk.start || pu.start > pl.start) continue;
                bool ok = pu.arm == ArmChoice::Both || pu.arm == pk.arm;
                if (!ok)
                    out.push_back({Constraint::C3_LockChain,
                                   {pick_list[k], u},
                                   "use node_" + std::to_string(u) + " of '" + object +
                                       "' not on the holding arm"});
            }
        }
    }
    return out;
}

std::string gantt(const Plan& plan, GanttFormat format) {
    if (format == GanttFormat::Ascii) {
        std::ostringstream out;
        out << "Total execution time: " << plan.makespan << " seconds\n\n";
        auto lane = [&](const char* title, const std::vector<ScheduleEntry>& tr) {
            out << title << " arm schedule table:\n";
            for (const auto& e : tr) {
                std::string range = std::to_string(e.start) + "-" + std::to_string(e.end);
                if (range.size() < 8) range.resize(8, ' ');
                else range += ' ';
                out << range << e.name << '\n';
            }
        };
        lane("Left", plan.left_trace);
        out << '\n';
        lane("Right", plan.right_trace);
        return out.str();
    }

    const long scale = 10;
    long width = plan.makespan * scale + 40;
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"120\">\n";
    auto lane = [&](const std::vector<ScheduleEntry>& tr, long y, const char* fill) {
        for (const auto& e : tr) {
            if (e.end == e.start) continue;
            out << "  <rect x=\"" << 20 + e.start * scale << "\" y=\"" << y << "\" width=\""
                << (e.end - e.start) * scale << "\" height=\"30\" fill=\"" << fill
                << "\" stroke=\"black\"><title>" << e.name << "</title></rect>\n";
        }
    };
    lane(plan.left_trace, 20, "#9ecae1");
    lane(plan.right_trace, 70, "#a1d99b");
    out << "</svg>\n";
    return out.str();
}

std::string plan_to_json(const Plan& plan) {
    auto lane = [](const std::vector<ScheduleEntry>& tr) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& e : tr)
            arr.push_back({{"start", e.start},
                           {"end", e.end},
                           {"node", e.node_index},
                           {"name", e.name}});
        return arr;
    };
    return nlohmann::json{{"makespan", plan.makespan},
                          {"rollbacks", plan.rollback_count},
                          {"left", lane(plan.left_trace)},
                          {"right", lane(plan.right_trace)}}
        .dump(2);
}

} // namespace parasched
