#include "parasched/oracle.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <sstream>
#include <unordered_map>

namespace parasched {

namespace {

struct Node {
    const DagNode* dag_node;
    std::vector<int> preds; // positions
    long rem_path;          // longest downstream take_time+delay chain incl. self
    int object;             // interned chain object id, -1 when none
};

struct Search {
    const Dag& dag;
    std::vector<Node> nodes;
    std::vector<int> indeg0; // initial indegrees
    int completion_pos{-1};
    std::size_t n{};

    long best = std::numeric_limits<long>::max();
    std::vector<std::pair<int, ArmChoice>> best_seq; // position -> arm, in exec order
    std::size_t explored = 0;

    // Mutable DFS state.
    std::vector<long> done_at;  // completion time per position, -1 when pending
    std::vector<int> indeg;
    std::vector<std::pair<int, ArmChoice>> seq;
    long f[2] = {0, 0};
    std::vector<int> chain_arm; // per object: -1 closed, 0/1 open on that arm
    std::unordered_map<std::string, long> memo; // signature -> smallest base seen

    explicit Search(const Dag& d) : dag(d) {
        std::map<int, int> pos;
        std::map<std::string, int> objects;
        for (const auto& dn : dag.nodes) {
            pos[dn.index] = static_cast<int>(nodes.size());
            Node node{&dn, {}, 0, -1};
            const std::string* obj = nullptr;
            if (dn.type == SkillCategory::Pick) obj = &*dn.target;
            else if (dn.type == SkillCategory::Place || dn.type == SkillCategory::ToolUse)
                obj = dn.source ? &*dn.source : nullptr;
            if (obj) {
                auto [it, _] = objects.try_emplace(*obj, static_cast<int>(objects.size()));
                node.object = it->second;
            }
            nodes.push_back(std::move(node));
        }
        n = nodes.size();
        indeg0.assign(n, 0);
        for (std::size_t i = 0; i < n; ++i) {
            for (int e : nodes[i].dag_node->edges)
                nodes[i].preds.push_back(pos.at(e));
            indeg0[i] = static_cast<int>(nodes[i].preds.size());
            if (nodes[i].dag_node->type == SkillCategory::Completion)
                completion_pos = static_cast<int>(i);
        }
        // Longest path to go, for the lower bound; successor indices are
        // not necessarily increasing, so iterate to a fixpoint.
        std::vector<long> rem(n, 0);
        bool changed = true;
        while (changed) {
            changed = false;
            for (std::size_t i = 0; i < n; ++i) {
                long v = nodes[i].dag_node->take_time;
                for (std::size_t j = 0; j < n; ++j)
                    for (int p : nodes[j].preds)
                        if (p == static_cast<int>(i))
                            v = std::max(v, nodes[i].dag_node->take_time +
                                                nodes[j].dag_node->delay_after + rem[j]);
                if (v > rem[i]) {
                    rem[i] = v;
                    changed = true;
                }
            }
        }
        for (std::size_t i = 0; i < n; ++i) nodes[i].rem_path = rem[i];

        done_at.assign(n, -1);
        indeg = indeg0;
        chain_arm.assign(objects.size(), -1);
    }

    long ready_time(std::size_t i) const {
        long t = 0;
        for (int p : nodes[i].preds)
            t = std::max(t, done_at[p] + nodes[i].dag_node->delay_after);
        return t;
    }

    long lower_bound(long cur_max) const {
        long lb = cur_max;
        for (std::size_t i = 0; i < n; ++i) {
            if (done_at[i] >= 0) continue;
            long est = 0;
            for (int p : nodes[i].preds)
                if (done_at[p] >= 0)
                    est = std::max(est, done_at[p] + nodes[i].dag_node->delay_after);
            lb = std::max(lb, est + nodes[i].rem_path);
        }
        return lb;
    }

    std::string signature(long& base_out) const {
        // Canonical under left/right relabeling: take the smaller rendering.
        long base = std::min(f[0], f[1]);
        std::string variants[2];
        for (int swap = 0; swap < 2; ++swap) {
            std::ostringstream out;
            for (std::size_t i = 0; i < n; ++i) out << (done_at[i] >= 0 ? '1' : '0');
            out << '|' << f[swap] - base << ',' << f[1 - swap] - base << '|';
            for (int c : chain_arm) out << (c < 0 ? -1 : (c ^ swap)) << ',';
            out << '|';
            // Frontier completion times drive remaining ready times.
            for (std::size_t i = 0; i < n; ++i) {
                if (done_at[i] < 0) continue;
                bool frontier = false;
                for (std::size_t j = 0; j < n && !frontier; ++j)
                    if (done_at[j] < 0)
                        for (int p : nodes[j].preds)
                            if (p == static_cast<int>(i)) {
                                frontier = true;
                                break;
                            }
                if (frontier) out << i << ':' << done_at[i] - base << ',';
            }
            variants[swap] = out.str();
        }
        base_out = base;
        return std::min(variants[0], variants[1]);
    }

    void execute(std::size_t i, ArmChoice arm, long cur_max, std::size_t done) {
        const DagNode& dn = *nodes[i].dag_node;
        long start = ready_time(i);
        long s;
        if (dn.type == SkillCategory::Completion) {
            s = start;
        } else if (arm == ArmChoice::Both) {
            s = std::max({start, f[0], f[1]});
        } else {
            s = std::max(start, f[arm == ArmChoice::Left ? 0 : 1]);
        }
        long end = s + dn.take_time;

        long saved_f[2] = {f[0], f[1]};
        int obj = nodes[i].object;
        int saved_chain = obj >= 0 ? chain_arm[obj] : -1;

        if (dn.type != SkillCategory::Completion) {
            if (arm == ArmChoice::Both) f[0] = f[1] = end;
            else f[arm == ArmChoice::Left ? 0 : 1] = end;
        }
        if (dn.type == SkillCategory::Pick) chain_arm[obj] = arm == ArmChoice::Left ? 0 : 1;
        else if (dn.type == SkillCategory::Place && obj >= 0) chain_arm[obj] = -1;

        done_at[i] = end;
        seq.emplace_back(static_cast<int>(i), arm);
        for (std::size_t j = 0; j < n; ++j)
            for (int p : nodes[j].preds)
                if (p == static_cast<int>(i)) --indeg[j];

        dfs(std::max(cur_max, end), done + 1);

        for (std::size_t j = 0; j < n; ++j)
            for (int p : nodes[j].preds)
                if (p == static_cast<int>(i)) ++indeg[j];
        seq.pop_back();
        done_at[i] = -1;
        f[0] = saved_f[0];
        f[1] = saved_f[1];
        if (obj >= 0) chain_arm[obj] = saved_chain;
    }

    void dfs(long cur_max, std::size_t done) {
        ++explored;
        if (done == n) {
            if (cur_max < best) {
                best = cur_max;
                best_seq = seq;
            }
            return;
        }
        if (lower_bound(cur_max) >= best) return;
        long base;
        std::string sig = signature(base);
        auto [it, inserted] = memo.try_emplace(sig, base);
        if (!inserted) {
            if (it->second <= base) return;
            it->second = base;
        }

        for (std::size_t i = 0; i < n; ++i) {
            if (done_at[i] >= 0 || indeg[i] != 0) continue;
            const DagNode& dn = *nodes[i].dag_node;
            int obj = nodes[i].object;
            if (dn.type == SkillCategory::Completion || dn.arm_num == 2) {
                execute(i, dn.arm_num == 2 ? ArmChoice::Both : ArmChoice::None, cur_max,
                        done);
                continue;
            }
            bool forced_arm = false;
            ArmChoice forced = ArmChoice::Left;
            if (obj >= 0 && dn.type != SkillCategory::Pick && chain_arm[obj] >= 0) {
                forced_arm = true;
                forced = chain_arm[obj] == 0 ? ArmChoice::Left : ArmChoice::Right;
            }
            if (forced_arm) {
                execute(i, forced, cur_max, done);
            } else {
                execute(i, ArmChoice::Left, cur_max, done);
                execute(i, ArmChoice::Right, cur_max, done);
            }
        }
    }
};

} // namespace

OracleResult optimal_makespan(const Dag& dag, std::size_t node_limit) {
    if (dag.nodes.size() > node_limit)
        throw DomainError("oracle limited to " + std::to_string(node_limit) + " nodes, got " +
                          std::to_string(dag.nodes.size()));
    Search search(dag);
    search.dfs(0, 0);
    if (search.best == std::numeric_limits<long>::max())
        throw DomainError("oracle found no feasible assignment");

    // Replay the best sequence into a Plan.
    OracleResult result;
    result.optimal_makespan = search.best;
    result.nodes_explored = search.explored;
    Plan& plan = result.witness;
    std::vector<long> done_at(search.n, -1);
    long f[2] = {0, 0};
    for (auto [pos, arm] : search.best_seq) {
        const DagNode& dn = *search.nodes[static_cast<std::size_t>(pos)].dag_node;
        long start = 0;
        for (int p : search.nodes[static_cast<std::size_t>(pos)].preds)
            start = std::max(start, done_at[p] + dn.delay_after);
        long s;
        if (dn.type == SkillCategory::Completion) s = start;
        else if (arm == ArmChoice::Both) s = std::max({start, f[0], f[1]});
        else s = std::max(start, f[arm == ArmChoice::Left ? 0 : 1]);
        long end = s + dn.take_time;
        done_at[pos] = end;
        if (dn.type != SkillCategory::Completion) {
            if (arm == ArmChoice::Both || arm == ArmChoice::Left) {
                plan.left_trace.push_back({s, end, dn.index, dn.name});
                f[0] = end;
            }
            if (arm == ArmChoice::Both || arm == ArmChoice::Right) {
                plan.right_trace.push_back({s, end, dn.index, dn.name});
                f[1] = end;
            }
            plan.arm_assignment[dn.index] = arm;
            plan.makespan = std::max(plan.makespan, end);
        }
    }
    auto by_start = [](const ScheduleEntry& a, const ScheduleEntry& b) {
        return a.start < b.start;
    };
    std::stable_sort(plan.left_trace.begin(), plan.left_trace.end(), by_start);
    std::stable_sort(plan.right_trace.begin(), plan.right_trace.end(), by_start);
    return result;
}

} // namespace parasched
