#pragma once

#include <map>
#include <string>
#include <vector>

#include "parasched/arm_selector.hpp"
#include "parasched/dag.hpp"

namespace parasched {

struct ScheduleEntry {
    long start{};
    long end{};
    int node_index{};
    std::string name;
};

struct Plan {
    std::vector<ScheduleEntry> left_trace;  // sorted by start
    std::vector<ScheduleEntry> right_trace; // dual nodes appear in both
    long makespan{};
    int rollback_count{};
    std::map<int, ArmChoice> arm_assignment;
};

/// Raised when the simulation exceeds its time cap without finishing.
class LivelockError : public std::runtime_error {
public:
    LivelockError(std::string message, std::string queue_snapshot)
        : std::runtime_error(std::move(message)),
          queue_snapshot_(std::move(queue_snapshot)) {}
    const std::string& queue_snapshot() const { return queue_snapshot_; }

private:
    std::string queue_snapshot_;
};

/// Event-driven greedy scheduler. Deterministic for a given dag.
Plan schedule(const Dag& dag);

enum class Constraint { C1_Dependency, C2_ArmOverlap, C3_LockChain };

std::string_view to_string(Constraint c);

struct Violation {
    Constraint constraint{};
    std::vector<int> nodes;
    std::string detail;
};

/// Independent post-hoc checker: dependency order, per-arm interval
/// exclusivity, pick-use-place chains sharing one arm.
std::vector<Violation> validate_plan(const Plan& plan, const Dag& dag);

enum class GanttFormat { Ascii, Svg };

/// Ascii reproduces the two-lane table layout of the schedule output.
std::string gantt(const Plan& plan, GanttFormat format);

std::string plan_to_json(const Plan& plan);

} // namespace parasched
