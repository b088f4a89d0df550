#pragma once

#include <optional>
#include <string>

#include "parasched/dag.hpp"

namespace parasched {

enum class Arm { Left, Right };

std::string_view to_string(Arm a);

struct ArmState {
    Arm arm{Arm::Left};
    long free_time{0};
    bool locked{false};
    std::optional<std::string> chain; // object held since its pick
};

enum class ArmChoice { Left, Right, Both, None };

std::string_view to_string(ArmChoice c);

struct ChoiceResult {
    ArmChoice choice{ArmChoice::None};
    std::string_view branch; // which decision rule fired, for diagnostics
};

/// Decide which arm(s) run a ready task whose dependency-ready time is
/// `start`. None means "retry later", not an error.
ChoiceResult choose_arm(const DagNode& task, long start, const ArmState& left,
                        const ArmState& right);

} // namespace parasched
