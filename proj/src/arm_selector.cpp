#include "parasched/arm_selector.hpp"

namespace parasched {

std::string_view to_string(Arm a) {
    return a == Arm::Left ? "Left" : "Right";
}

std::string_view to_string(ArmChoice c) {
    switch (c) {
    case ArmChoice::Left: return "Left";
    case ArmChoice::Right: return "Right";
    case ArmChoice::Both: return "Both";
    case ArmChoice::None: return "None";
    }
    return "?";
}

namespace {

bool chain_is(const ArmState& a, const std::string& object) {
    return a.chain && *a.chain == object;
}

ArmChoice as_choice(const ArmState& a) {
    return a.arm == Arm::Left ? ArmChoice::Left : ArmChoice::Right;
}

ArmChoice earliest(const ArmState& l, const ArmState& r) {
    return r.free_time < l.free_time ? ArmChoice::Right : ArmChoice::Left;
}

} // namespace

ChoiceResult choose_arm(const DagNode& task, long start, const ArmState& left,
                        const ArmState& right) {
    // The object the task needs in hand: target for a pick, else the
    // source when present, else the target.
    const std::string& object =
        task.type == SkillCategory::Pick
            ? *task.target
            : (task.source ? *task.source : task.target.value_or(std::string{}));

    if (task.type == SkillCategory::Place) {
        // A place is bound to whichever arm still holds the object.
        if (chain_is(left, object)) return {ArmChoice::Left, "place-chain-owner"};
        if (chain_is(right, object)) return {ArmChoice::Right, "place-chain-owner"};
        return {ArmChoice::None, "place-no-owner"};
    }

    const bool dual = task.arm_num == 2;

    if (left.locked && right.locked) {
        bool l_owns = chain_is(left, object);
        bool r_owns = chain_is(right, object);
        if (dual) {
            if (l_owns && r_owns) return {ArmChoice::Both, "both-locked-dual-owners"};
            if ((l_owns && !right.chain) || (r_owns && !left.chain))
                return {ArmChoice::Both, "both-locked-dual-partial"};
            return {ArmChoice::None, "both-locked-dual-blocked"};
        }
        if (l_owns && r_owns) return {earliest(left, right), "both-locked-two-owners"};
        if (l_owns) return {ArmChoice::Left, "both-locked-owner"};
        if (r_owns) return {ArmChoice::Right, "both-locked-owner"};
        return {ArmChoice::None, "both-locked-no-owner"};
    }

    if (dual) return {ArmChoice::Both, "dual-free"};

    if (left.locked != right.locked) {
        const ArmState& busy = left.locked ? left : right;
        const ArmState& free = left.locked ? right : left;
        if (chain_is(busy, object)) return {as_choice(busy), "one-locked-owner"};
        if (free.free_time <= start) return {as_choice(free), "one-locked-free-arm"};
        return {ArmChoice::None, "one-locked-defer"};
    }

    return {earliest(left, right), "both-free-earliest"};
}

} // namespace parasched
