#include "parasched/skills.hpp"

#include <sstream>

namespace parasched {

std::string_view to_string(SkillCategory c) {
    switch (c) {
    case SkillCategory::Pick: return "pick";
    case SkillCategory::Place: return "place";
    case SkillCategory::ToolUse: return "tool_use";
    case SkillCategory::ContainerSwitch: return "container_switch";
    case SkillCategory::Completion: return "task_completion";
    }
    return "?";
}

SkillTable::SkillTable() {
    using C = SkillCategory;
    auto add = [this](std::string name, C cat, bool src, int arms) {
        skills_.push_back({std::move(name), cat, src, arms});
    };
    add("pick", C::Pick, true, 1);
    add("place", C::Place, true, 1);

    // Container open/close operations, all target-only.
    add("slide_open", C::ContainerSwitch, false, 1);
    add("slide_close", C::ContainerSwitch, false, 1);
    add("flap_open", C::ContainerSwitch, false, 1);
    add("flap_close", C::ContainerSwitch, false, 1);
    add("open_cap", C::ContainerSwitch, false, 2);
    add("close_cap", C::ContainerSwitch, false, 2);
    add("press_open", C::ContainerSwitch, false, 1);
    add("press_close", C::ContainerSwitch, false, 1);

    // Tool usage skills.
    add("push_to", C::ToolUse, true, 1);
    add("lift_from", C::ToolUse, true, 2);
    add("wipe", C::ToolUse, true, 1);
    add("stick_on", C::ToolUse, true, 1);
    add("pour_into", C::ToolUse, true, 1);
    add("cut", C::ToolUse, true, 2);
    add("stir", C::ToolUse, true, 2);
    add("write", C::ToolUse, true, 1);
    add("inspect", C::ToolUse, true, 1);
    add("bind", C::ToolUse, true, 2);
    add("weld", C::ToolUse, true, 2);
    add("scan", C::ToolUse, true, 1);
    add("tighten", C::ToolUse, true, 1);
    // The table groups align with tool skills but gives it a single
    // target parameter; classified ToolUse/target-only.
    add("align", C::ToolUse, false, 1);
    add("assemble", C::ToolUse, true, 2);
    add("drill", C::ToolUse, true, 2);
    add("mark", C::ToolUse, true, 1);

    add("task_completion", C::Completion, false, 0);
}

const SkillTable& SkillTable::instance() {
    static SkillTable table;
    return table;
}

const SkillSpec* SkillTable::find(std::string_view name) const {
    for (const auto& s : skills_)
        if (s.name == name) return &s;
    return nullptr;
}

std::string SkillTable::listing() const {
    std::ostringstream out;
    for (const auto& s : skills_) {
        if (s.category == SkillCategory::Completion) continue;
        out << s.name << '(';
        if (s.has_source) out << "source, target";
        else out << "target";
        out << ") - " << (s.default_arms == 2 ? "Dual" : "Single") << " arm\n";
    }
    return out.str();
}

} // namespace parasched
