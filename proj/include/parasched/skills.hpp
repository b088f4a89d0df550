#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace parasched {

/// Semantic category of a skill, mirrored by DAG node types.
enum class SkillCategory {
    Pick,
    Place,
    ToolUse,
    ContainerSwitch,
    Completion,
};

std::string_view to_string(SkillCategory c);

/// One entry of the skill library: name, parameter shape, arm requirement.
struct SkillSpec {
    std::string name;
    SkillCategory category{};
    bool has_source{};   // false => target-only skill
    int default_arms{1}; // 1 or 2
};

/// The fixed skill table. Lookup is by exact name.
class SkillTable {
public:
    static const SkillTable& instance();

    const SkillSpec* find(std::string_view name) const;
    const std::vector<SkillSpec>& all() const { return skills_; }

    /// Rendered one-per-line listing for prompt templates.
    std::string listing() const;

private:
    SkillTable();
    std::vector<SkillSpec> skills_;
};

} // namespace parasched
