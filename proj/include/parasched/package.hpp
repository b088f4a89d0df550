#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "parasched/skills.hpp"

namespace parasched {

/// Parse failure carrying the byte offset into the input that caused it.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string message, std::size_t offset)
        : std::runtime_error(std::move(message)), offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

/// One skill invocation from a task package, e.g.
/// `A1: pick(source="table", target="carrots")(Single arm, 5 seconds)`.
struct PackageStep {
    std::string step_id;               // package letter + ordinal, "A1"
    std::string skill;                 // resolved against the skill table
    std::optional<std::string> source; // absent for target-only skills
    std::string target;
    int arm_count{1};
    int duration{0}; // integer seconds, > 0

    const SkillSpec& spec() const;
    /// `skill(source="...", target="...")` without id or duration suffix.
    std::string call_text() const;
    /// The full step line, exactly as parsed.
    std::string line_text() const;
};

struct TaskPackage {
    char package_id{};
    std::string title;
    std::string scene;      // may be empty when no scene header was given
    std::string difficulty; // easy|medium|hard, empty if unknown
    std::vector<PackageStep> steps;
};

/// Parse one step line. Throws ParseError / UnknownSkillError.
PackageStep parse_step(std::string_view line);

/// A bare skill call without step id or duration suffix, as used in
/// DAG node names.
struct SkillCall {
    std::string skill;
    std::optional<std::string> source;
    std::string target;
    const SkillSpec* spec{};
};

SkillCall parse_skill_call(std::string_view text);

class UnknownSkillError : public ParseError {
public:
    UnknownSkillError(std::string skill, std::size_t offset)
        : ParseError("unknown skill: " + skill, offset), skill_(std::move(skill)) {}
    const std::string& skill() const { return skill_; }

private:
    std::string skill_;
};

/// Parse a block of package text: optional "<scene> scene" lines,
/// "Package X: Title" headers, step lines. Blank lines are ignored.
std::vector<TaskPackage> parse_package_text(std::string_view text);

/// Canonical re-rendering; parse_package_text(serialize(...)) round-trips.
std::string serialize_packages(const std::vector<TaskPackage>& pkgs);

/// Sum of all step durations across packages (sequential baseline).
long sequential_duration(const std::vector<TaskPackage>& pkgs);

struct Corpus {
    // scene -> packages sorted by package letter
    std::map<std::string, std::vector<TaskPackage>> scenes;
    std::vector<std::string> errors; // per-file problems, loading continues

    std::size_t package_count() const;
};

/// Load scene subdirectories of package text files. Files may start with
/// a `# difficulty: easy|medium|hard` metadata line.
Corpus load_corpus(const std::filesystem::path& root);

} // namespace parasched
