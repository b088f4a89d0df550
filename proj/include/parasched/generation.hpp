#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "parasched/dag.hpp"
#include "parasched/package.hpp"
#include "parasched/validator.hpp"

namespace parasched {

/// Produces DAG text from a prompt. Output may be invalid; validation
/// is the caller's job.
class PlanGenerator {
public:
    virtual ~PlanGenerator() = default;
    virtual std::string generate(const std::string& prompt) = 0;
};

/// Deterministic offline generator; ignores the prompt and derives the
/// graph from structured packages.
class RuleBasedGenerator : public PlanGenerator {
public:
    explicit RuleBasedGenerator(std::vector<TaskPackage> pkgs) : pkgs_(std::move(pkgs)) {}
    std::string generate(const std::string& prompt) override;

private:
    std::vector<TaskPackage> pkgs_;
};

/// Replays canned responses in order; for tests.
class ScriptedGenerator : public PlanGenerator {
public:
    explicit ScriptedGenerator(std::vector<std::string> responses)
        : responses_(std::move(responses)) {}
    std::string generate(const std::string& prompt) override;
    std::size_t calls() const { return next_; }

private:
    std::vector<std::string> responses_;
    std::size_t next_{0};
};

/// Chat-completion client configured through PARASCHED_LLM_URL,
/// PARASCHED_LLM_MODEL and PARASCHED_LLM_KEY.
class RemoteLlmGenerator : public PlanGenerator {
public:
    RemoteLlmGenerator(); // throws DomainError when the env vars are unset
    std::string generate(const std::string& prompt) override;

private:
    std::string url_;
    std::string model_;
    std::string key_;
};

/// Keyword-overlap retrieval: packages sharing at least one content
/// token with the instruction, in corpus order.
std::vector<TaskPackage> retrieve_packages(const std::string& instruction,
                                           const std::vector<TaskPackage>& corpus);

enum class PromptKind { Steps, DagFirst, DagCorrection };

/// Instantiate a stored template; every {placeholder} must be supplied.
std::string render_prompt(PromptKind kind,
                          const std::map<std::string, std::string>& values);

/// Deterministic DAG construction from packages: per-object
/// pick-use-place spines, cross-package tool merging, container
/// open/close ordering, one completion sink.
Dag rule_based_dag(const std::vector<TaskPackage>& pkgs);

struct GenerationReport {
    Dag final_dag;
    int retries_used{};
    std::vector<std::vector<Diagnostic>> diagnostics_per_round;
    bool valid{};
};

struct GenerationContext {
    std::string instruction;
    std::string environment;
    std::string package_text;
};

/// Generate, verify, and retry with a correction prompt at most twice.
/// Throws DomainError when the last round still fails to parse.
GenerationReport generate_with_correction(PlanGenerator& gen,
                                          const GenerationContext& context);

/// Directory holding template assets; compile-time default, overridable
/// via the PARASCHED_ASSET_DIR environment variable.
std::filesystem::path asset_dir();

} // namespace parasched
