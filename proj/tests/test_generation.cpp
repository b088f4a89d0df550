#include "doctest.h"

#include <cstdlib>
#include <random>

#include "parasched/generation.hpp"
#include "parasched/metrics.hpp"
#include "parasched/scheduler.hpp"
#include "test_util.hpp"

using namespace parasched;

namespace {

std::vector<TaskPackage> scene_packages(const std::string& scene) {
    auto corpus = load_corpus(testutil::corpus_dir());
    return corpus.scenes.at(scene);
}

const char* kValidDagText = R"(Nodes:
node_1:
type: pick
name: pick(source="table", target="cup")
arm_num: 1
take_time: 5
edge: []

node_2:
type: place
name: place(source="cup", target="table")
arm_num: 1
take_time: 5
edge: [1]

node_3:
type: task_completion
name: task_completion
arm_num: 0
take_time: 0
edge: [2]
)";

// Parses fine but fails verification: the place skips the required
// tool-use of the knife.
const char* kInvalidDagText = R"(Nodes:
node_1:
type: pick
name: pick(source="counter", target="knife")
arm_num: 1
take_time: 5
edge: []

node_2:
type: cut
name: cut(source="knife", target="carrots")
arm_num: 2
take_time: 10
edge: [1]

node_3:
type: place
name: place(source="knife", target="counter")
arm_num: 1
take_time: 5
edge: [1]

node_4:
type: task_completion
name: task_completion
arm_num: 0
take_time: 0
edge: [2, 3]
)";

GenerationContext context() {
    return {"test instruction", "test environment", "Package A: Test\n"};
}

} // namespace

TEST_CASE("retrieval finds the kitchen meal packages by shared tokens") {
    auto corpus = scene_packages("kitchen");
    REQUIRE(corpus.size() == 5);
    auto hits = retrieve_packages("make me carrot slices, apple salad and cream bread", corpus);
    REQUIRE(hits.size() == 3);
    CHECK(hits[0].package_id == 'A');
    CHECK(hits[1].package_id == 'B');
    CHECK(hits[2].package_id == 'C');
}

TEST_CASE("retrieval finds both greenhouse packages") {
    auto hits = retrieve_packages("pack cucumbers and prepare seed tray for sprouting",
                                  scene_packages("greenhouse"));
    REQUIRE(hits.size() == 2);
    CHECK(hits[0].package_id == 'A');
    CHECK(hits[1].package_id == 'B');
}

TEST_CASE("retrieval returns nothing for an unrelated instruction") {
    CHECK(retrieve_packages("fold laundry", scene_packages("kitchen")).empty());
}

TEST_CASE("the first-round prompt embeds every placeholder and the criteria") {
    auto text = render_prompt(PromptKind::DagFirst,
                              {{"target_env", "objects on the table"},
                               {"instruction", "make carrot slices"},
                               {"rag_output", "\nPackage A: Make carrot slices"},
                               {"skill_list", SkillTable::instance().listing()}});
    CHECK(text.find("make carrot slices") != std::string::npos);
    CHECK(text.find("objects on the table") != std::string::npos);
    CHECK(text.find("You must follow the following criteria:") != std::string::npos);
    CHECK(text.find("node_6") != std::string::npos);
    CHECK(text.find("task_completion") != std::string::npos);
    CHECK(text.find("{") == text.find("{index")); // no unfilled placeholders remain
}

TEST_CASE("the correction prompt splices in the problem lines") {
    auto diags = verify(parse_dag_text(kInvalidDagText));
    REQUIRE(!diags.empty());
    auto text = render_prompt(PromptKind::DagCorrection,
                              {{"response", kInvalidDagText},
                               {"problems_section", render_problems(diags)}});
    CHECK(text.find("node_3: P2") != std::string::npos);
    CHECK(text.find("pick - use - place pattern") != std::string::npos);
}

TEST_CASE("rendering without a placeholder value is an error") {
    CHECK_THROWS_AS(render_prompt(PromptKind::Steps, {}), DomainError);
    CHECK_NOTHROW(render_prompt(PromptKind::Steps, {{"context", "steps here"}}));
}

TEST_CASE("a single package becomes its six-node spine") {
    auto kitchen = scene_packages("kitchen");
    auto dag = rule_based_dag({kitchen[0]});
    REQUIRE(dag.nodes.size() == 6);
    CHECK(dag.node(1).skill == "pick");
    CHECK(*dag.node(1).target == "carrots");
    CHECK(dag.node(2).skill == "place");
    CHECK(dag.node(3).skill == "pick");
    CHECK(*dag.node(3).target == "knife");
    CHECK(dag.node(3).edges == std::vector<int>{2});
    CHECK(dag.node(4).skill == "cut");
    CHECK(dag.node(4).edges == std::vector<int>{3});
    CHECK(dag.node(5).skill == "place");
    CHECK(dag.node(5).edges == std::vector<int>{4});
    CHECK(dag.node(6).type == SkillCategory::Completion);
    CHECK(verify(dag).empty());
}

TEST_CASE("shared tools merge into one pick-use-chain-place spine") {
    auto kitchen = scene_packages("kitchen");
    auto dag = rule_based_dag({kitchen[0], kitchen[1]});
    int knife_picks = 0, knife_places = 0;
    std::vector<int> cuts;
    for (const auto& n : dag.nodes) {
        if (n.skill == "pick" && *n.target == "knife") ++knife_picks;
        if (n.skill == "place" && *n.source == "knife") ++knife_places;
        if (n.skill == "cut") cuts.push_back(n.index);
    }
    CHECK(knife_picks == 1);
    CHECK(knife_places == 1);
    REQUIRE(cuts.size() == 2);
    // the second cut chains off the first
    CHECK(dag.node(cuts[1]).edges == std::vector<int>{cuts[0]});
    CHECK(verify(dag).empty());
    // 10 package steps collapse to 8 operational nodes
    CHECK(dag.nodes.size() == 9);
    CHECK(ppr(dag.nodes.size() - 1, 10) == doctest::Approx(0.2));
}

TEST_CASE("the full kitchen set reproduces the 18-node reference graph") {
    auto kitchen = scene_packages("kitchen");
    auto dag = rule_based_dag({kitchen[0], kitchen[1], kitchen[2]});
    CHECK(dag.nodes.size() == 18);
    CHECK(verify(dag).empty());
    auto plan = schedule(dag);
    CHECK(plan.makespan <= 82);
    CHECK(validate_plan(plan, dag).empty());
    CHECK(ppr(dag.nodes.size() - 1, 19) == doctest::Approx(2.0 / 19.0));
}

TEST_CASE("no packages yield a completion-only graph") {
    auto dag = rule_based_dag({});
    REQUIRE(dag.nodes.size() == 1);
    CHECK(dag.nodes.front().type == SkillCategory::Completion);
}

TEST_CASE("every package combination from the corpus verifies clean") {
    auto corpus = load_corpus(testutil::corpus_dir());
    std::mt19937 rng(91);
    for (const auto& [scene, pkgs] : corpus.scenes) {
        for (int i = 0; i < 50; ++i) {
            std::vector<TaskPackage> subset;
            for (const auto& pkg : pkgs)
                if (std::uniform_int_distribution<int>(0, 1)(rng)) subset.push_back(pkg);
            auto dag = rule_based_dag(subset);
            CHECK(verify(dag).empty());
            if (dag.nodes.size() > 1) {
                auto plan = schedule(dag);
                CHECK(validate_plan(plan, dag).empty());
            }
        }
    }
}

TEST_CASE("an invalid first round is corrected on the retry") {
    ScriptedGenerator gen({kInvalidDagText, kValidDagText});
    auto report = generate_with_correction(gen, context());
    CHECK(report.valid);
    CHECK(report.retries_used == 1);
    CHECK(gen.calls() == 2);
    REQUIRE(report.diagnostics_per_round.size() == 2);
    CHECK(!report.diagnostics_per_round[0].empty());
    CHECK(report.diagnostics_per_round[1].empty());
    CHECK(verify(report.final_dag).empty());
}

TEST_CASE("a valid first round needs no retries") {
    ScriptedGenerator gen({kValidDagText});
    auto report = generate_with_correction(gen, context());
    CHECK(report.valid);
    CHECK(report.retries_used == 0);
    CHECK(gen.calls() == 1);
}

TEST_CASE("persistent problems stop after two retries") {
    ScriptedGenerator gen({kInvalidDagText, kInvalidDagText, kInvalidDagText, kValidDagText});
    auto report = generate_with_correction(gen, context());
    CHECK_FALSE(report.valid);
    CHECK(report.retries_used == 2);
    CHECK(gen.calls() == 3); // never a fourth generation call
    REQUIRE(report.diagnostics_per_round.size() == 3);
}

TEST_CASE("an unparseable final answer is a hard error") {
    ScriptedGenerator gen({"garbage", "still garbage", "worse"});
    CHECK_THROWS_AS(generate_with_correction(gen, context()), DomainError);
}

TEST_CASE("the remote client refuses to start without configuration") {
    // ensure a clean environment for this check
    unsetenv("PARASCHED_LLM_URL");
    unsetenv("PARASCHED_LLM_MODEL");
    unsetenv("PARASCHED_LLM_KEY");
    CHECK_THROWS_AS(RemoteLlmGenerator{}, DomainError);
}
