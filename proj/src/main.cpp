#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "parasched/generation.hpp"
#include "parasched/metrics.hpp"
#include "parasched/oracle.hpp"
#include "parasched/random_dag.hpp"
#include "parasched/scheduler.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kDomainFailure = 1;
constexpr int kLivelock = 2;
constexpr int kInputError = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int cmd_validate(const std::string& path, const std::string& format) {
    parasched::Dag dag;
    try {
        dag = parasched::parse_dag_text(read_file(path));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInputError;
    }
    auto diags = parasched::verify(dag);
    if (diags.empty()) {
        std::cout << (format == "json" ? "[]" : "OK") << '\n';
        return kOk;
    }
    if (format == "json") std::cout << parasched::diagnostics_to_json(diags) << '\n';
    else std::cout << parasched::render_problems(diags);
    return kDomainFailure;
}

int cmd_schedule(const std::string& path, const std::string& format) {
    parasched::Dag dag;
    try {
        dag = parasched::parse_dag_text(read_file(path));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInputError;
    }
    try {
        parasched::Plan plan = parasched::schedule(dag);
        if (format == "json") std::cout << parasched::plan_to_json(plan) << '\n';
        else if (format == "svg")
            std::cout << parasched::gantt(plan, parasched::GanttFormat::Svg);
        else std::cout << parasched::gantt(plan, parasched::GanttFormat::Ascii);
        if (plan.rollback_count && format != "json" && format != "svg")
            std::cout << "\nRollbacks: " << plan.rollback_count << '\n';
        return kOk;
    } catch (const parasched::LivelockError& e) {
        std::cerr << "livelock: " << e.what() << '\n' << e.queue_snapshot();
        return kLivelock;
    }
}

int cmd_plan(const std::string& instruction, const std::string& corpus_root, bool use_llm,
             const std::string& format) {
    auto corpus = parasched::load_corpus(corpus_root);
    for (const auto& err : corpus.errors) std::cerr << "corpus: " << err << '\n';
    std::vector<parasched::TaskPackage> all;
    for (const auto& [scene, pkgs] : corpus.scenes)
        all.insert(all.end(), pkgs.begin(), pkgs.end());
    auto retrieved = parasched::retrieve_packages(instruction, all);
    if (retrieved.empty()) {
        std::cerr << "no package found for instruction\n";
        return kDomainFailure;
    }
    std::cout << "Retrieved packages:\n";
    for (const auto& p : retrieved)
        std::cout << "  Package " << p.package_id << ": " << p.title << " (" << p.scene
                  << ")\n";
    std::cout << '\n';

    parasched::Dag dag;
    try {
        if (use_llm) {
            parasched::RemoteLlmGenerator gen;
            parasched::GenerationContext context{
                instruction, retrieved.front().scene + " scene",
                parasched::serialize_packages(retrieved)};
            auto report = parasched::generate_with_correction(gen, context);
            if (!report.valid) {
                std::cerr << "generated DAG still invalid after "
                          << report.retries_used << " retries\n";
                std::cerr << parasched::render_problems(
                    report.diagnostics_per_round.back());
                return kDomainFailure;
            }
            dag = report.final_dag;
        } else {
            dag = parasched::rule_based_dag(retrieved);
        }
    } catch (const std::exception& e) {
        std::cerr << "generation failed: " << e.what() << '\n';
        return kDomainFailure;
    }

    try {
        parasched::Plan plan = parasched::schedule(dag);
        if (format == "json") {
            std::cout << parasched::plan_to_json(plan) << '\n';
        } else {
            std::cout << parasched::gantt(plan, parasched::GanttFormat::Ascii);
            std::size_t ideal = 0;
            for (const auto& p : retrieved) ideal += p.steps.size();
            std::size_t actual = dag.nodes.size() - 1;
            auto report = parasched::ExecutionReport::all_success(actual);
            std::cout << "\nMetrics:\n";
            std::cout << "  TEI: " << parasched::tei(report, plan.makespan) << '\n';
            std::cout << "  TFR: " << parasched::tfr(report) << '\n';
            std::cout << "  PPR: " << parasched::ppr(actual, ideal) << '\n';
            std::cout << "  APR: " << parasched::apr(plan) << '\n';
            std::cout << "  Sequential baseline: "
                      << parasched::sequential_duration(retrieved) << " seconds\n";
            std::cout << "  Parallel intervals: "
                      << parasched::parallel_intervals(plan).size() << '\n';
        }
        return kOk;
    } catch (const parasched::LivelockError& e) {
        std::cerr << "livelock: " << e.what() << '\n';
        return kLivelock;
    }
}

int cmd_bench(const std::string& corpus_root, bool with_oracle, unsigned seed,
              std::size_t max_nodes, const std::string& format) {
    auto corpus = parasched::load_corpus(corpus_root);
    for (const auto& err : corpus.errors) std::cerr << "corpus: " << err << '\n';

    std::vector<parasched::MetricRow> rows;
    for (const auto& [scene, pkgs] : corpus.scenes) {
        std::map<std::string, std::vector<parasched::TaskPackage>> by_difficulty;
        for (const auto& p : pkgs)
            by_difficulty[p.difficulty.empty() ? "unrated" : p.difficulty].push_back(p);
        for (const auto& [difficulty, group_pkgs] : by_difficulty) {
            std::size_t limit = std::min<std::size_t>(5, group_pkgs.size());
            for (std::size_t k = 1; k <= limit; ++k) {
                std::vector<parasched::TaskPackage> group(group_pkgs.begin(),
                                                          group_pkgs.begin() +
                                                              static_cast<long>(k));
                auto dag = parasched::rule_based_dag(group);
                auto plan = parasched::schedule(dag);
                std::size_t ideal = 0;
                for (const auto& p : group) ideal += p.steps.size();
                std::size_t actual = dag.nodes.size() - 1;
                auto report = parasched::ExecutionReport::all_success(actual);
                parasched::MetricSet m{parasched::tei(report, plan.makespan),
                                       parasched::tfr(report),
                                       parasched::ppr(actual, ideal),
                                       parasched::apr(plan)};
                rows.push_back({scene + "/" + difficulty + "/group" + std::to_string(k), m});
            }
        }
    }
    if (format == "csv") std::cout << parasched::metrics_table_csv(rows);
    else std::cout << parasched::metrics_table_text(rows);

    if (with_oracle) {
        std::mt19937 rng(seed);
        std::cout << "\nScheduler vs oracle (seed " << seed << ", max " << max_nodes
                  << " nodes):\n";
        for (int i = 0; i < 50; ++i) {
            auto dag = parasched::random_valid_dag(rng, max_nodes);
            auto plan = parasched::schedule(dag);
            auto oracle = parasched::optimal_makespan(dag, max_nodes);
            double ratio = static_cast<double>(plan.makespan) /
                           static_cast<double>(oracle.optimal_makespan);
            std::cout << "  case " << i << ": nodes=" << dag.nodes.size()
                      << " greedy=" << plan.makespan
                      << " optimal=" << oracle.optimal_makespan << " ratio=" << ratio
                      << '\n';
        }
    }
    return kOk;
}

int cmd_explain_choice(const std::string& skill, const std::string& source,
                       const std::string& target, long start, long lf, long rf, bool ll,
                       bool rl, const std::string& lc, const std::string& rc) {
    const parasched::SkillSpec* spec = parasched::SkillTable::instance().find(skill);
    if (!spec) {
        std::cerr << "unknown skill: " << skill << '\n';
        return kInputError;
    }
    parasched::DagNode task;
    task.index = 1;
    task.skill = skill;
    task.type = spec->category;
    if (!source.empty()) task.source = source;
    task.target = target;
    task.arm_num = spec->default_arms;
    parasched::ArmState left{parasched::Arm::Left, lf, ll,
                             lc.empty() ? std::nullopt : std::optional(lc)};
    parasched::ArmState right{parasched::Arm::Right, rf, rl,
                              rc.empty() ? std::nullopt : std::optional(rc)};
    auto res = parasched::choose_arm(task, start, left, right);
    std::cout << "choice: " << parasched::to_string(res.choice) << '\n';
    std::cout << "branch: " << res.branch << '\n';
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dual-arm cooperative task scheduler"};
    app.require_subcommand(1);

    std::string dag_path, format = "text", corpus_root = "corpus", instruction;
    bool use_llm = false, with_oracle = false;
    unsigned seed = 1;
    std::size_t max_nodes = 8;

    auto* validate = app.add_subcommand("validate", "Check a DAG file for dependency problems");
    validate->add_option("dag", dag_path, "DAG text file")->required();
    validate->add_option("--format", format, "text|json");

    auto* schedule = app.add_subcommand("schedule", "Schedule a DAG onto two arms");
    schedule->add_option("dag", dag_path, "DAG text file")->required();
    schedule->add_option("--format", format, "text|json|svg");

    auto* plan = app.add_subcommand("plan", "Instruction to schedule, end to end");
    plan->add_option("instruction", instruction, "natural language request")->required();
    plan->add_option("--corpus", corpus_root, "corpus root directory");
    plan->add_flag("--llm", use_llm, "use the remote generator");
    plan->add_option("--format", format, "text|json");

    auto* bench = app.add_subcommand("bench", "Metric tables over the corpus");
    bench->add_option("--corpus", corpus_root, "corpus root directory");
    bench->add_flag("--oracle", with_oracle, "compare against the exact oracle");
    bench->add_option("--seed", seed, "random seed for oracle cases");
    bench->add_option("--max-nodes", max_nodes, "node cap for oracle cases");
    bench->add_option("--format", format, "text|csv");

    std::string skill, source, target, lc, rc;
    long start = 0, lf = 0, rf = 0;
    bool ll = false, rl = false;
    auto* explain = app.add_subcommand("explain-choice", "Show which selector rule fires");
    explain->add_option("--skill", skill)->required();
    explain->add_option("--source", source);
    explain->add_option("--target", target)->required();
    explain->add_option("--start", start, "dependency-ready time");
    explain->add_option("--left-free", lf);
    explain->add_option("--right-free", rf);
    explain->add_flag("--left-locked", ll);
    explain->add_flag("--right-locked", rl);
    explain->add_option("--left-chain", lc);
    explain->add_option("--right-chain", rc);

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) return cmd_validate(dag_path, format);
        if (schedule->parsed()) return cmd_schedule(dag_path, format);
        if (plan->parsed()) return cmd_plan(instruction, corpus_root, use_llm, format);
        if (bench->parsed()) return cmd_bench(corpus_root, with_oracle, seed, max_nodes, format);
        if (explain->parsed())
            return cmd_explain_choice(skill, source, target, start, lf, rf, ll, rl, lc, rc);
    } catch (const parasched::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kDomainFailure;
    }
    return kOk;
}
