#include "parasched/generation.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "httplib.h"

namespace parasched {

std::filesystem::path asset_dir() {
    if (const char* env = std::getenv("PARASCHED_ASSET_DIR")) return env;
#ifdef PARASCHED_ASSET_DIR
    return PARASCHED_ASSET_DIR;
#else
    return "assets";
#endif
}

std::string RuleBasedGenerator::generate(const std::string&) {
    return serialize_dag(rule_based_dag(pkgs_));
}

std::string ScriptedGenerator::generate(const std::string&) {
    if (next_ >= responses_.size())
        throw DomainError("scripted generator exhausted after " +
                          std::to_string(responses_.size()) + " responses");
    return responses_[next_++];
}

RemoteLlmGenerator::RemoteLlmGenerator() {
    const char* url = std::getenv("PARASCHED_LLM_URL");
    const char* model = std::getenv("PARASCHED_LLM_MODEL");
    const char* key = std::getenv("PARASCHED_LLM_KEY");
    if (!url || !model || !key)
        throw DomainError(
            "remote mode requires PARASCHED_LLM_URL, PARASCHED_LLM_MODEL and "
            "PARASCHED_LLM_KEY");
    url_ = url;
    model_ = model;
    key_ = key;
}

std::string RemoteLlmGenerator::generate(const std::string& prompt) {
    std::string host = url_;
    std::string path = "/v1/chat/completions";
    auto scheme_end = host.find("://");
    if (scheme_end != std::string::npos) host = host.substr(scheme_end + 3);
    auto slash = host.find('/');
    if (slash != std::string::npos) {
        path = host.substr(slash);
        host = host.substr(0, slash);
    }
    httplib::Client client(host);
    client.set_read_timeout(120, 0);
    nlohmann::json body{{"model", model_},
                        {"messages", {{{"role", "user"}, {"content", prompt}}}}};
    httplib::Headers headers{{"Authorization", "Bearer " + key_}};
    auto res = client.Post(path, headers, body.dump(), "application/json");
    if (!res || res->status != 200)
        throw DomainError("remote generation failed: " +
                          (res ? "HTTP " + std::to_string(res->status)
                               : httplib::to_string(res.error())));
    auto parsed = nlohmann::json::parse(res->body);
    return parsed.at("choices").at(0).at("message").at("content").get<std::string>();
}

namespace {

const std::set<std::string>& stopwords() {
    static const std::set<std::string> words{
        "a",   "an",   "and", "the",  "me",   "my",   "please", "for", "to",
        "of",  "with", "on",  "in",   "it",   "make", "prepare", "some", "then",
        "you", "need", "i",   "want", "task", "do"};
    return words;
}

std::set<std::string> content_tokens(const std::string& text) {
    std::set<std::string> out;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty() && !stopwords().contains(cur)) out.insert(cur);
        cur.clear();
    };
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c)))
            cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        else flush();
    }
    flush();
    return out;
}

} // namespace

std::vector<TaskPackage> retrieve_packages(const std::string& instruction,
                                           const std::vector<TaskPackage>& corpus) {
    auto wanted = content_tokens(instruction);
    std::vector<TaskPackage> out;
    for (const auto& pkg : corpus) {
        std::string haystack = pkg.title;
        for (const auto& s : pkg.steps) {
            if (s.source) haystack += " " + *s.source;
            haystack += " " + s.target;
        }
        auto tokens = content_tokens(haystack);
        bool hit = std::any_of(tokens.begin(), tokens.end(),
                               [&](const std::string& t) { return wanted.contains(t); });
        if (hit) out.push_back(pkg);
    }
    return out;
}

namespace {

const char* template_file(PromptKind kind) {
    switch (kind) {
    case PromptKind::Steps: return "steps.txt";
    case PromptKind::DagFirst: return "dag_first.txt";
    case PromptKind::DagCorrection: return "dag_correction.txt";
    }
    return "";
}

} // namespace

std::string render_prompt(PromptKind kind,
                          const std::map<std::string, std::string>& values) {
    auto path = asset_dir() / "templates" / template_file(kind);
    std::ifstream in(path);
    if (!in) throw DomainError("template not found: " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();

    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size();) {
        if (text[i] == '{') {
            std::size_t close = text.find('}', i);
            if (close != std::string::npos) {
                std::string key = text.substr(i + 1, close - i - 1);
                bool identifier = !key.empty() &&
                                  std::all_of(key.begin(), key.end(), [](char c) {
                                      return std::islower(static_cast<unsigned char>(c)) ||
                                             c == '_';
                                  });
                if (identifier) {
                    auto it = values.find(key);
                    if (it == values.end())
                        throw DomainError("missing placeholder value: " + key);
                    out += it->second;
                    i = close + 1;
                    continue;
                }
            }
        }
        out += text[i++];
    }
    return out;
}

namespace {

bool is_open_switch(const std::string& skill) {
    return skill.find("open") != std::string::npos;
}

struct StepRef {
    std::size_t pkg{};
    std::size_t idx{};
    const PackageStep* step{};
};

// A cross-package tool chain merged into one pick-use*-place spine.
struct MergeGroup {
    std::string object;
    StepRef pick;
    std::vector<StepRef> uses; // package order, then step order
    StepRef place;
    std::set<std::pair<std::size_t, std::size_t>> members;
    std::pair<std::size_t, std::size_t> trigger; // step that emits the group
};

} // namespace

Dag rule_based_dag(const std::vector<TaskPackage>& pkgs) {
    // Detect tool chains shared across packages: identical use skill and
    // source object appearing in more than one package.
    std::map<std::pair<std::string, std::string>, std::set<std::size_t>> key_pkgs;
    for (std::size_t p = 0; p < pkgs.size(); ++p)
        for (const auto& s : pkgs[p].steps)
            if (s.spec().category == SkillCategory::ToolUse && s.source)
                key_pkgs[{s.skill, *s.source}].insert(p);

    std::vector<MergeGroup> groups;
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> membership;
    for (const auto& [key, pkg_set] : key_pkgs) {
        if (pkg_set.size() < 2) continue;
        MergeGroup g;
        g.object = key.second;
        bool have_pick = false, have_place = false;
        for (std::size_t p : pkg_set) {
            for (std::size_t i = 0; i < pkgs[p].steps.size(); ++i) {
                const auto& s = pkgs[p].steps[i];
                auto cat = s.spec().category;
                bool member = false;
                if (cat == SkillCategory::Pick && s.target == g.object) {
                    if (!have_pick) {
                        g.pick = {p, i, &s};
                        have_pick = true;
                    }
                    member = true;
                } else if (cat == SkillCategory::ToolUse && s.skill == key.first &&
                           s.source && *s.source == g.object) {
                    g.uses.push_back({p, i, &s});
                    member = true;
                } else if (cat == SkillCategory::Place && s.source &&
                           *s.source == g.object) {
                    if (!have_place) {
                        g.place = {p, i, &s};
                        have_place = true;
                    }
                    member = true;
                }
                if (member) g.members.insert({p, i});
            }
        }
        if (!have_pick || !have_place) continue;
        std::size_t last_pkg = *pkg_set.rbegin();
        for (std::size_t i = 0; i < pkgs[last_pkg].steps.size(); ++i)
            if (g.members.contains({last_pkg, i})) {
                g.trigger = {last_pkg, i};
                break;
            }
        for (const auto& m : g.members) membership[m] = groups.size();
        groups.push_back(std::move(g));
    }

    // Emit nodes in step order; merged chains appear contiguously where
    // their last contributing package first touches the chain.
    struct Emitted {
        const PackageStep* step;
        int index;
    };
    std::vector<Emitted> emitted;
    auto emit = [&](const PackageStep& s) {
        emitted.push_back({&s, static_cast<int>(emitted.size()) + 1});
        return emitted.back().index;
    };
    for (std::size_t p = 0; p < pkgs.size(); ++p) {
        for (std::size_t i = 0; i < pkgs[p].steps.size(); ++i) {
            auto member = membership.find({p, i});
            if (member == membership.end()) {
                emit(pkgs[p].steps[i]);
                continue;
            }
            const MergeGroup& g = groups[member->second];
            if (g.trigger != std::make_pair(p, i)) continue;
            emit(*g.pick.step);
            for (const auto& u : g.uses) emit(*u.step);
            emit(*g.place.step);
        }
    }

    // Lookup tables over emitted nodes.
    std::map<std::string, int> pick_of, place_of, open_of, last_use_of;
    std::map<std::string, int> last_pick_from; // container -> latest pick out of it
    std::map<std::string, std::vector<int>> places_into; // target -> place nodes
    std::map<std::string, std::vector<const PackageStep*>> uses_of;
    for (const auto& e : emitted) {
        const auto& s = *e.step;
        switch (s.spec().category) {
        case SkillCategory::Pick:
            if (!pick_of.contains(s.target)) pick_of[s.target] = e.index;
            if (s.source) last_pick_from[*s.source] = e.index;
            break;
        case SkillCategory::Place:
            if (!place_of.contains(*s.source)) place_of[*s.source] = e.index;
            places_into[s.target].push_back(e.index);
            break;
        case SkillCategory::ToolUse:
            if (s.source) uses_of[*s.source].push_back(&s);
            break;
        case SkillCategory::ContainerSwitch:
            if (is_open_switch(s.skill)) open_of[s.target] = e.index;
            break;
        default: break;
        }
    }

    std::vector<DagNode> nodes;
    std::map<std::string, int> chain_tail; // object -> pick or latest use node
    for (const auto& e : emitted) {
        const auto& s = *e.step;
        DagNode node;
        node.index = e.index;
        node.type = s.spec().category;
        node.skill = s.skill;
        node.name = s.call_text();
        node.source = s.source;
        node.target = s.target;
        node.arm_num = s.arm_count;
        node.take_time = s.duration;

        std::set<int> edges;
        switch (node.type) {
        case SkillCategory::Pick: {
            // Containers must be open before anything comes out of them.
            if (s.source && open_of.contains(*s.source)) edges.insert(open_of[*s.source]);
            // An object later placed onto a placed surface waits for
            // that surface to be in position.
            auto own_place = place_of.find(s.target);
            if (own_place != place_of.end()) {
                // Find the place step to learn its target surface.
                for (const auto& e2 : emitted)
                    if (e2.index == own_place->second) {
                        auto surface = place_of.find(e2.step->target);
                        if (surface != place_of.end()) edges.insert(surface->second);
                        break;
                    }
            }
            // A tool pick waits for every use target to be in position.
            for (const PackageStep* use : uses_of[s.target]) {
                auto target_place = place_of.find(use->target);
                if (target_place != place_of.end()) edges.insert(target_place->second);
            }
            chain_tail[s.target] = e.index;
            break;
        }
        case SkillCategory::ToolUse:
            if (s.source) {
                auto tail = chain_tail.find(*s.source);
                if (tail == chain_tail.end())
                    throw DomainError("use of '" + *s.source + "' before its pick in step " +
                                      s.step_id);
                edges.insert(tail->second);
                chain_tail[*s.source] = e.index;
            }
            break;
        case SkillCategory::Place: {
            auto tail = chain_tail.find(*s.source);
            if (tail == chain_tail.end())
                throw DomainError("place of '" + *s.source + "' before its pick in step " +
                                  s.step_id);
            edges.insert(tail->second);
            chain_tail.erase(*s.source);
            break;
        }
        case SkillCategory::ContainerSwitch:
            if (!is_open_switch(s.skill)) {
                // Close after the last retrieval and after returns.
                auto last = last_pick_from.find(s.target);
                if (last != last_pick_from.end() && last->second < e.index)
                    edges.insert(last->second);
                for (int idx : places_into[s.target])
                    if (idx < e.index) edges.insert(idx);
                if (edges.empty() && open_of.contains(s.target))
                    edges.insert(open_of[s.target]);
            }
            break;
        default: break;
        }
        // Only backward edges keep the graph acyclic; forward references
        // signal contradictory packages.
        for (int idx : edges)
            if (idx >= e.index)
                throw DomainError("unresolvable ordering between steps around " + s.step_id);
        node.edges.assign(edges.begin(), edges.end());
        nodes.push_back(std::move(node));
    }

    // Completion sink over every node without successors.
    std::set<int> has_successor;
    for (const auto& n : nodes)
        for (int e : n.edges) has_successor.insert(e);
    DagNode completion;
    completion.index = static_cast<int>(nodes.size()) + 1;
    completion.type = SkillCategory::Completion;
    completion.skill = "task_completion";
    completion.name = "task_completion";
    completion.arm_num = 0;
    completion.take_time = 0;
    for (const auto& n : nodes)
        if (!has_successor.contains(n.index)) completion.edges.push_back(n.index);
    nodes.push_back(std::move(completion));

    return build_graph(std::move(nodes));
}

GenerationReport generate_with_correction(PlanGenerator& gen,
                                          const GenerationContext& context) {
    std::string skills = SkillTable::instance().listing();
    std::string prompt = render_prompt(PromptKind::DagFirst,
                                       {{"target_env", context.environment},
                                        {"instruction", context.instruction},
                                        {"rag_output", "\n" + context.package_text},
                                        {"skill_list", skills}});
    GenerationReport report;
    std::string last_error;
    for (int round = 0; round <= 2; ++round) {
        std::string response = gen.generate(prompt);
        std::string problems;
        try {
            report.final_dag = parse_dag_text(response);
        } catch (const std::exception& e) {
            last_error = e.what();
            report.diagnostics_per_round.push_back({});
            if (round == 2) break;
            problems = std::string("The output could not be parsed as a DAG: ") + e.what() +
                       "\n";
            prompt = render_prompt(PromptKind::DagCorrection,
                                   {{"response", response}, {"problems_section", problems}});
            report.retries_used = round + 1;
            continue;
        }
        auto diags = verify(report.final_dag);
        report.diagnostics_per_round.push_back(diags);
        if (diags.empty()) {
            report.valid = true;
            return report;
        }
        last_error.clear();
        if (round == 2) break;
        prompt = render_prompt(PromptKind::DagCorrection,
                               {{"response", response},
                                {"problems_section", render_problems(diags)}});
        report.retries_used = round + 1;
    }
    if (!last_error.empty())
        throw DomainError("generation failed after retries: " + last_error);
    report.valid = false;
    return report;
}

} // namespace parasched
