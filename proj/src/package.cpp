#include "parasched/package.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace parasched {

namespace {

bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

// Cursor over a single line; reports absolute byte offsets.
struct LineCursor {
    std::string_view text;
    std::size_t pos{0};
    std::size_t base{0};

    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError(what, base + pos);
    }
    bool done() const { return pos >= text.size(); }
    char peek() const { return done() ? '\0' : text[pos]; }
    void expect(std::string_view lit) {
        if (text.substr(pos, lit.size()) != lit)
            fail("expected '" + std::string(lit) + "'");
        pos += lit.size();
    }
    bool try_consume(std::string_view lit) {
        if (text.substr(pos, lit.size()) != lit) return false;
        pos += lit.size();
        return true;
    }
    std::string ident() {
        std::size_t start = pos;
        while (!done() && is_ident_char(text[pos])) ++pos;
        if (pos == start) fail("expected identifier");
        return std::string(text.substr(start, pos - start));
    }
    std::string quoted() {
        expect("\"");
        std::size_t start = pos;
        while (!done() && text[pos] != '"') ++pos;
        if (done()) fail("unterminated quote");
        std::string value(text.substr(start, pos - start));
        ++pos;
        if (value.empty()) fail("empty value");
        return value;
    }
    int integer() {
        std::size_t start = pos;
        while (!done() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos == start) fail("expected integer");
        return std::stoi(std::string(text.substr(start, pos - start)));
    }
};

// Parses `skill(source="x", target="y")` or `skill(target="y")`.
struct Call {
    std::string skill;
    std::optional<std::string> source;
    std::string target;
    const SkillSpec* spec;
};

Call parse_call(LineCursor& c) {
    Call call;
    std::size_t skill_pos = c.pos;
    call.skill = c.ident();
    call.spec = SkillTable::instance().find(call.skill);
    if (!call.spec) throw UnknownSkillError(call.skill, c.base + skill_pos);
    c.expect("(");
    if (c.try_consume("source=")) {
        call.source = c.quoted();
        c.expect(", ");
    }
    c.expect("target=");
    call.target = c.quoted();
    c.expect(")");
    if (call.spec->has_source != call.source.has_value())
        c.fail(call.spec->has_source ? "skill '" + call.skill + "' requires a source"
                                     : "skill '" + call.skill + "' takes no source");
    return call;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

PackageStep parse_step_at(std::string_view line, std::size_t base) {
    LineCursor c{line, 0, base};
    if (c.done() || !std::isupper(static_cast<unsigned char>(c.peek())))
        c.fail("expected step id");
    std::string id(1, c.text[c.pos++]);
    std::size_t digits = c.pos;
    while (!c.done() && std::isdigit(static_cast<unsigned char>(c.peek())))
        id += c.text[c.pos++];
    if (c.pos == digits) c.fail("expected step ordinal");
    c.expect(": ");
    Call call = parse_call(c);
    c.expect("(");
    int arms;
    if (c.try_consume("Single arm, ")) arms = 1;
    else if (c.try_consume("Dual arm, ")) arms = 2;
    else c.fail("expected 'Single arm' or 'Dual arm'");
    int duration = c.integer();
    c.expect(" seconds)");
    if (!c.done()) c.fail("trailing characters after step");
    if (duration <= 0) c.fail("duration must be positive");
    if (arms != call.spec->default_arms)
        c.fail("arm count does not match skill '" + call.skill + "'");

    PackageStep step;
    step.step_id = std::move(id);
    step.skill = std::move(call.skill);
    step.source = std::move(call.source);
    step.target = std::move(call.target);
    step.arm_count = arms;
    step.duration = duration;
    return step;
}

} // namespace

const SkillSpec& PackageStep::spec() const {
    return *SkillTable::instance().find(skill);
}

std::string PackageStep::call_text() const {
    std::string out = skill + "(";
    if (source) out += "source=\"" + *source + "\", ";
    out += "target=\"" + target + "\")";
    return out;
}

std::string PackageStep::line_text() const {
    std::ostringstream out;
    out << step_id << ": " << call_text() << '('
        << (arm_count == 2 ? "Dual" : "Single") << " arm, " << duration << " seconds)";
    return out.str();
}

PackageStep parse_step(std::string_view line) {
    return parse_step_at(trim(line), 0);
}

SkillCall parse_skill_call(std::string_view text) {
    LineCursor c{trim(text), 0, 0};
    Call call = parse_call(c);
    if (!c.done()) c.fail("trailing characters after call");
    return {std::move(call.skill), std::move(call.source), std::move(call.target), call.spec};
}

std::vector<TaskPackage> parse_package_text(std::string_view text) {
    std::vector<TaskPackage> pkgs;
    std::string scene;
    std::size_t offset = 0;
    while (offset <= text.size()) {
        std::size_t eol = text.find('\n', offset);
        std::string_view raw = text.substr(offset, eol == std::string_view::npos
                                                       ? std::string_view::npos
                                                       : eol - offset);
        std::string_view line = trim(raw);
        std::size_t line_base = offset + (line.data() - raw.data());
        if (line.empty() || line.front() == '#') {
            // skip blanks and metadata comments
        } else if (line.starts_with("Package ")) {
            LineCursor c{line, 8, line_base};
            if (c.done() || !std::isupper(static_cast<unsigned char>(c.peek())))
                c.fail("expected package letter");
            char letter = c.text[c.pos++];
            c.expect(": ");
            std::string title(trim(c.text.substr(c.pos)));
            if (title.empty()) c.fail("expected package title");
            for (const auto& p : pkgs)
                if (p.package_id == letter)
                    throw ParseError(std::string("duplicate package letter: ") + letter,
                                     line_base);
            pkgs.push_back({letter, std::move(title), scene, "", {}});
        } else if (line.ends_with(" scene") && line.find(':') == std::string_view::npos &&
                   line.find('(') == std::string_view::npos) {
            scene = std::string(line.substr(0, line.size() - 6));
        } else {
            if (pkgs.empty())
                throw ParseError("step line before any package header", line_base);
            PackageStep step = parse_step_at(line, line_base);
            auto& pkg = pkgs.back();
            std::string expect_id =
                std::string(1, pkg.package_id) + std::to_string(pkg.steps.size() + 1);
            if (step.step_id != expect_id)
                throw ParseError("step id '" + step.step_id + "' out of sequence, expected " +
                                     expect_id,
                                 line_base);
            pkg.steps.push_back(std::move(step));
        }
        if (eol == std::string_view::npos) break;
        offset = eol + 1;
    }
    for (const auto& p : pkgs)
        if (p.steps.empty())
            throw ParseError(std::string("package ") + p.package_id + " has no steps",
                             text.size());
    return pkgs;
}

std::string serialize_packages(const std::vector<TaskPackage>& pkgs) {
    std::ostringstream out;
    std::string scene;
    bool first = true;
    for (const auto& p : pkgs) {
        if (!first) out << '\n';
        first = false;
        if (!p.scene.empty() && p.scene != scene) {
            scene = p.scene;
            out << scene << " scene\n\n";
        }
        out << "Package " << p.package_id << ": " << p.title << '\n';
        for (const auto& s : p.steps) out << s.line_text() << '\n';
    }
    return out.str();
}

long sequential_duration(const std::vector<TaskPackage>& pkgs) {
    long total = 0;
    for (const auto& p : pkgs)
        for (const auto& s : p.steps) total += s.duration;
    return total;
}

std::size_t Corpus::package_count() const {
    std::size_t n = 0;
    for (const auto& [_, pkgs] : scenes) n += pkgs.size();
    return n;
}

Corpus load_corpus(const std::filesystem::path& root) {
    Corpus corpus;
    std::error_code ec;
    if (!std::filesystem::is_directory(root, ec)) {
        corpus.errors.push_back("corpus root not found: " + root.string());
        return corpus;
    }
    std::vector<std::filesystem::path> dirs;
    for (const auto& entry : std::filesystem::directory_iterator(root))
        if (entry.is_directory()) dirs.push_back(entry.path());
    std::sort(dirs.begin(), dirs.end());
    for (const auto& dir : dirs) {
        std::string scene = dir.filename().string();
        std::vector<std::filesystem::path> files;
        for (const auto& entry : std::filesystem::directory_iterator(dir))
            if (entry.is_regular_file()) files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        for (const auto& file : files) {
            std::ifstream in(file);
            if (!in) {
                corpus.errors.push_back("unreadable file: " + file.string());
                continue;
            }
            std::stringstream buf;
            buf << in.rdbuf();
            std::string text = buf.str();
            std::string difficulty;
            if (text.starts_with("# difficulty: ")) {
                std::size_t eol = text.find('\n');
                difficulty = text.substr(14, eol == std::string::npos ? std::string::npos
                                                                      : eol - 14);
            }
            std::vector<TaskPackage> pkgs;
            try {
                pkgs = parse_package_text(text);
            } catch (const ParseError& e) {
                corpus.errors.push_back(file.string() + ": " + e.what() + " (byte " +
                                        std::to_string(e.offset()) + ")");
                continue;
            }
            auto& dest = corpus.scenes[scene];
            for (auto& p : pkgs) {
                bool dup = std::any_of(dest.begin(), dest.end(), [&](const TaskPackage& q) {
                    return q.package_id == p.package_id;
                });
                if (dup) {
                    corpus.errors.push_back(file.string() + ": duplicate package " +
                                            p.package_id + " in scene " + scene);
                    continue;
                }
                p.scene = scene;
                p.difficulty = difficulty;
                dest.push_back(std::move(p));
            }
        }
        if (corpus.scenes.contains(scene)) {
            auto& dest = corpus.scenes[scene];
            std::sort(dest.begin(), dest.end(), [](const auto& a, const auto& b) {
                return a.package_id < b.package_id;
            });
        }
    }
    return corpus;
}

} // namespace parasched
