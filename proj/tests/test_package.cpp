#include "doctest.h"

#include <random>

#include "parasched/package.hpp"
#include "test_util.hpp"

using namespace parasched;

TEST_CASE("parse_step handles the standard grammar") {
    auto s = parse_step(R"(A1: pick(source="table", target="carrots")(Single arm, 5 seconds))");
    CHECK(s.step_id == "A1");
    CHECK(s.skill == "pick");
    CHECK(*s.source == "table");
    CHECK(s.target == "carrots");
    CHECK(s.arm_count == 1);
    CHECK(s.duration == 5);
}

TEST_CASE("parse_step handles dual-arm steps") {
    auto s = parse_step(R"(A4: cut(source="knife", target="carrots")(Dual arm, 10 seconds))");
    CHECK(s.step_id == "A4");
    CHECK(s.skill == "cut");
    CHECK(s.arm_count == 2);
    CHECK(s.duration == 10);
}

TEST_CASE("parse_step handles target-only skills") {
    auto s = parse_step(R"(C5: flap_open(target="refrigerator")(Single arm, 3 seconds))");
    CHECK(s.skill == "flap_open");
    CHECK_FALSE(s.source.has_value());
    CHECK(s.target == "refrigerator");
}

TEST_CASE("parse_step rejects unknown skills by name") {
    try {
        parse_step(R"(A1: fly(target="moon")(Single arm, 5 seconds))");
        FAIL("expected UnknownSkillError");
    } catch (const UnknownSkillError& e) {
        CHECK(e.skill() == "fly");
    }
}

TEST_CASE("parse_step reports byte offsets on malformed lines") {
    try {
        parse_step(R"(A1: pick(source=table))");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.offset() >= 9);
    }
}

TEST_CASE("parse_step round-trips through line_text") {
    std::string line = R"(B2: place(source="apples", target="cutting_board")(Single arm, 7 seconds))";
    CHECK(parse_step(line).line_text() == line);
}

TEST_CASE("parse_package_text splits the kitchen packages") {
    auto pkgs = parse_package_text(
        testutil::read_file(testutil::corpus_dir() / "kitchen" / "meals.txt"));
    REQUIRE(pkgs.size() == 3);
    CHECK(pkgs[0].package_id == 'A');
    CHECK(pkgs[0].steps.size() == 5);
    CHECK(pkgs[1].steps.size() == 5);
    CHECK(pkgs[2].steps.size() == 9);
    CHECK(pkgs[2].title == "Make cream bread");
}

TEST_CASE("parse_package_text splits the greenhouse packages") {
    auto pkgs = parse_package_text(
        testutil::read_file(testutil::corpus_dir() / "greenhouse" / "cucumbers.txt"));
    REQUIRE(pkgs.size() == 2);
    CHECK(pkgs[0].steps.size() == 5);
    CHECK(pkgs[1].steps.size() == 8);
}

TEST_CASE("parse_package_text accepts empty input") {
    CHECK(parse_package_text("").empty());
}

TEST_CASE("parse_package_text rejects structural problems") {
    CHECK_THROWS_AS(parse_package_text("Package A: Empty\n"), ParseError);
    CHECK_THROWS_AS(parse_package_text("Package A: One\nA1: pick(source=\"a\", "
                                       "target=\"b\")(Single arm, 5 seconds)\n"
                                       "Package A: Two\nA1: pick(source=\"a\", "
                                       "target=\"b\")(Single arm, 5 seconds)\n"),
                    ParseError);
    // step-id gap
    CHECK_THROWS_AS(parse_package_text("Package A: Gap\nA2: pick(source=\"a\", "
                                       "target=\"b\")(Single arm, 5 seconds)\n"),
                    ParseError);
}

TEST_CASE("sequential_duration sums all step durations") {
    auto greenhouse = parse_package_text(
        testutil::read_file(testutil::corpus_dir() / "greenhouse" / "cucumbers.txt"));
    CHECK(sequential_duration(greenhouse) == 77);

    auto kitchen = parse_package_text(
        testutil::read_file(testutil::corpus_dir() / "kitchen" / "meals.txt"));
    CHECK(sequential_duration({kitchen[0]}) == 32);
    CHECK(sequential_duration({}) == 0);
}

TEST_CASE("packages round-trip through serialization") {
    for (const char* file : {"kitchen/meals.txt", "greenhouse/cucumbers.txt"}) {
        auto pkgs = parse_package_text(testutil::read_file(testutil::corpus_dir() / file));
        auto again = parse_package_text(serialize_packages(pkgs));
        REQUIRE(again.size() == pkgs.size());
        for (std::size_t i = 0; i < pkgs.size(); ++i) {
            CHECK(again[i].package_id == pkgs[i].package_id);
            CHECK(again[i].title == pkgs[i].title);
            REQUIRE(again[i].steps.size() == pkgs[i].steps.size());
            for (std::size_t j = 0; j < pkgs[i].steps.size(); ++j)
                CHECK(again[i].steps[j].line_text() == pkgs[i].steps[j].line_text());
        }
    }
}

TEST_CASE("load_corpus reads every scene directory") {
    auto corpus = load_corpus(testutil::corpus_dir());
    CHECK(corpus.errors.empty());
    REQUIRE(corpus.scenes.size() == 2);
    CHECK(corpus.scenes.at("kitchen").size() == 5);
    CHECK(corpus.scenes.at("greenhouse").size() == 2);
    CHECK(corpus.package_count() >= 5);
    CHECK(corpus.scenes.at("kitchen").front().difficulty == "easy");
    CHECK(corpus.scenes.at("kitchen").back().difficulty == "medium");
}

TEST_CASE("load_corpus reports a missing root") {
    auto corpus = load_corpus("does_not_exist");
    CHECK(corpus.scenes.empty());
    REQUIRE(corpus.errors.size() == 1);
}

TEST_CASE("load_corpus skips files with bad lines but keeps loading") {
    auto dir = std::filesystem::temp_directory_path() / "parasched_corpus_test";
    std::filesystem::create_directories(dir / "scene");
    {
        std::ofstream good(dir / "scene" / "a_good.txt");
        good << "Package A: Fine\nA1: pick(source=\"x\", target=\"y\")(Single arm, 5 "
                "seconds)\n";
        std::ofstream bad(dir / "scene" / "b_bad.txt");
        bad << "Package B: Broken\nB1: pick(oops\n";
    }
    auto corpus = load_corpus(dir);
    CHECK(corpus.scenes.at("scene").size() == 1);
    REQUIRE(corpus.errors.size() == 1);
    CHECK(corpus.errors.front().find("b_bad.txt") != std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST_CASE("parsed steps agree with the skill table") {
    auto corpus = load_corpus(testutil::corpus_dir());
    for (const auto& [scene, pkgs] : corpus.scenes)
        for (const auto& pkg : pkgs)
            for (const auto& s : pkg.steps) {
                const auto& spec = s.spec();
                CHECK(spec.has_source == s.source.has_value());
                CHECK(spec.default_arms == s.arm_count);
            }
}

TEST_CASE("step grammar fuzzing never crashes the parser") {
    std::mt19937 rng(7);
    const std::string alphabet =
        "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789 :()\",=_";
    std::uniform_int_distribution<std::size_t> pick_char(0, alphabet.size() - 1);
    std::uniform_int_distribution<int> pick_len(0, 90);
    int parsed = 0;
    for (int i = 0; i < 10000; ++i) {
        std::string line;
        int len = pick_len(rng);
        for (int j = 0; j < len; ++j) line += alphabet[pick_char(rng)];
        try {
            parse_step(line);
            ++parsed;
        } catch (const ParseError&) {
            // structured failure is the expected outcome
        }
    }
    CHECK(parsed >= 0);
}
