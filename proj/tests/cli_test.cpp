// Drives the built `nal` binary end to end through a temporary directory.

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sys/wait.h>
#include <unistd.h>

#include "json.hpp"
#include "nal/dataset.hpp"

namespace fs = std::filesystem;

namespace {

// Per process, so parallel ctest runs do not share files.
const fs::path kWork = fs::temp_directory_path() / ("nal_cli_test_" + std::to_string(::getpid()));

struct Run {
    int code;
    std::string out;
};

Run run_nal(const std::string& args) {
    const auto out_file = kWork / "stdout.txt";
    const std::string cmd =
        std::string(NAL_BINARY) + " " + args + " > " + out_file.string() + " 2> " + (kWork / "stderr.txt").string();
    int status = std::system(cmd.c_str());
    Run r{WIFEXITED(status) ? WEXITSTATUS(status) : -1, {}};
    if (fs::exists(out_file)) r.out = nal::read_text(out_file);
    return r;
}

std::string p(const std::string& name) { return (kWork / name).string(); }

class Cli : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        fs::remove_all(kWork);
        fs::create_directories(kWork);
    }
    static void TearDownTestSuite() { fs::remove_all(kWork); }
};

}  // namespace

TEST_F(Cli, GenLearnInferEval) {
    ASSERT_EQ(run_nal("gen --mode shapes --class s1 --n 300 --seed 2 --out " + p("d1") + " --render").code, 0);
    EXPECT_TRUE(fs::exists(p("d1/facts/img_0.facts")));
    EXPECT_TRUE(fs::exists(p("d1/images/img_299.png")));
    EXPECT_TRUE(fs::exists(p("d1/scenes.jsonl")));

    auto learned = run_nal("learn --data " + p("d1") + " --class s1 --out " + p("s1.aba"));
    ASSERT_EQ(learned.code, 0);
    EXPECT_NE(learned.out.find("s_1(A) :- "), std::string::npos);

    auto inferred = run_nal("infer --model " + p("s1.aba") + " --facts " + p("d1/facts/img_0.facts") + " " +
                        p("d1/facts/img_1.facts"));
    ASSERT_EQ(inferred.code, 0);
    EXPECT_EQ(inferred.out, "img_0 accepted\nimg_1 rejected\n");

    auto evaluated = run_nal("eval --model " + p("s1.aba") + " --data " + p("d1") + " --split test --report " +
                         p("r.json") + " --confusion " + p("cm.csv"));
    ASSERT_EQ(evaluated.code, 0);
    EXPECT_NE(evaluated.out.find("F1-Score"), std::string::npos);
    auto report = nlohmann::json::parse(nal::read_text(p("r.json")));
    EXPECT_EQ(report["metrics"]["support"], 100);
    EXPECT_EQ(report["metrics"]["tp"].get<int>() + report["metrics"]["fn"].get<int>(), 50);
    EXPECT_EQ(nal::read_text(p("cm.csv")).rfind("actual\\predicted,s1,not_s1\n", 0), 0u);

    // Same seeds, same report.
    ASSERT_EQ(run_nal("eval --model " + p("s1.aba") + " --data " + p("d1") + " --report " + p("r2.json")).code, 0);
    auto again = nlohmann::json::parse(nal::read_text(p("r2.json")));
    EXPECT_EQ(again["metrics"], report["metrics"]);

    auto explained = run_nal("explain --model " + p("s1.aba") + " --facts " + p("d1/facts/img_0.facts") +
                         " --atom '\"s_1(img_0)\"'");
    ASSERT_EQ(explained.code, 0);
    EXPECT_EQ(explained.out.rfind("claim s_1(img_0): accepted", 0), 0u);
}

TEST_F(Cli, CascadeOnClevr) {
    ASSERT_EQ(run_nal("gen --mode clevr --n 600 --seed 1 --out " + p("dc")).code, 0);
    ASSERT_EQ(run_nal("learn --data " + p("dc") + " --cascade c3,c1,c2 --out " + p("casc")).code, 0);
    auto j = nlohmann::json::parse(nal::read_text(p("casc/cascade.json")));
    EXPECT_EQ(j["stages"].size(), 2u);
    auto ev = run_nal("eval --model " + p("casc") + " --data " + p("dc") + " --confusion " + p("ccm.csv"));
    ASSERT_EQ(ev.code, 0);
    EXPECT_EQ(nal::read_text(p("ccm.csv")).rfind("actual\\predicted,c3,c1,c2\n", 0), 0u);
}

TEST_F(Cli, SolveJson) {
    nal::write_text(p("ex1.aba"),
                    "circle(img_1). circle(img_2). square(img_2).\nc_1(A) :- circle(A), alpha(A).\n"
                    "c_alpha(A) :- square(A).\nassumption(alpha(A)).\ncontrary(alpha(A), c_alpha(A)).\n");
    auto r = run_nal("solve --aba " + p("ex1.aba"));
    ASSERT_EQ(r.code, 0);
    auto j = nlohmann::json::parse(r.out);
    ASSERT_EQ(j["extensions"].size(), 1u);
    EXPECT_EQ(j["extensions"][0]["assumptions"], nlohmann::json::array({"alpha(img_1)"}));
    auto cautious = j["cautious"].get<std::vector<std::string>>();
    EXPECT_NE(std::find(cautious.begin(), cautious.end(), "c_1(img_1)"), cautious.end());
    EXPECT_EQ(std::find(cautious.begin(), cautious.end(), "c_1(img_2)"), cautious.end());

    nal::write_text(p("none.aba"), "c_a :- a.\nassumption(a).\ncontrary(a, c_a).\n");
    auto none = nlohmann::json::parse(run_nal("solve --aba " + p("none.aba")).out);
    EXPECT_TRUE(none["extensions"].empty());
    EXPECT_TRUE(none["cautious"].is_null());
}

TEST_F(Cli, ManifestAndBench) {
    ASSERT_EQ(run_nal("gen --class s1 --n 12 --seed 4 --out " + p("dm")).code, 0);
    std::string bk;
    for (int i = 0; i < 4; ++i) bk += nal::read_text(p("dm/facts/img_" + std::to_string(i) + ".facts"));
    nal::write_text(p("bk.aba"), bk);
    nal::write_text(p("m.txt"), "aba_asp('bk.aba', [s_1(img_0), s_1(img_2)], [s_1(img_1), s_1(img_3)]).\n");
    auto r = run_nal("learn --manifest " + p("m.txt") + " --out " + p("m.aba"));
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(nal::read_text(p("m.aba")).find("% @target s_1"), std::string::npos);

    auto b = run_nal("bench --counts 5,10 --seeds 0,1 --class s1");
    ASSERT_EQ(b.code, 0);
    EXPECT_EQ(b.out.rfind("count,seed,seconds,outcome,rules,literals\n", 0), 0u);
    EXPECT_EQ(std::count(b.out.begin(), b.out.end(), '\n'), 5);
}

TEST_F(Cli, ExitCodes) {
    EXPECT_EQ(run_nal("").code, 2);
    EXPECT_EQ(run_nal("solve --aba " + p("missing.aba")).code, 2);
    nal::write_text(p("bad.aba"), "p(X :- q.\n");
    EXPECT_EQ(run_nal("solve --aba " + p("bad.aba")).code, 2);
    EXPECT_EQ(run_nal("gen --mode shapes --out " + p("z")).code, 2);
    EXPECT_EQ(run_nal("bench --counts 5,x").code, 2);

    // Two images with the same content, one positive and one negative.
    std::string img = "image(img_0).\nin(img_0,o0).\nsquare(o0).\nblue(o0).\n";
    std::string twin = "image(img_1).\nin(img_1,o1).\nsquare(o1).\nblue(o1).\n";
    nal::write_text(p("twins.aba"), img + twin);
    nal::write_text(p("twins.txt"), "aba_asp('twins.aba', [s_1(img_0)], [s_1(img_1)]).\n");
    EXPECT_EQ(run_nal("learn --manifest " + p("twins.txt") + " --out " + p("t.aba")).code, 3);

    ASSERT_EQ(run_nal("gen --class s5 --n 300 --seed 1 --out " + p("d5")).code, 0);
    EXPECT_EQ(run_nal("learn --data " + p("d5") + " --class s5 --pos 20 --neg 20 --timeout-ms 1 --out " + p("t.aba")).code,
              4);
}
