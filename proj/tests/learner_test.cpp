#include <gtest/gtest.h>

#include <random>

#include "nal/learner.hpp"
#include "nal/parser.hpp"
#include "support.hpp"

using namespace nal;

namespace {

std::vector<LabeledImage> images_of(const std::vector<SceneRecord>& recs) {
    std::vector<LabeledImage> out;
    for (const auto& r : recs) out.push_back({r.scene.image_id, r.scene.label, 1.0, r.split, scene_to_facts(r.scene)});
    return out;
}

ExampleSet examples_for(const std::string& cls, std::uint64_t seed = 0, std::size_t n = 600) {
    static std::map<std::pair<std::string, std::size_t>, std::vector<LabeledImage>> cache;
    auto& images = cache[{cls, n}];
    if (images.empty()) images = images_of(generate_dataset(Mode::Shapes, cls, n, 1));
    return select_examples(images, cls, target_predicate(cls), {10, 10, 0.7, seed});
}

std::vector<std::string> rule_texts(const LearntFramework& lf) {
    std::vector<std::string> out;
    for (const auto& r : lf.learned_rules()) out.push_back(r.to_string());
    return out;
}

// Fraction of fresh scenes on which the learned framework and the oracle agree.
double agreement(const LearntFramework& lf, const std::string& cls, std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::size_t agree = 0;
    for (std::size_t i = 0; i < n; ++i) {
        auto s = generate_scene(cls, i % 2 == 0, rng(), i);
        auto r = accepts_on_facts(lf.framework, scene_to_facts(s), ground_atom(lf.target, {s.image_id}));
        agree += r && *r == oracle(cls, s);
    }
    return static_cast<double>(agree) / static_cast<double>(n);
}

}  // namespace

TEST(Learn, S1AgreesWithOracle) {
    auto ex = examples_for("s1");
    auto lf = learn(ex, "s_1");
    auto report = verify_solution(lf.framework, ex);
    EXPECT_TRUE(report.pass());
    EXPECT_EQ(report.correct(), 20u);
    EXPECT_EQ(agreement(lf, "s1", 400, 77), 1.0);
    EXPECT_EQ(lf.assumption_names, std::vector<std::string>{"alpha_1"});
    ASSERT_EQ(lf.framework.assumptions.size(), 1u);
    EXPECT_EQ(lf.framework.assumptions[0].contrary.predicate, "c_alpha_1");
}

TEST(Learn, S6IsADefaultWithAnImageLevelException) {
    auto lf = learn(examples_for("s6"), "s_6");
    EXPECT_EQ(rule_texts(lf), (std::vector<std::string>{"s_6(A) :- image(A), alpha_1(A).",
                                                         "c_alpha_1(A) :- in(A,B), blue(B), circle(B)."}));
    EXPECT_EQ(agreement(lf, "s6", 300, 5), 1.0);
}

TEST(Learn, HypothesisShape) {
    for (const auto& cls : {"s1", "s2", "s3", "s4", "s5", "s6"}) {
        auto lf = learn(examples_for(cls), target_predicate(cls));
        auto rules = lf.learned_rules();
        ASSERT_FALSE(rules.empty());
        EXPECT_EQ(rules[0].head.predicate, target_predicate(cls));
        std::size_t assumption_literals = 0;
        for (const auto& b : rules[0].body) assumption_literals += b.predicate == "alpha_1";
        EXPECT_EQ(assumption_literals, 1u) << cls;
        for (std::size_t i = 1; i < rules.size(); ++i) EXPECT_EQ(rules[i].head.predicate, "c_alpha_1") << cls;
        EXPECT_EQ(lf.framework.assumptions.size(), 1u);
        EXPECT_NO_THROW(lf.framework.validate());  // includes flatness
        EXPECT_TRUE(verify_solution(lf.framework, examples_for(cls)).pass()) << cls;
    }
}

TEST(Learn, Deterministic) {
    auto ex = examples_for("s4");
    auto a = learn(ex, "s_4"), b = learn(ex, "s_4");
    EXPECT_EQ(serialize_framework(a.framework), serialize_framework(b.framework));
    // The seed does not steer the search.
    LearnerConfig cfg;
    cfg.seed = 99;
    EXPECT_EQ(serialize_framework(learn(ex, "s_4", cfg).framework), serialize_framework(a.framework));
}

TEST(Learn, Errors) {
    auto ex = examples_for("s1");
    ExampleSet empty;
    EXPECT_THROW(learn(empty, "s_1"), InsufficientExamples);
    EXPECT_THROW(learn(ex, "s_2"), ValidationError);
    LearnerConfig bad;
    bad.max_body_literals = 0;
    EXPECT_THROW(learn(ex, "s_1", bad), std::invalid_argument);
    bad = {};
    bad.max_object_vars = 3;
    EXPECT_THROW(learn(ex, "s_1", bad), std::invalid_argument);
    bad = {};
    bad.timeout = std::chrono::milliseconds{0};
    EXPECT_THROW(learn(ex, "s_1", bad), std::invalid_argument);
}

TEST(Learn, IndistinguishableExamplesFail) {
    auto s = generate_scene("s1", true, 1, 0);
    auto t = s;
    t.image_id = "img_1";
    for (std::size_t j = 0; j < t.objects.size(); ++j) t.objects[j].id = object_name(1, j);
    ExampleSet ex;
    for (const auto* sc : {&s, &t})
        for (const auto& f : scene_to_facts(*sc)) ex.background.add_rule(f, {});
    ex.positives = {ground_atom("s_1", {"img_0"})};
    ex.negatives = {ground_atom("s_1", {"img_1"})};
    EXPECT_THROW(learn(ex, "s_1"), SearchFailure);
}

TEST(Learn, DeadlineThrowsTimeout) {
    detail::Deadline d(std::chrono::milliseconds{0});
    std::size_t counter = 0;
    EXPECT_THROW(
        {
            for (int i = 0; i < 2048; ++i) d.check(counter);
        },
        Timeout);
}

TEST(LearnProperty, MonotoneDifficultyOnS1Subsets) {
    auto ex = examples_for("s1", 3);
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 30; ++trial) {
        ExampleSet sub;
        sub.background = ex.background;
        for (const auto& p : ex.positives)
            if (rng() % 2) sub.positives.push_back(p);
        for (const auto& n : ex.negatives)
            if (rng() % 2) sub.negatives.push_back(n);
        if (sub.positives.empty()) sub.positives.push_back(ex.positives[trial % 10]);
        if (sub.negatives.empty()) sub.negatives.push_back(ex.negatives[trial % 10]);
        LearntFramework lf;
        ASSERT_NO_THROW(lf = learn(sub, "s_1")) << trial;
        ASSERT_TRUE(verify_solution(lf.framework, sub).pass());
    }
}

// The learner scores hypotheses with bit masks; the semantics engine is the
// reference. Random hypotheses over random example sets must agree.
TEST(LearnProperty, CompiledCoverageMatchesEngine) {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 60; ++trial) {
        ExampleSet ex;
        for (std::size_t i = 0; i < 6; ++i) {
            auto s = random_scene(Mode::Shapes, rng, i);
            for (const auto& f : scene_to_facts(s)) ex.background.add_rule(f, {});
            (i < 3 ? ex.positives : ex.negatives).push_back(ground_atom("t", {s.image_id}));
        }
        auto cx = detail::compile_examples(ex);
        auto pick_mask = [&](std::size_t max_bits) {
            detail::Mask m = 0;
            for (std::size_t k = 0; k < max_bits; ++k)
                if (rng() % 2) m |= detail::bit(rng() % cx.props.size());
            return m;
        };
        detail::TopCandidate t;
        t.objects = rng() % 3;
        if (t.objects >= 1) t.mb = pick_mask(2);
        if (t.objects == 2) {
            t.mc = pick_mask(2);
            if (!cx.relations.empty() && rng() % 2) {
                t.relation = static_cast<int>(rng() % cx.relations.size());
                t.reversed = rng() % 2;
            }
        }
        std::vector<detail::Mask> exceptions;
        for (std::size_t k = rng() % 3; k > 0; --k)
            if (auto m = pick_mask(2)) exceptions.push_back(m);

        Hypothesis h;
        h.objects = t.objects;
        h.props_b = cx.names(t.mb);
        h.props_c = cx.names(t.mc);
        if (t.relation >= 0) {
            h.relation = cx.relations[static_cast<std::size_t>(t.relation)];
            h.relation_reversed = t.reversed;
        }
        for (auto m : exceptions) h.exceptions.push_back(cx.names(m));
        auto lf = build_learnt(h, ex, "t");
        auto report = verify_solution(lf.framework, ex);

        std::vector<const detail::CompiledImage*> all;
        for (const auto& img : cx.pos) all.push_back(&img);
        for (const auto& img : cx.neg) all.push_back(&img);
        ASSERT_EQ(report.outcomes.size(), all.size());
        for (std::size_t i = 0; i < all.size(); ++i) {
            detail::Mask w = detail::witnesses(*all[i], t);
            for (auto m : exceptions) w &= ~detail::killed(*all[i], t.objects, m);
            ASSERT_FALSE(report.outcomes[i].unclassifiable);
            ASSERT_EQ(report.outcomes[i].accepted, w != 0) << "trial " << trial << "\n"
                                                           << serialize_framework(lf.framework);
        }
    }
}

TEST(Hypothesis, CostsAndText) {
    Hypothesis h;
    h.objects = 0;
    h.exceptions = {{"blue", "circle"}};
    EXPECT_EQ(h.top_cost(), 1u);
    EXPECT_EQ(h.exception_cost(), 3u);
    h.objects = 2;
    h.props_b = {"red"};
    h.props_c = {"blue", "square"};
    h.relation = "above";
    h.relation_reversed = true;
    h.exceptions = {{"green"}};
    EXPECT_EQ(h.top_cost(), 6u);
    EXPECT_EQ(h.cost(), 7u);
    EXPECT_EQ(h.top_rule("s_4", "alpha_1").to_string(),
              "s_4(A) :- in(A,B), red(B), in(A,C), blue(C), square(C), above(C,B), alpha_1(B,A).");
    EXPECT_EQ(h.exception_rules("alpha_1")[0].to_string(), "c_alpha_1(A,B) :- image(B), green(A).");
}

TEST(Verify, Example1Passes) {
    auto fw = parse_framework(fixtures::kExample1);
    ExampleSet ex;
    ex.positives = {ground_atom("c_1", {"img_1"})};
    ex.negatives = {ground_atom("c_1", {"img_2"})};
    auto report = verify_solution(fw, ex);
    EXPECT_TRUE(report.pass());
    EXPECT_EQ(report.correct(), 2u);
}

TEST(Verify, BackgroundOnlyFails) {
    auto ex = examples_for("s1");
    auto report = verify_solution(ex.background, ex);
    EXPECT_FALSE(report.pass());
    EXPECT_EQ(report.correct(), 10u);  // negatives are trivially rejected
}

TEST(Verify, NoStableExtensionIsAFailure) {
    auto fw = parse_framework("t(A) :- image(A). image(i). c_a :- a. assumption(a). contrary(a, c_a).");
    ExampleSet ex;
    ex.positives = {ground_atom("t", {"i"})};
    auto report = verify_solution(fw, ex);
    ASSERT_EQ(report.outcomes.size(), 1u);
    EXPECT_TRUE(report.outcomes[0].unclassifiable);
    EXPECT_FALSE(report.pass());
}

TEST(WithFacts, ReplacesGroundFacts) {
    auto fw = parse_framework(fixtures::kLearnedS1);
    fw.add_rule(ground_atom("image", {"old"}), {});
    auto out = with_facts(fw, {ground_atom("image", {"img_9"})});
    EXPECT_EQ(out.rules.size(), 4u);
    EXPECT_EQ(out.rules.back().to_string(), "image(img_9).");
    EXPECT_EQ(out.rules.back().id, "fact1");
}

TEST(Cascade, TwoClassesGiveOneFramework) {
    std::map<std::string, ExampleSet> by;
    auto s1 = examples_for("s1");
    auto s6 = examples_for("s6");
    ExampleSet a, b;
    a.background = s1.background;
    a.positives = s1.positives;
    b.background = s6.background;
    b.positives = s6.positives;
    by["x"] = a;
    by["y"] = b;
    auto fws = learn_cascade(by, {"x", "y"}, [](const std::string& c) { return "is_" + c; });
    ASSERT_EQ(fws.size(), 1u);
    EXPECT_EQ(fws[0].target, "is_x");
    EXPECT_THROW(learn_cascade(by, {"x"}, [](const std::string& c) { return c; }), std::invalid_argument);
    EXPECT_THROW(learn_cascade(by, {"x", "z"}, [](const std::string& c) { return c; }), std::invalid_argument);
}

TEST(AbaAsp, ParsesCommand) {
    auto cmd = parse_aba_asp("aba_asp('s1.aba', [s_1(img_0), s_1(img_2)], [s_1(img_1)]).");
    EXPECT_EQ(cmd.file, "s1.aba");
    EXPECT_EQ(cmd.positives, (std::vector<Atom>{ground_atom("s_1", {"img_0"}), ground_atom("s_1", {"img_2"})}));
    EXPECT_EQ(cmd.negatives, std::vector<Atom>{ground_atom("s_1", {"img_1"})});
    auto empty = parse_aba_asp("aba_asp(\"bk.aba\", [], [])");
    EXPECT_EQ(empty.file, "bk.aba");
    EXPECT_TRUE(empty.positives.empty());
    EXPECT_THROW(parse_aba_asp("learn('x', [], [])"), ValidationError);
    EXPECT_THROW(parse_aba_asp("aba_asp('x', [a(b)])"), ValidationError);
    EXPECT_THROW(parse_aba_asp("aba_asp('x, [], [])"), ValidationError);
    EXPECT_THROW(parse_aba_asp("aba_asp('x', [], []) extra"), ValidationError);
}
