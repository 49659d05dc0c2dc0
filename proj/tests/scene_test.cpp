#include <gtest/gtest.h>

#include <random>

#include "nal/dataset.hpp"
#include "nal/ground.hpp"
#include "nal/parser.hpp"
#include "nal/semantics.hpp"

using namespace nal;

namespace {

SceneObject obj(std::string id, std::vector<std::string> attrs, int col, int row) {
    return {std::move(id), std::move(attrs), col, row};
}

Scene shapes_scene(std::vector<SceneObject> objects) { return {"img_0", Mode::Shapes, std::move(objects), ""}; }

// Second oracle: the concept's rule text run through the semantics engine on
// the scene's facts. The negated concept becomes a default with the
// existential as the contrary of its assumption.
bool engine_oracle(const Concept& c, const Scene& s) {
    std::string text = facts_to_text(scene_to_facts(s));
    if (c.negated) {
        auto rule = concept_rule(c);
        text += rule.substr(rule.find('\n') + 1) + "\n";
        text += c.target + "(A) :- image(A), ok(A).\nassumption(ok(A)).\ncontrary(ok(A), exception(A)).\n";
    } else {
        text += concept_rule(c) + "\n";
    }
    auto g = ground(parse_framework(text));
    return is_cautious(g, ground_atom(c.target, {s.image_id}));
}

}  // namespace

TEST(Oracle, BlueSquareIsS1) {
    auto s = shapes_scene({obj("o", {"square", "blue", "small"}, 0, 0)});
    EXPECT_TRUE(oracle("s1", s));
    EXPECT_FALSE(oracle("s6", shapes_scene({obj("o", {"circle", "blue", "large"}, 2, 2)})));
}

TEST(Oracle, SingleRedCircleIsNotS2) {
    EXPECT_FALSE(oracle("s2", shapes_scene({obj("o", {"circle", "red", "small"}, 1, 1)})));
}

TEST(Oracle, AboveUsesRowOrder) {
    auto s = shapes_scene({obj("b", {"circle", "red", "small"}, 1, 0), obj("c", {"square", "blue", "large"}, 1, 2)});
    EXPECT_TRUE(oracle("s4", s));
    std::swap(s.objects[0].row, s.objects[1].row);
    EXPECT_FALSE(oracle("s4", s));
    // Same row: neither above the other.
    s.objects[0].row = s.objects[1].row = 1;
    s.objects[0].col = 0;
    EXPECT_FALSE(oracle("s4", s));
}

TEST(Oracle, LeftUsesColumnOrder) {
    auto s = shapes_scene({obj("b", {"triangle", "red", "small"}, 0, 2), obj("c", {"circle", "green", "small"}, 2, 0)});
    EXPECT_TRUE(oracle("s5", s));
    std::swap(s.objects[0].col, s.objects[1].col);
    EXPECT_FALSE(oracle("s5", s));
}

TEST(Oracle, ErrorsAndNames) {
    EXPECT_THROW(find_concept("s7"), std::invalid_argument);
    EXPECT_THROW(oracle("c1", shapes_scene({})), std::invalid_argument);
    EXPECT_EQ(target_predicate("s1"), "s_1");
    EXPECT_EQ(target_predicate("c3"), "c_3");
    EXPECT_EQ(target_predicate("plain"), "plain");
    EXPECT_EQ(concept_rule(find_concept("s1")), "s1(A) :- image(A), in(A,B), square(B), blue(B).");
    EXPECT_EQ(classes_of(Mode::Clevr), (std::vector<std::string>{"c1", "c2", "c3"}));
}

TEST(Generate, S1PositiveHasBlueSquare) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto s = generate_scene("s1", true, seed);
        EXPECT_TRUE(std::any_of(s.objects.begin(), s.objects.end(),
                                [](const SceneObject& o) { return o.has("square") && o.has("blue"); }));
        EXPECT_EQ(s.label, "s1");
    }
}

TEST(Generate, S6PositiveHasNoBlueCircle) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto s = generate_scene("s6", true, seed);
        EXPECT_TRUE(std::none_of(s.objects.begin(), s.objects.end(),
                                 [](const SceneObject& o) { return o.has("circle") && o.has("blue"); }));
    }
}

TEST(Generate, S4NegativeHasNoRedCircleAboveBlueSquare) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto s = generate_scene("s4", false, seed);
        EXPECT_EQ(s.label, "not_s4");
        for (const auto& b : s.objects)
            for (const auto& c : s.objects)
                EXPECT_FALSE(b.has("circle") && b.has("red") && c.has("square") && c.has("blue") && b.row < c.row);
    }
}

TEST(Generate, SceneShapeInvariants) {
    for (const auto& c : concepts()) {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            auto s = generate_scene(c.target, seed % 2 == 0, seed, 7);
            ASSERT_GE(s.objects.size(), 1u);
            ASSERT_LE(s.objects.size(), 9u);
            std::set<std::pair<int, int>> cells;
            for (const auto& o : s.objects) {
                EXPECT_TRUE(cells.insert({o.col, o.row}).second);
                EXPECT_EQ(o.attributes.size(), vocabulary(c.mode).families.size());
            }
            EXPECT_EQ(s.image_id, "img_7");
        }
    }
}

TEST(Generate, DeterministicPerSeed) {
    auto a = generate_scene("s5", true, 42, 3);
    auto b = generate_scene("s5", true, 42, 3);
    EXPECT_EQ(facts_to_text(scene_to_facts(a)), facts_to_text(scene_to_facts(b)));
    EXPECT_EQ(scene_seed(1, "s1", 5), scene_seed(1, "s1", 5));
    EXPECT_NE(scene_seed(1, "s1", 5), scene_seed(1, "s2", 5));
    EXPECT_NE(scene_seed(1, "s1", 5), scene_seed(2, "s1", 5));
}

TEST(Generate, ClevrPositivesExcludeOtherConcepts) {
    for (const auto& c : classes_of(Mode::Clevr))
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            auto s = generate_scene(c, true, seed);
            for (const auto& other : classes_of(Mode::Clevr)) EXPECT_EQ(oracle(other, s), other == c);
        }
}

TEST(GenerateProperty, LabelFidelityAndEngineAgreement) {
    std::mt19937_64 rng(11);
    for (const auto& c : concepts()) {
        for (int i = 0; i < 25; ++i) {
            const bool positive = i % 2 == 0;
            auto s = generate_scene(c.target, positive, rng(), static_cast<std::size_t>(i));
            ASSERT_EQ(oracle(c, s), positive) << c.target;
            ASSERT_EQ(engine_oracle(c, s), positive) << c.target << " " << facts_to_text(scene_to_facts(s));
        }
        // Unconstrained scenes too, so both answers are exercised without the
        // rejection filter.
        for (int i = 0; i < 25; ++i) {
            auto s = random_scene(c.mode, rng, static_cast<std::size_t>(i));
            ASSERT_EQ(engine_oracle(c, s), oracle(c, s)) << c.target;
        }
    }
}

TEST(Facts, SingleBlueSquare) {
    auto s = shapes_scene({obj("obj_0_0", {"square", "blue", "small"}, 0, 0)});
    EXPECT_EQ(facts_to_text(scene_to_facts(s)),
              "image(img_0).\nin(img_0,obj_0_0).\nsquare(obj_0_0).\nblue(obj_0_0).\nsmall(obj_0_0).\n");
}

TEST(Facts, AboveAndLeft) {
    auto s = shapes_scene({obj("b", {"square", "red", "small"}, 0, 0), obj("c", {"circle", "red", "small"}, 2, 1)});
    auto facts = scene_to_facts(s);
    auto has = [&](const Atom& a) { return std::find(facts.begin(), facts.end(), a) != facts.end(); };
    EXPECT_TRUE(has(ground_atom("above", {"b", "c"})));
    EXPECT_TRUE(has(ground_atom("left", {"b", "c"})));
    EXPECT_FALSE(has(ground_atom("above", {"c", "b"})));
    EXPECT_FALSE(has(ground_atom("left", {"c", "b"})));
}

TEST(FactsProperty, AntisymmetryAndRoundTrip) {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 200; ++i) {
        auto s = random_scene(i % 2 ? Mode::Clevr : Mode::Shapes, rng, static_cast<std::size_t>(i));
        auto facts = scene_to_facts(s);
        std::set<Atom> set(facts.begin(), facts.end());
        for (const auto& f : facts)
            if (f.predicate == "above" || f.predicate == "left") {
                ASSERT_NE(f.args[0], f.args[1]);
                ASSERT_FALSE(set.count(Atom{f.predicate, {f.args[1], f.args[0]}}));
            }
        ASSERT_EQ(parse_facts(facts_to_text(facts)), facts);
        ASSERT_EQ(image_of(facts), s.image_id);
    }
}

TEST(Noise, ZeroIsIdentity) {
    auto facts = scene_to_facts(generate_scene("s3", true, 9));
    EXPECT_EQ(corrupt_facts(facts, {0.0, 0.0, 5}, Mode::Shapes), facts);
}

TEST(Noise, FullResampleChangesEveryAttribute) {
    auto facts = scene_to_facts(generate_scene("c2", true, 9));
    auto noisy = corrupt_facts(facts, {1.0, 0.0, 5}, Mode::Clevr);
    ASSERT_EQ(noisy.size(), facts.size());
    const auto& vocab = vocabulary(Mode::Clevr);
    for (std::size_t i = 0; i < facts.size(); ++i) {
        const auto* family = facts[i].arity() == 1 ? vocab.family_of(facts[i].predicate) : nullptr;
        if (!family) {
            EXPECT_EQ(noisy[i], facts[i]);
            continue;
        }
        EXPECT_NE(noisy[i].predicate, facts[i].predicate);
        EXPECT_EQ(vocab.family_of(noisy[i].predicate), family);
        EXPECT_EQ(noisy[i].args, facts[i].args);
    }
}

TEST(Noise, FullDropLeavesOnlyTheImage) {
    auto facts = scene_to_facts(generate_scene("s4", true, 1, 4));
    auto noisy = corrupt_facts(facts, {0.0, 1.0, 5}, Mode::Shapes);
    EXPECT_EQ(noisy, std::vector<Atom>{ground_atom("image", {"img_4"})});
}

TEST(Noise, DeterministicAndValidated) {
    auto facts = scene_to_facts(generate_scene("s2", true, 2));
    EXPECT_EQ(corrupt_facts(facts, {0.3, 0.2, 8}, Mode::Shapes), corrupt_facts(facts, {0.3, 0.2, 8}, Mode::Shapes));
    EXPECT_THROW(corrupt_facts(facts, {1.5, 0.0, 0}, Mode::Shapes), std::invalid_argument);
    EXPECT_THROW(corrupt_facts(facts, {0.0, -0.1, 0}, Mode::Shapes), std::invalid_argument);
}

TEST(Dataset, ShapeOfABinaryClass) {
    auto recs = generate_dataset(Mode::Shapes, "s1", 3000, 0);
    ASSERT_EQ(recs.size(), 3000u);
    std::size_t pos = 0, test_pos = 0, test_neg = 0;
    for (const auto& r : recs) {
        pos += r.positive;
        ASSERT_EQ(oracle("s1", r.scene), r.positive);
        if (r.split == "test") (r.positive ? test_pos : test_neg)++;
    }
    EXPECT_EQ(pos, 1500u);
    EXPECT_EQ(test_pos, 500u);
    EXPECT_EQ(test_neg, 500u);
    EXPECT_THROW(generate_dataset(Mode::Clevr, "s1", 10, 0), std::invalid_argument);
}

TEST(Dataset, MultiClassCyclesThroughClasses) {
    auto recs = generate_dataset(Mode::Clevr, "", 9, 0);
    for (std::size_t i = 0; i < recs.size(); ++i) {
        EXPECT_EQ(recs[i].scene.label, classes_of(Mode::Clevr)[i % 3]);
        EXPECT_TRUE(recs[i].positive);
    }
}
