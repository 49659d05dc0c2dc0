#pragma once

// Symbolic scenes on a 3x3 grid: generation by rejection sampling against the
// class oracles, fact emission, and attribute noise.

#include <algorithm>
#include <array>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "aba.hpp"

namespace nal {

class GenerationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Mode { Shapes, Clevr };

inline std::string to_string(Mode m) { return m == Mode::Shapes ? "shapes" : "clevr"; }

inline Mode parse_mode(std::string_view s) {
    if (s == "shapes") return Mode::Shapes;
    if (s == "clevr") return Mode::Clevr;
    throw std::invalid_argument("unknown mode '" + std::string(s) + "'");
}

struct AttributeFamily {
    std::string name;
    std::vector<std::string> values;
};

// Attribute values are unique across families in both vocabularies, so a
// value name alone identifies its family.
struct Vocabulary {
    std::vector<AttributeFamily> families;

    const AttributeFamily* family_of(std::string_view value) const {
        for (const auto& f : families)
            if (std::find(f.values.begin(), f.values.end(), value) != f.values.end()) return &f;
        return nullptr;
    }
};

inline const Vocabulary& vocabulary(Mode m) {
    static const Vocabulary shapes{{
        {"shape", {"square", "triangle", "circle"}},
        {"color", {"red", "green", "blue"}},
        {"size", {"small", "large"}},
    }};
    static const Vocabulary clevr{{
        {"shape", {"cube", "sphere", "cylinder"}},
        {"color", {"gray", "red", "blue", "green", "brown", "purple", "cyan", "yellow"}},
        {"size", {"small", "large"}},
        {"material", {"metal", "rubber"}},
    }};
    return m == Mode::Shapes ? shapes : clevr;
}

inline constexpr int kGridSize = 3;

struct SceneObject {
    std::string id;
    std::vector<std::string> attributes;  // one value per vocabulary family, in family order
    int col = 0;
    int row = 0;

    bool has(std::string_view value) const {
        return std::find(attributes.begin(), attributes.end(), value) != attributes.end();
    }
};

struct Scene {
    std::string image_id;
    Mode mode = Mode::Shapes;
    std::vector<SceneObject> objects;
    std::string label;
};

// Relations between distinct objects; rows grow downwards.
inline bool above(const SceneObject& b, const SceneObject& c) { return b.row < c.row; }
inline bool left_of(const SceneObject& b, const SceneObject& c) { return b.col < c.col; }

/// A class concept: one or two object patterns, an optional relation between
/// them, and an optional negation of the whole existential.
struct Concept {
    std::string target;
    Mode mode = Mode::Shapes;
    std::vector<std::vector<std::string>> parts;
    std::string relation;  // "", "above" or "left"
    bool negated = false;
};

inline const std::vector<Concept>& concepts() {
    static const std::vector<Concept> all{
        {"s1", Mode::Shapes, {{"square", "blue"}}, "", false},
        {"s2", Mode::Shapes, {{"triangle", "small", "green"}}, "", false},
        {"s3", Mode::Shapes, {{"triangle", "blue"}, {"circle", "red", "large"}}, "", false},
        {"s4", Mode::Shapes, {{"circle", "red"}, {"square", "blue"}}, "above", false},
        {"s5", Mode::Shapes, {{"triangle", "red"}, {"circle", "green"}}, "left", false},
        {"s6", Mode::Shapes, {{"circle", "blue"}}, "", true},
        {"c1", Mode::Clevr, {{"large", "cube"}, {"large", "cylinder"}}, "", false},
        {"c2", Mode::Clevr, {{"small", "metal", "cube"}, {"small", "sphere"}}, "", false},
        {"c3", Mode::Clevr, {{"large", "blue", "sphere"}, {"small", "yellow", "sphere"}}, "", false},
    };
    return all;
}

inline const Concept& find_concept(std::string_view class_id) {
    for (const auto& c : concepts())
        if (c.target == class_id) return c;
    throw std::invalid_argument("unknown class '" + std::string(class_id) + "'");
}

inline std::vector<std::string> classes_of(Mode m) {
    std::vector<std::string> out;
    for (const auto& c : concepts())
        if (c.mode == m) out.push_back(c.target);
    return out;
}

/// Target predicate used in frameworks: "s1" -> "s_1".
inline std::string target_predicate(std::string_view class_id) {
    std::string s(class_id);
    auto pos = s.find_first_of("0123456789");
    if (pos == std::string::npos || pos == 0) return s;
    return s.substr(0, pos) + "_" + s.substr(pos);
}

/// The concept as a rule over the fact vocabulary.
inline std::string concept_rule(const Concept& c) {
    static const std::array<std::string, 2> vars{"B", "C"};
    std::string body = "image(A)";
    for (std::size_t i = 0; i < c.parts.size(); ++i) body += ", in(A," + vars[i] + ")";
    for (std::size_t i = 0; i < c.parts.size(); ++i)
        for (const auto& p : c.parts[i]) body += ", " + p + "(" + vars[i] + ")";
    if (!c.relation.empty()) body += ", " + c.relation + "(B,C)";
    if (!c.negated) return c.target + "(A) :- " + body + ".";
    return c.target + "(A) :- image(A), not exception(A).\nexception(A) :- " + body + ".";
}

inline bool oracle(const Concept& c, const Scene& scene) {
    auto matches = [](const SceneObject& o, const std::vector<std::string>& part) {
        return std::all_of(part.begin(), part.end(), [&](const std::string& v) { return o.has(v); });
    };
    bool found = false;
    if (c.parts.size() == 1) {
        found = std::any_of(scene.objects.begin(), scene.objects.end(),
                            [&](const SceneObject& o) { return matches(o, c.parts[0]); });
    } else {
        for (const auto& b : scene.objects) {
            if (!matches(b, c.parts[0])) continue;
            for (const auto& o : scene.objects) {
                if (!matches(o, c.parts[1])) continue;
                if (c.relation == "above" && !above(b, o)) continue;
                if (c.relation == "left" && !left_of(b, o)) continue;
                found = true;
                break;
            }
            if (found) break;
        }
    }
    return found != c.negated;
}

inline bool oracle(std::string_view class_id, const Scene& scene) {
    const auto& c = find_concept(class_id);
    if (c.mode != scene.mode) throw std::invalid_argument("class " + c.target + " does not match the scene mode");
    return oracle(c, scene);
}

/// Positive scenes of a CLEVR-like class satisfy no other class's concept.
inline bool acceptable(const Concept& c, bool positive, const Scene& scene) {
    if (!positive) return !oracle(c, scene);
    if (!oracle(c, scene)) return false;
    if (c.mode == Mode::Clevr)
        for (const auto& other : concepts())
            if (other.mode == Mode::Clevr && other.target != c.target && oracle(other, scene)) return false;
    return true;
}

inline std::string image_name(std::size_t index) { return "img_" + std::to_string(index); }

inline std::string object_name(std::size_t image_index, std::size_t j) {
    return "obj_" + std::to_string(image_index) + "_" + std::to_string(j);
}

/// Per-scene seed as a pure function of (master seed, class, index).
inline std::uint64_t scene_seed(std::uint64_t master, std::string_view class_id, std::uint64_t index) {
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a
    for (unsigned char ch : class_id) h = (h ^ ch) * 1099511628211ull;
    std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                      static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    std::array<std::uint32_t, 2> out{};
    seq.generate(out.begin(), out.end());
    return (std::uint64_t{out[0]} << 32) | out[1];
}

/// 1-9 objects, attributes and free grid cells uniform.
template <class Rng>
Scene random_scene(Mode mode, Rng& rng, std::size_t image_index = 0) {
    const auto& vocab = vocabulary(mode);
    Scene s{image_name(image_index), mode, {}, {}};
    std::array<int, kGridSize * kGridSize> cells{};
    for (int i = 0; i < kGridSize * kGridSize; ++i) cells[static_cast<std::size_t>(i)] = i;
    std::shuffle(cells.begin(), cells.end(), rng);
    const int n = std::uniform_int_distribution<int>(1, kGridSize * kGridSize)(rng);
    for (int j = 0; j < n; ++j) {
        SceneObject o;
        o.id = object_name(image_index, static_cast<std::size_t>(j));
        for (const auto& f : vocab.families) {
            auto k = std::uniform_int_distribution<std::size_t>(0, f.values.size() - 1)(rng);
            o.attributes.push_back(f.values[k]);
        }
        o.col = cells[static_cast<std::size_t>(j)] % kGridSize;
        o.row = cells[static_cast<std::size_t>(j)] / kGridSize;
        s.objects.push_back(std::move(o));
    }
    return s;
}

inline constexpr std::size_t kRejectionBudget = 100000;

/// Draws random scenes until one is acceptable as a positive (or negative)
/// instance of the class.
inline Scene generate_scene(std::string_view class_id, bool positive, std::uint64_t seed,
                            std::size_t image_index = 0) {
    const auto& c = find_concept(class_id);
    std::mt19937_64 rng(seed);
    for (std::size_t draw = 0; draw < kRejectionBudget; ++draw) {
        auto s = random_scene(c.mode, rng, image_index);
        if (!acceptable(c, positive, s)) continue;
        s.label = positive ? c.target : "not_" + c.target;
        return s;
    }
    throw GenerationError("no " + std::string(positive ? "positive" : "negative") + " scene for " + c.target +
                          " within " + std::to_string(kRejectionBudget) + " draws");
}

inline std::vector<Atom> scene_to_facts(const Scene& scene) {
    std::vector<Atom> out;
    const auto& img = scene.image_id;
    out.push_back(ground_atom("image", {img}));
    for (const auto& o : scene.objects) out.push_back(ground_atom("in", {img, o.id}));
    for (const auto& o : scene.objects)
        for (const auto& a : o.attributes) out.push_back(ground_atom(a, {o.id}));
    for (const auto& b : scene.objects)
        for (const auto& c : scene.objects)
            if (above(b, c)) out.push_back(ground_atom("above", {b.id, c.id}));
    for (const auto& b : scene.objects)
        for (const auto& c : scene.objects)
            if (left_of(b, c)) out.push_back(ground_atom("left", {b.id, c.id}));
    return out;
}

inline std::string facts_to_text(const std::vector<Atom>& facts) {
    std::string out;
    for (const auto& f : facts) out += f.to_string() + ".\n";
    return out;
}

struct NoiseSpec {
    double p_attr = 0.0;
    double p_drop = 0.0;
    std::uint64_t seed = 0;

    void validate() const {
        if (!(p_attr >= 0.0 && p_attr <= 1.0) || !(p_drop >= 0.0 && p_drop <= 1.0))
            throw std::invalid_argument("noise probabilities must lie in [0,1]");
    }
};

/// Drops whole objects with p_drop, then resamples each remaining attribute
/// fact to another value of its family with p_attr.
inline std::vector<Atom> corrupt_facts(const std::vector<Atom>& facts, const NoiseSpec& spec, Mode mode) {
    spec.validate();
    const auto& vocab = vocabulary(mode);
    std::mt19937_64 rng(spec.seed);
    std::bernoulli_distribution drop(spec.p_drop), resample(spec.p_attr);

    std::vector<std::string> dropped;
    for (const auto& f : facts)
        if (f.predicate == "in" && f.arity() == 2 && drop(rng)) dropped.push_back(f.args[1].name);
    auto is_dropped = [&](const Atom& f) {
        return std::any_of(f.args.begin(), f.args.end(), [&](const Term& t) {
            return std::find(dropped.begin(), dropped.end(), t.name) != dropped.end();
        });
    };

    std::vector<Atom> out;
    for (const auto& f : facts) {
        if (is_dropped(f)) continue;
        const auto* family = f.arity() == 1 ? vocab.family_of(f.predicate) : nullptr;
        if (family && resample(rng)) {
            auto k = std::uniform_int_distribution<std::size_t>(0, family->values.size() - 2)(rng);
            auto current = static_cast<std::size_t>(
                std::find(family->values.begin(), family->values.end(), f.predicate) - family->values.begin());
            if (k >= current) ++k;
            out.push_back(Atom{family->values[k], f.args});
            continue;
        }
        out.push_back(f);
    }
    return out;
}

}  // namespace nal
