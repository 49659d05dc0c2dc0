#pragma once

// Example sets and their selection: confidence pruning, then K-means over a
// fixed-length slot encoding of each image, one representative per cluster.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "arguments.hpp"
#include "dataset.hpp"
#include "scene.hpp"

namespace nal {

class InsufficientExamples : public std::runtime_error {
public:
    InsufficientExamples(const std::string& label, std::size_t have, std::size_t want)
        : std::runtime_error("not enough examples for '" + label + "': have " + std::to_string(have) + ", want " +
                             std::to_string(want)),
          label_(label), have_(have), want_(want) {}
    const std::string& label() const noexcept { return label_; }
    std::size_t have() const noexcept { return have_; }
    std::size_t want() const noexcept { return want_; }

private:
    std::string label_;
    std::size_t have_;
    std::size_t want_;
};

struct ExampleSet {
    std::vector<Atom> positives;
    std::vector<Atom> negatives;
    AbaFramework background;  // ground facts of the example images

    void validate() const {
        std::set<Atom> pos(positives.begin(), positives.end());
        for (const auto& n : negatives)
            if (pos.count(n)) throw ValidationError(n.to_string() + " is both a positive and a negative example");
        for (const auto& r : background.rules)
            if (!r.body.empty() || !r.head.is_ground())
                throw ValidationError("background must consist of ground facts: " + r.to_string());
        std::set<std::string> images;
        for (const auto& r : background.rules)
            if (r.head.predicate == "image" && r.head.arity() == 1) images.insert(r.head.args[0].name);
        for (const auto* list : {&positives, &negatives})
            for (const auto& e : *list) {
                if (e.arity() != 1 || !e.is_ground()) throw ValidationError("example " + e.to_string() + " is not target(image)");
                if (!images.count(e.args[0].name))
                    throw ValidationError("no background facts for the image of " + e.to_string());
            }
    }
};

/// Ground facts grouped by image: an image owns the facts whose constants are
/// the image itself or objects it contains. Images are the arguments of
/// image/1 facts.
inline std::map<std::string, std::vector<Atom>> facts_by_image(const std::vector<Atom>& facts) {
    std::map<std::string, std::set<std::string>> members;
    for (const auto& f : facts)
        if (f.predicate == "image" && f.arity() == 1) members[f.args[0].name].insert(f.args[0].name);
    for (const auto& f : facts)
        if (f.predicate == "in" && f.arity() == 2 && members.count(f.args[0].name))
            members[f.args[0].name].insert(f.args[1].name);
    std::map<std::string, std::string> owner;
    for (const auto& [img, consts] : members)
        for (const auto& c : consts) owner.emplace(c, img);
    std::map<std::string, std::vector<Atom>> out;
    for (const auto& [img, consts] : members) out[img];
    for (const auto& f : facts) {
        if (f.args.empty()) continue;
        auto it = owner.find(f.args[0].name);
        if (it == owner.end()) continue;
        const auto& consts = members[it->second];
        if (std::all_of(f.args.begin(), f.args.end(), [&](const Term& t) { return consts.count(t.name) != 0; }))
            out[it->second].push_back(f);
    }
    return out;
}

inline std::vector<Atom> background_facts(const AbaFramework& fw) {
    std::vector<Atom> out;
    for (const auto& r : fw.rules)
        if (r.body.empty() && r.head.is_ground()) out.push_back(r.head);
    return out;
}

inline ExampleSet make_example_set(const std::string& target, const std::vector<const LabeledImage*>& pos,
                                   const std::vector<const LabeledImage*>& neg) {
    ExampleSet e;
    for (const auto* list : {&pos, &neg})
        for (const auto* img : *list) {
            (list == &pos ? e.positives : e.negatives).push_back(ground_atom(target, {img->image_id}));
            for (const auto& f : img->facts) e.background.rules.push_back({{}, f, {}});
        }
    for (std::size_t i = 0; i < e.background.rules.size(); ++i) e.background.rules[i].id = auto_rule_id(i);
    e.validate();
    return e;
}

namespace detail {

/// Rank of a property in the canonical object sort: shape, colour, size,
/// material, then anything unknown.
inline std::size_t family_rank(const std::string& prop) {
    static const std::vector<std::string> order{"shape", "color", "size", "material"};
    for (auto mode : {Mode::Shapes, Mode::Clevr})
        if (const auto* f = vocabulary(mode).family_of(prop)) {
            auto it = std::find(order.begin(), order.end(), f->name);
            return static_cast<std::size_t>(it - order.begin());
        }
    return order.size();
}

/// Multi-hot property vectors of up to `slots` objects, objects in canonical
/// order (shape, colour, size, material). Facts carry no coordinates, and
/// objects with equal properties fill equal slots anyway, so position is not
/// needed as a tie-break.
inline std::vector<double> slot_encoding(const LabeledImage& img, const std::vector<std::string>& props,
                                         std::size_t slots) {
    std::vector<std::string> objects;
    for (const auto& f : img.facts)
        if (f.predicate == "in" && f.arity() == 2) objects.push_back(f.args[1].name);
    std::vector<std::vector<std::pair<std::size_t, std::string>>> keyed;
    for (const auto& o : objects) {
        std::vector<std::pair<std::size_t, std::string>> ps;
        for (const auto& f : img.facts)
            if (f.arity() == 1 && f.args[0].name == o) ps.push_back({family_rank(f.predicate), f.predicate});
        std::sort(ps.begin(), ps.end());
        keyed.push_back(std::move(ps));
    }
    std::sort(keyed.begin(), keyed.end());
    std::vector<double> v(slots * props.size(), 0.0);
    for (std::size_t s = 0; s < keyed.size() && s < slots; ++s)
        for (const auto& [family, p] : keyed[s]) {
            auto k = static_cast<std::size_t>(std::lower_bound(props.begin(), props.end(), p) - props.begin());
            if (k < props.size() && props[k] == p) v[s * props.size() + k] = 1.0;
        }
    return v;
}

inline double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] - b[i]) * (a[i] - b[i]);
    return d;
}

}  // namespace detail

inline constexpr std::size_t kKmeansIterations = 50;

/// Picks `n` distinct images from `pool`: images below `threshold` are
/// dropped, the rest clustered into n groups by K-means (k-means++ seeding),
/// and the image nearest each centroid (ties by image id) represents it.
inline std::vector<const LabeledImage*> select_representatives(std::vector<const LabeledImage*> pool, std::size_t n,
                                                                double threshold, std::uint64_t seed,
                                                                const std::string& label) {
    std::erase_if(pool, [&](const LabeledImage* img) { return img->confidence < threshold; });
    if (pool.size() < n || n == 0) throw InsufficientExamples(label, pool.size(), n);
    std::sort(pool.begin(), pool.end(),
              [](const LabeledImage* a, const LabeledImage* b) { return natural_less(a->image_id, b->image_id); });

    std::set<std::string> prop_set;
    std::size_t slots = 1;
    for (const auto* img : pool) {
        std::size_t objects = 0;
        std::set<std::string> object_names;
        for (const auto& f : img->facts)
            if (f.predicate == "in" && f.arity() == 2) {
                ++objects;
                object_names.insert(f.args[1].name);
            }
        for (const auto& f : img->facts)
            if (f.arity() == 1 && object_names.count(f.args[0].name)) prop_set.insert(f.predicate);
        slots = std::max(slots, objects);
    }
    std::vector<std::string> props(prop_set.begin(), prop_set.end());
    std::vector<std::vector<double>> x;
    x.reserve(pool.size());
    for (const auto* img : pool) x.push_back(detail::slot_encoding(*img, props, slots));

    // k-means++ seeding.
    std::mt19937_64 rng(seed);
    std::vector<std::vector<double>> centers;
    std::vector<std::size_t> seeded;
    seeded.push_back(std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng));
    centers.push_back(x[seeded.back()]);
    while (centers.size() < n) {
        std::vector<double> d2(pool.size());
        for (std::size_t i = 0; i < pool.size(); ++i) {
            d2[i] = std::numeric_limits<double>::max();
            for (const auto& c : centers) d2[i] = std::min(d2[i], detail::sq_dist(x[i], c));
        }
        std::size_t pick = 0;
        if (std::all_of(d2.begin(), d2.end(), [](double d) { return d == 0.0; })) {
            // Identical points: take the first index not yet used as a seed.
            while (std::find(seeded.begin(), seeded.end(), pick) != seeded.end()) ++pick;
        } else {
            pick = std::discrete_distribution<std::size_t>(d2.begin(), d2.end())(rng);
        }
        seeded.push_back(pick);
        centers.push_back(x[pick]);
    }

    // Lloyd iterations; an empty cluster keeps its centroid.
    std::vector<std::size_t> assign(pool.size(), 0);
    for (std::size_t it = 0; it < kKmeansIterations; ++it) {
        bool moved = false;
        for (std::size_t i = 0; i < pool.size(); ++i) {
            std::size_t best = 0;
            double bd = detail::sq_dist(x[i], centers[0]);
            for (std::size_t k = 1; k < n; ++k) {
                double d = detail::sq_dist(x[i], centers[k]);
                if (d < bd) {
                    bd = d;
                    best = k;
                }
            }
            if (it == 0 || assign[i] != best) moved = true;
            assign[i] = best;
        }
        if (!moved) break;
        for (std::size_t k = 0; k < n; ++k) {
            std::vector<double> sum(x[0].size(), 0.0);
            std::size_t count = 0;
            for (std::size_t i = 0; i < pool.size(); ++i)
                if (assign[i] == k) {
                    for (std::size_t j = 0; j < sum.size(); ++j) sum[j] += x[i][j];
                    ++count;
                }
            if (count == 0) continue;
            for (auto& s : sum) s /= static_cast<double>(count);
            centers[k] = std::move(sum);
        }
    }

    // Pool is sorted by id, so strict comparison keeps the smallest id on ties.
    std::vector<char> used(pool.size(), 0);
    std::vector<const LabeledImage*> out;
    for (std::size_t k = 0; k < n; ++k) {
        auto nearest = [&](bool members_only) {
            std::size_t best = pool.size();
            double bd = std::numeric_limits<double>::max();
            for (std::size_t i = 0; i < pool.size(); ++i) {
                if (used[i] || (members_only && assign[i] != k)) continue;
                double d = detail::sq_dist(x[i], centers[k]);
                if (d < bd) {
                    bd = d;
                    best = i;
                }
            }
            return best;
        };
        std::size_t pick = nearest(true);
        if (pick == pool.size()) pick = nearest(false);
        used[pick] = 1;
        out.push_back(pool[pick]);
    }
    std::sort(out.begin(), out.end(),
              [](const LabeledImage* a, const LabeledImage* b) { return natural_less(a->image_id, b->image_id); });
    return out;
}

struct SelectionConfig {
    std::size_t n_pos = 10;
    std::size_t n_neg = 10;
    double threshold = 0.7;
    std::uint64_t seed = 0;
};

/// Binary selection from the training split: images labelled `positive_label`
/// are positives, all others negatives.
inline ExampleSet select_examples(const std::vector<LabeledImage>& images, const std::string& positive_label,
                                  const std::string& target, const SelectionConfig& cfg) {
    std::vector<const LabeledImage*> pos, neg;
    for (const auto& img : images) {
        if (img.split == "test") continue;
        (img.label == positive_label ? pos : neg).push_back(&img);
    }
    auto p = select_representatives(pos, cfg.n_pos, cfg.threshold, cfg.seed, positive_label);
    auto n = select_representatives(neg, cfg.n_neg, cfg.threshold, cfg.seed + 1, "not_" + positive_label);
    return make_example_set(target, p, n);
}

}  // namespace nal
