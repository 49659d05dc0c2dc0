#pragma once

// Inference with learned frameworks: per-image classification by cautious
// consequence, cascades, evaluation, explanations and timing runs.

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "arguments.hpp"
#include "dataset.hpp"
#include "learner.hpp"
#include "metrics.hpp"
#include "parser.hpp"
#include "scene.hpp"
#include "select.hpp"

namespace nal {

/// A learned framework as stored on disk: the framework text carries its
/// target predicate and class in `% @target` / `% @class` comment lines.
struct Model {
    AbaFramework framework;
    std::string target;
    std::string class_id;
};

inline std::string model_text(const LearntFramework& lf, const std::string& class_id) {
    return serialize_framework(lf.framework, {{"target", lf.target}, {"class", class_id}});
}

inline Model parse_model(std::string_view text) {
    Model m{parse_framework(text), {}, {}};
    auto d = read_directives(text);
    if (!d.count("target")) throw ValidationError("model has no '% @target' line");
    m.target = d.at("target");
    m.class_id = d.count("class") ? d.at("class") : m.target;
    return m;
}

inline Model load_model(const std::filesystem::path& p) { return parse_model(read_text(p)); }

enum class Verdict { Accepted, Rejected, Unclassifiable };

inline std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Accepted: return "accepted";
        case Verdict::Rejected: return "rejected";
        default: return "unclassifiable";
    }
}

/// The model's rules plus the image's facts (its own ground facts dropped),
/// grounded over the image's constants; accepted iff target(image) is a
/// cautious consequence.
inline Verdict classify_image(const AbaFramework& fw, const std::vector<Atom>& facts, const std::string& target,
                              const std::string& image) {
    auto r = accepts_on_facts(fw, facts, ground_atom(target, {image}));
    if (!r) return Verdict::Unclassifiable;
    return *r ? Verdict::Accepted : Verdict::Rejected;
}

inline Verdict classify_image(const AbaFramework& fw, const std::vector<Atom>& facts, const std::string& target) {
    return classify_image(fw, facts, target, image_of(facts));
}

/// A cascade on disk: `cascade.json` naming the class order and one model
/// file per stage. The fall-through class is the last one in the order.
struct CascadeModel {
    std::vector<std::string> order;
    std::vector<Model> stages;
    const std::string& fall_through() const { return order.back(); }
};

inline void write_cascade(const std::filesystem::path& dir, const std::vector<LearntFramework>& stages,
                          const std::vector<std::string>& order) {
    if (stages.size() + 1 != order.size()) throw std::invalid_argument("a cascade has one stage per class but the last");
    std::filesystem::create_directories(dir);
    nlohmann::json j{{"order", order}, {"stages", nlohmann::json::array()}};
    for (std::size_t k = 0; k < stages.size(); ++k) {
        const std::string file = "stage_" + std::to_string(k + 1) + ".aba";
        write_text(dir / file, model_text(stages[k], order[k]));
        j["stages"].push_back(file);
    }
    write_text(dir / "cascade.json", j.dump(2) + "\n");
}

inline CascadeModel load_cascade(const std::filesystem::path& dir) {
    CascadeModel c;
    try {
        auto j = nlohmann::json::parse(read_text(dir / "cascade.json"));
        c.order = j.at("order").get<std::vector<std::string>>();
        for (const auto& f : j.at("stages")) c.stages.push_back(load_model(dir / f.get<std::string>()));
    } catch (const nlohmann::json::exception& e) {
        throw DatasetError((dir / "cascade.json").string() + ": " + e.what());
    }
    if (c.stages.empty() || c.stages.size() + 1 != c.order.size())
        throw ValidationError("cascade.json: need one stage per class but the last");
    return c;
}

/// Per-class positive-only example sets for a cascade, selected from the
/// training split.
inline std::map<std::string, ExampleSet> select_class_examples(const std::vector<LabeledImage>& images,
                                                               const std::vector<std::string>& classes,
                                                               std::size_t n, double threshold, std::uint64_t seed) {
    std::map<std::string, ExampleSet> out;
    for (const auto& c : classes) {
        std::vector<const LabeledImage*> pool;
        for (const auto& img : images)
            if (img.split != "test" && img.label == c) pool.push_back(&img);
        out[c] = make_example_set(target_predicate(c), select_representatives(pool, n, threshold, seed, c), {});
    }
    return out;
}

/// The first stage accepting the image names its class; otherwise the
/// fall-through class.
inline std::string classify_cascade(const std::vector<Model>& stages, const std::string& fall_through,
                                    const std::vector<Atom>& facts) {
    if (stages.empty()) throw std::invalid_argument("a cascade needs at least one framework");
    const auto image = image_of(facts);
    for (const auto& s : stages)
        if (classify_image(s.framework, facts, s.target, image) == Verdict::Accepted) return s.class_id;
    return fall_through;
}

struct Prediction {
    std::string image_id;
    std::string actual;
    std::string predicted;
    bool unclassifiable = false;
};

struct BinaryEvaluation {
    BinaryMetrics metrics;
    std::vector<Prediction> predictions;
};

/// Unclassifiable images count as rejections and are tallied separately.
inline BinaryEvaluation evaluate(const Model& model, const std::vector<const LabeledImage*>& images) {
    if (images.empty()) throw std::invalid_argument("empty test set");
    BinaryEvaluation out;
    BinaryCounts c;
    for (const auto* img : images) {
        auto v = classify_image(model.framework, img->facts, model.target, image_of(img->facts));
        const bool actual = img->label == model.class_id;
        const bool predicted = v == Verdict::Accepted;
        c.add(actual, predicted);
        if (v == Verdict::Unclassifiable) ++c.unclassifiable;
        out.predictions.push_back({img->image_id, img->label, predicted ? model.class_id : "not_" + model.class_id,
                                   v == Verdict::Unclassifiable});
    }
    out.metrics = binary_metrics(c);
    return out;
}

struct CascadeEvaluation {
    ConfusionMatrix confusion;
    std::vector<Prediction> predictions;
};

inline CascadeEvaluation evaluate_cascade(const std::vector<Model>& stages, const std::string& fall_through,
                                          const std::vector<std::string>& classes,
                                          const std::vector<const LabeledImage*>& images) {
    if (images.empty()) throw std::invalid_argument("empty test set");
    CascadeEvaluation out{ConfusionMatrix(classes), {}};
    for (const auto* img : images) {
        auto predicted = classify_cascade(stages, fall_through, img->facts);
        out.confusion.add(img->label, predicted);
        out.predictions.push_back({img->image_id, img->label, predicted, false});
    }
    return out;
}

/// Test-time fact noise over a whole dataset. Each image gets its own stream
/// derived from the spec seed and its position.
inline std::vector<LabeledImage> with_noise(const std::vector<LabeledImage>& images, const NoiseSpec& spec,
                                            Mode mode) {
    std::vector<LabeledImage> out = images;
    for (std::size_t i = 0; i < out.size(); ++i) {
        std::seed_seq seq{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32),
                          static_cast<std::uint32_t>(i)};
        std::uint32_t s[2];
        seq.generate(s, s + 2);
        NoiseSpec per = spec;
        per.seed = (static_cast<std::uint64_t>(s[0]) << 32) | s[1];
        out[i].facts = corrupt_facts(out[i].facts, per, mode);
    }
    return out;
}

inline std::vector<const LabeledImage*> split_of(const std::vector<LabeledImage>& images, const std::string& split) {
    std::vector<const LabeledImage*> out;
    for (const auto& img : images)
        if (split == "all" || img.split == split) out.push_back(&img);
    return out;
}

/// Arguments for `goal` in the grounded framework, each with its attackers.
/// With `facts` empty the framework is used as given.
inline std::string explain(const AbaFramework& fw, const std::vector<Atom>& facts, const Atom& goal,
                           std::size_t limit = 16) {
    auto g = ground(facts.empty() ? fw : with_facts(fw, facts));
    auto exts = stable_extensions(g);
    std::ostringstream out;
    out << "claim " << goal.to_string() << ": ";
    if (exts.empty()) {
        out << "unclassifiable (no stable extension)\n";
    } else {
        out << (is_cautious(g, exts, goal) ? "accepted" : "rejected") << " (" << exts.size()
            << " stable extension" << (exts.size() == 1 ? "" : "s") << ")\n";
    }
    auto args = construct_arguments(g, goal, limit);
    if (args.empty()) {
        out << "no argument constructs the claim\n";
        return out.str();
    }
    for (std::size_t i = 0; i < args.size(); ++i) {
        out << "argument " << i + 1 << ": " << args[i].to_string() << "\n";
        out << "  tree: " << args[i].tree.to_string() << "\n";
        bool attacked = false;
        for (const auto& a : args[i].support_assumptions) {
            auto id = g.atoms.find(a);
            if (!id) continue;
            for (const auto& attacker : construct_arguments(g, g.atoms[g.contrary(*id)], limit)) {
                out << "  attacked on " << a.to_string() << " by " << attacker.to_string() << "\n";
                attacked = true;
            }
        }
        if (!attacked) out << "  unattacked\n";
    }
    return out.str();
}

struct BenchRow {
    std::size_t count = 0;
    std::uint64_t seed = 0;
    double seconds = 0;
    std::string outcome;  // ok, search_failure, timeout, insufficient
    std::size_t rules = 0;
    std::size_t literals = 0;
};

/// Learns with `count` positives and `count` negatives per row and records
/// wall time; failures are recorded, not raised.
inline std::vector<BenchRow> benchmark_scaling(const std::vector<LabeledImage>& images, const std::string& class_id,
                                               const std::vector<std::size_t>& counts,
                                               const std::vector<std::uint64_t>& seeds, const LearnerConfig& cfg,
                                               double threshold = 0.7) {
    std::vector<BenchRow> rows;
    for (auto count : counts) {
        for (auto seed : seeds) {
            BenchRow row{count, seed, 0, "ok", 0, 0};
            auto start = std::chrono::steady_clock::now();
            try {
                auto ex = select_examples(images, class_id, target_predicate(class_id),
                                          SelectionConfig{count, count, threshold, seed});
                auto lf = learn(ex, target_predicate(class_id), cfg);
                row.rules = lf.learned_rule_ids.size();
                for (const auto& r : lf.learned_rules()) row.literals += r.body.size();
            } catch (const SearchFailure&) {
                row.outcome = "search_failure";
            } catch (const Timeout&) {
                row.outcome = "timeout";
            } catch (const InsufficientExamples&) {
                row.outcome = "insufficient";
            }
            row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            rows.push_back(row);
        }
    }
    return rows;
}

inline std::string bench_csv(const std::vector<BenchRow>& rows) {
    std::ostringstream out;
    out << "count,seed,seconds,outcome,rules,literals\n";
    for (const auto& r : rows)
        out << r.count << "," << r.seed << "," << r.seconds << "," << r.outcome << "," << r.rules << ","
            << r.literals << "\n";
    return out.str();
}

}  // namespace nal
