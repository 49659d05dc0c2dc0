// Command-line driver: gen, learn, infer, eval, solve, explain, bench.
// Exit codes: 0 ok, 2 invalid input, 3 search failure, 4 timeout.

#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "nal/pipeline.hpp"
#include "nal/render.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitInvalid = 2;
constexpr int kExitSearchFailure = 3;
constexpr int kExitTimeout = 4;

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

template <class T>
std::vector<T> parse_numbers(const std::string& s) {
    std::vector<T> out;
    for (const auto& item : split_list(s)) {
        try {
            std::size_t used = 0;
            auto v = std::stoull(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            out.push_back(static_cast<T>(v));
        } catch (const std::exception&) {
            throw nal::ValidationError("not a number list: '" + s + "'");
        }
    }
    if (out.empty()) throw nal::ValidationError("empty number list");
    return out;
}

struct LearnerFlags {
    std::size_t max_body_literals = 4;
    std::size_t max_object_vars = 2;
    bool no_relations = false;
    std::size_t max_exception_literals = 2;
    std::size_t max_exception_rules = 8;
    std::int64_t timeout_ms = 600000;

    void add_to(CLI::App* app) {
        app->add_option("--max-body-literals", max_body_literals, "property literals per object variable");
        app->add_option("--max-object-vars", max_object_vars, "object variables in the top rule (1 or 2)");
        app->add_flag("--no-relations", no_relations, "disallow relation literals");
        app->add_option("--max-exception-literals", max_exception_literals);
        app->add_option("--max-exception-rules", max_exception_rules);
        app->add_option("--timeout-ms", timeout_ms, "search budget per framework");
    }

    nal::LearnerConfig config(std::uint64_t seed) const {
        nal::LearnerConfig c;
        c.max_body_literals = max_body_literals;
        c.max_object_vars = max_object_vars;
        c.allow_relations = !no_relations;
        c.max_exception_literals = max_exception_literals;
        c.max_exception_rules = max_exception_rules;
        c.seed = seed;
        c.timeout = std::chrono::milliseconds{timeout_ms};
        return c;
    }
};

bool is_cascade(const fs::path& model) { return fs::is_directory(model); }

std::vector<nal::Atom> read_facts_arg(const std::string& path) { return nal::read_facts_file(path); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"object-centric learning of argumentation frameworks over scene facts"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate a labelled symbolic dataset");
    std::string gen_mode = "shapes", gen_class, gen_out;
    std::size_t gen_n = 3000;
    std::uint64_t gen_seed = 0;
    bool gen_render = false;
    gen->add_option("--mode", gen_mode)->check(CLI::IsMember({"shapes", "clevr"}));
    gen->add_option("--class", gen_class, "binary class; omit with clevr for the 3-class set");
    gen->add_option("--n", gen_n);
    gen->add_option("--seed", gen_seed);
    gen->add_option("--out", gen_out)->required();
    gen->add_flag("--render", gen_render, "also write 32x32 PNG renders");

    // learn
    auto* learn = app.add_subcommand("learn", "learn a framework (or a cascade) from a dataset");
    std::string learn_data, learn_class, learn_out, learn_manifest, learn_cascade;
    std::size_t learn_pos = 10, learn_neg = 10;
    std::uint64_t learn_seed = 0;
    double learn_threshold = 0.7;
    LearnerFlags learn_flags;
    learn->add_option("--data", learn_data);
    learn->add_option("--class", learn_class);
    learn->add_option("--cascade", learn_cascade, "comma-separated class order, e.g. c3,c1,c2");
    learn->add_option("--manifest", learn_manifest, "aba_asp('bk.aba', [pos], [neg]) command file");
    learn->add_option("--pos", learn_pos);
    learn->add_option("--neg", learn_neg);
    learn->add_option("--seed", learn_seed);
    learn->add_option("--threshold", learn_threshold, "confidence pruning threshold");
    learn->add_option("--out", learn_out)->required();
    learn_flags.add_to(learn);

    // infer
    auto* infer = app.add_subcommand("infer", "classify images with a learned model");
    std::string infer_model;
    std::vector<std::string> infer_facts;
    infer->add_option("--model", infer_model)->required();
    infer->add_option("--facts", infer_facts)->required();

    // eval
    auto* eval = app.add_subcommand("eval", "evaluate a model on a dataset split");
    std::string eval_model, eval_data, eval_split = "test", eval_report, eval_confusion;
    double eval_p_attr = 0, eval_p_drop = 0;
    std::uint64_t eval_noise_seed = 0;
    eval->add_option("--model", eval_model)->required();
    eval->add_option("--data", eval_data)->required();
    eval->add_option("--split", eval_split)->check(CLI::IsMember({"train", "test", "all"}));
    eval->add_option("--report", eval_report, "JSON report path");
    eval->add_option("--confusion", eval_confusion, "confusion matrix CSV path");
    eval->add_option("--p-attr", eval_p_attr, "test-time attribute noise");
    eval->add_option("--p-drop", eval_p_drop, "test-time object drop probability");
    eval->add_option("--noise-seed", eval_noise_seed);

    // solve
    auto* solve = app.add_subcommand("solve", "stable extensions and cautious consequences of a framework");
    std::string solve_aba;
    std::size_t solve_bound = 24;
    solve->add_option("--aba", solve_aba)->required();
    solve->add_option("--bound", solve_bound, "maximum undecided assumptions to enumerate");

    // explain
    auto* expl = app.add_subcommand("explain", "arguments and attacks for an atom");
    std::string expl_model, expl_facts, expl_atom;
    std::size_t expl_limit = 16;
    expl->add_option("--model", expl_model)->required();
    expl->add_option("--facts", expl_facts, "image facts; omit to use the framework as is");
    expl->add_option("--atom", expl_atom)->required();
    expl->add_option("--limit", expl_limit, "arguments per claim");

    // bench
    auto* bench = app.add_subcommand("bench", "learning time against example count");
    std::string bench_counts = "5,10,20", bench_seeds = "0", bench_data, bench_class = "s1", bench_out;
    std::uint64_t bench_data_seed = 0;
    LearnerFlags bench_flags;
    bench->add_option("--counts", bench_counts);
    bench->add_option("--seeds", bench_seeds);
    bench->add_option("--data", bench_data, "dataset directory; generated in memory when omitted");
    bench->add_option("--class", bench_class);
    bench->add_option("--data-seed", bench_data_seed, "seed for the in-memory dataset");
    bench->add_option("--out", bench_out, "CSV path (default stdout)");
    bench_flags.add_to(bench);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitInvalid;
    }

    try {
        if (*gen) {
            auto mode = nal::parse_mode(gen_mode);
            if (gen_class.empty() && mode == nal::Mode::Shapes)
                throw nal::ValidationError("--class is required in shapes mode");
            if (gen_n == 0) throw nal::ValidationError("--n must be positive");
            auto records = nal::generate_dataset(mode, gen_class, gen_n, gen_seed);
            nal::write_dataset(gen_out, records);
            if (gen_render) {
                std::vector<nal::Scene> scenes;
                for (const auto& r : records) scenes.push_back(r.scene);
                nal::render_dataset(gen_out, scenes);
            }
            std::cout << "wrote " << records.size() << " scenes to " << gen_out << "\n";
        } else if (*learn) {
            auto cfg = learn_flags.config(learn_seed);
            if (!learn_manifest.empty()) {
                auto cmd = nal::parse_aba_asp(nal::read_text(learn_manifest));
                fs::path bk = fs::path(learn_manifest).parent_path() / cmd.file;
                if (cmd.positives.empty()) throw nal::InsufficientExamples("manifest", 0, 1);
                nal::ExampleSet ex;
                ex.positives = cmd.positives;
                ex.negatives = cmd.negatives;
                ex.background = nal::parse_framework(nal::read_text(bk));
                const std::string target = cmd.positives.front().predicate;
                auto lf = nal::learn(ex, target, cfg);
                nal::write_text(learn_out, nal::model_text(lf, learn_class.empty() ? target : learn_class));
                for (const auto& r : lf.learned_rules()) std::cout << r.to_string() << "\n";
            } else if (!learn_cascade.empty()) {
                if (learn_data.empty()) throw nal::ValidationError("--data is required");
                auto order = split_list(learn_cascade);
                auto images = nal::load_dataset(learn_data);
                auto by_class = nal::select_class_examples(images, order, learn_pos, learn_threshold, learn_seed);
                auto stages = nal::learn_cascade(by_class, order, nal::target_predicate, cfg);
                nal::write_cascade(learn_out, stages, order);
                for (std::size_t k = 0; k < stages.size(); ++k) {
                    std::cout << "% stage " << k + 1 << ": " << order[k] << "\n";
                    for (const auto& r : stages[k].learned_rules()) std::cout << r.to_string() << "\n";
                }
            } else {
                if (learn_data.empty() || learn_class.empty())
                    throw nal::ValidationError("--data and --class are required");
                auto images = nal::load_dataset(learn_data);
                const auto target = nal::target_predicate(learn_class);
                auto ex = nal::select_examples(images, learn_class, target,
                                               {learn_pos, learn_neg, learn_threshold, learn_seed});
                auto lf = nal::learn(ex, target, cfg);
                nal::write_text(learn_out, nal::model_text(lf, learn_class));
                for (const auto& r : lf.learned_rules()) std::cout << r.to_string() << "\n";
            }
        } else if (*infer) {
            if (is_cascade(infer_model)) {
                auto c = nal::load_cascade(infer_model);
                for (const auto& f : infer_facts) {
                    auto facts = read_facts_arg(f);
                    std::cout << nal::image_of(facts) << " " << nal::classify_cascade(c.stages, c.fall_through(), facts)
                              << "\n";
                }
            } else {
                auto m = nal::load_model(infer_model);
                for (const auto& f : infer_facts) {
                    auto facts = read_facts_arg(f);
                    auto v = nal::classify_image(m.framework, facts, m.target);
                    std::cout << nal::image_of(facts) << " " << nal::to_string(v) << "\n";
                }
            }
        } else if (*eval) {
            auto images = nal::load_dataset(eval_data);
            if (eval_p_attr > 0 || eval_p_drop > 0) {
                nal::Mode mode = nal::Mode::Shapes;
                auto scenes = nal::read_scenes(eval_data);
                if (!scenes.empty()) mode = scenes.front().scene.mode;
                images = nal::with_noise(images, {eval_p_attr, eval_p_drop, eval_noise_seed}, mode);
            }
            auto selected = nal::split_of(images, eval_split);
            json report{{"model", eval_model}, {"data", eval_data}, {"split", eval_split},
                        {"noise", {{"p_attr", eval_p_attr}, {"p_drop", eval_p_drop}, {"seed", eval_noise_seed}}}};
            std::optional<nal::ConfusionMatrix> confusion;
            if (is_cascade(eval_model)) {
                auto c = nal::load_cascade(eval_model);
                auto ev = nal::evaluate_cascade(c.stages, c.fall_through(), c.order, selected);
                std::vector<std::pair<std::string, nal::BinaryMetrics>> rows;
                report["classes"] = json::object();
                for (std::size_t k = 0; k < c.order.size(); ++k) {
                    auto m = nal::binary_metrics(ev.confusion.one_vs_rest(k));
                    rows.push_back({c.order[k], m});
                    report["classes"][c.order[k]] = nal::to_json(m);
                }
                auto s = nal::summarize(ev.confusion);
                report["accuracy"] = nal::to_json(s.accuracy);
                report["weighted"] = {{"precision", s.weighted_precision}, {"recall", s.weighted_recall},
                                      {"f1", s.weighted_f1}};
                report["macro_f1"] = s.macro_f1;
                report["confusion"] = ev.confusion.to_json();
                std::cout << nal::metrics_table(rows);
                std::cout << "accuracy " << nal::percent_cell(s.accuracy) << ", weighted F1 " << std::fixed
                          << std::setprecision(1) << s.weighted_f1 << "\n";
                confusion = ev.confusion;
            } else {
                auto m = nal::load_model(eval_model);
                auto ev = nal::evaluate(m, selected);
                report["class"] = m.class_id;
                report["metrics"] = nal::to_json(ev.metrics);
                std::cout << nal::metrics_table({{m.class_id, ev.metrics}});
                if (ev.metrics.counts.unclassifiable)
                    std::cout << ev.metrics.counts.unclassifiable << " unclassifiable image(s) counted as rejected\n";
                nal::ConfusionMatrix cm({m.class_id, "not_" + m.class_id});
                for (const auto& p : ev.predictions)
                    cm.add(p.actual == m.class_id ? m.class_id : "not_" + m.class_id, p.predicted);
                confusion = cm;
            }
            if (!eval_report.empty()) nal::write_text(eval_report, report.dump(2) + "\n");
            if (!eval_confusion.empty()) nal::write_text(eval_confusion, confusion->to_csv());
        } else if (*solve) {
            auto fw = nal::parse_framework(nal::read_text(solve_aba));
            auto g = nal::ground(fw);
            auto exts = nal::stable_extensions(g, {solve_bound});
            json out{{"extensions", json::array()}};
            for (const auto& e : exts) {
                json je{{"assumptions", json::array()}, {"closure", json::array()}};
                for (auto a : e.assumptions) je["assumptions"].push_back(g.text(a));
                for (auto a : e.closure()) je["closure"].push_back(g.text(a));
                out["extensions"].push_back(je);
            }
            if (exts.empty()) {
                out["cautious"] = nullptr;
            } else {
                out["cautious"] = json::array();
                for (auto a : exts.front().closure())
                    if (std::all_of(exts.begin(), exts.end(), [&](const nal::Extension& e) { return e.contains(a); }))
                        out["cautious"].push_back(g.text(a));
            }
            std::cout << out.dump(2) << "\n";
        } else if (*expl) {
            auto m = nal::parse_framework(nal::read_text(expl_model));
            std::vector<nal::Atom> facts;
            if (!expl_facts.empty()) facts = read_facts_arg(expl_facts);
            std::cout << nal::explain(m, facts, nal::parse_atom(expl_atom), expl_limit);
        } else if (*bench) {
            auto counts = parse_numbers<std::size_t>(bench_counts);
            auto seeds = parse_numbers<std::uint64_t>(bench_seeds);
            std::vector<nal::LabeledImage> images;
            if (!bench_data.empty()) {
                images = nal::load_dataset(bench_data);
            } else {
                const auto& c = nal::find_concept(bench_class);
                for (const auto& r : nal::generate_dataset(c.mode, bench_class, 3000, bench_data_seed))
                    images.push_back({r.scene.image_id, r.scene.label, 1.0, r.split, nal::scene_to_facts(r.scene)});
            }
            auto rows = nal::benchmark_scaling(images, bench_class, counts, seeds, bench_flags.config(0));
            auto csv = nal::bench_csv(rows);
            if (bench_out.empty()) std::cout << csv;
            else nal::write_text(bench_out, csv);
        }
    } catch (const nal::SearchFailure& e) {
        std::cerr << "search failure: " << e.what() << "\n";
        return kExitSearchFailure;
    } catch (const nal::Timeout& e) {
        std::cerr << "timeout: " << e.what() << "\n";
        return kExitTimeout;
    } catch (const nal::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const nal::InsufficientExamples& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const nal::ResourceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::logic_error& e) {
        // invalid_argument lands here too; a plain logic_error is an internal fault.
        std::cerr << "error: " << e.what() << "\n";
        return dynamic_cast<const std::invalid_argument*>(&e) ? kExitInvalid : 1;
    } catch (const std::runtime_error& e) {
        // ValidationError, DatasetError, GroundingError, GenerationError
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
    return 0;
}
