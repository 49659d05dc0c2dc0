#pragma once

// Learning a framework from examples. A hypothesis is one top rule for the
// target, guarded by a fresh assumption, plus exception rules that derive the
// assumption's contrary:
//
//   t(A) :- image(A), alpha_1(A).                      c_alpha_1(A) :- in(A,B), p(B), ...
//   t(A) :- in(A,B), p(B), ..., alpha_1(B,A).           c_alpha_1(A,B) :- image(B), q(A), ...
//   t(A) :- in(A,B), p(B), ..., in(A,C), q(C), ..., r(B,C), alpha_1(B,A).
//
// Hypotheses are searched by increasing total size; coverage is evaluated on
// compiled bitmasks and the winner is re-checked with the semantics engine.

#include <algorithm>
#include <bit>
#include <cctype>
#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "ground.hpp"
#include "parser.hpp"
#include "select.hpp"
#include "semantics.hpp"

namespace nal {

class SearchFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class Timeout : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct LearnerConfig {
    std::size_t max_body_literals = 4;  // property literals per object variable of the top rule
    std::size_t max_object_vars = 2;
    bool allow_relations = true;
    std::size_t max_exception_literals = 2;
    std::size_t max_exception_rules = 8;
    std::uint64_t seed = 0;
    std::chrono::milliseconds timeout{600000};

    void validate() const {
        if (max_body_literals < 1 || max_object_vars < 1 || max_exception_literals < 1 || max_exception_rules < 1)
            throw std::invalid_argument("learner bounds must be at least 1");
        if (max_object_vars > 2) throw std::invalid_argument("at most 2 object variables are supported");
        if (timeout.count() <= 0) throw std::invalid_argument("timeout must be positive");
    }
};

struct Hypothesis {
    std::size_t objects = 1;  // object variables in the top rule: 0, 1 or 2
    std::vector<std::string> props_b;
    std::vector<std::string> props_c;
    std::string relation;  // empty: none
    bool relation_reversed = false;
    std::vector<std::vector<std::string>> exceptions;

    std::size_t top_cost() const {
        if (objects == 0) return 1;
        std::size_t c = 1 + props_b.size();
        if (objects == 2) c += 1 + props_c.size() + (relation.empty() ? 0 : 1);
        return c;
    }

    std::size_t exception_cost() const {
        std::size_t c = 0;
        for (const auto& e : exceptions) c += e.size() + (objects == 0 ? 1 : 0);
        return c;
    }

    std::size_t cost() const { return top_cost() + exception_cost(); }

    Atom assumption(const std::string& alpha) const {
        if (objects == 0) return Atom{alpha, {Term::variable("A")}};
        return Atom{alpha, {Term::variable("A"), Term::variable("B")}};
    }

    Atom contrary(const std::string& alpha) const {
        auto a = assumption(alpha);
        a.predicate = "c_" + alpha;
        return a;
    }

    Rule top_rule(const std::string& target, const std::string& alpha) const {
        auto A = Term::variable("A"), B = Term::variable("B"), C = Term::variable("C");
        Rule r{{}, Atom{target, {A}}, {}};
        if (objects == 0) {
            r.body.push_back(Atom{"image", {A}});
            r.body.push_back(Atom{alpha, {A}});
            return r;
        }
        r.body.push_back(Atom{"in", {A, B}});
        for (const auto& p : props_b) r.body.push_back(Atom{p, {B}});
        if (objects == 2) {
            r.body.push_back(Atom{"in", {A, C}});
            for (const auto& p : props_c) r.body.push_back(Atom{p, {C}});
            if (!relation.empty())
                r.body.push_back(relation_reversed ? Atom{relation, {C, B}} : Atom{relation, {B, C}});
        }
        r.body.push_back(Atom{alpha, {B, A}});
        return r;
    }

    std::vector<Rule> exception_rules(const std::string& alpha) const {
        auto A = Term::variable("A"), B = Term::variable("B");
        std::vector<Rule> out;
        for (const auto& e : exceptions) {
            Rule r{{}, contrary(alpha), {}};
            if (objects == 0) {
                r.body.push_back(Atom{"in", {A, B}});
                for (const auto& p : e) r.body.push_back(Atom{p, {B}});
            } else {
                r.body.push_back(Atom{"image", {B}});
                for (const auto& p : e) r.body.push_back(Atom{p, {A}});
            }
            out.push_back(std::move(r));
        }
        return out;
    }
};

struct LearnStats {
    std::size_t top_candidates = 0;
    std::size_t search_nodes = 0;
    std::size_t cost = 0;
};

struct LearntFramework {
    AbaFramework framework;
    std::vector<std::string> learned_rule_ids;
    std::vector<std::string> assumption_names;
    std::string target;
    Hypothesis hypothesis;
    LearnStats stats;

    std::vector<Rule> learned_rules() const {
        std::vector<Rule> out;
        for (const auto& r : framework.rules)
            if (std::find(learned_rule_ids.begin(), learned_rule_ids.end(), r.id) != learned_rule_ids.end())
                out.push_back(r);
        return out;
    }
};

/// `fw` with its ground facts replaced by `facts`.
inline AbaFramework with_facts(const AbaFramework& fw, const std::vector<Atom>& facts) {
    AbaFramework out;
    for (const auto& r : fw.rules)
        if (!(r.body.empty() && r.head.is_ground())) out.rules.push_back(r);
    std::set<std::string> ids;
    for (const auto& r : out.rules) ids.insert(r.id);
    std::size_t next = 0;
    for (const auto& f : facts) {
        std::string id;
        do id = "fact" + std::to_string(++next);
        while (ids.count(id));
        out.rules.push_back({id, f, {}});
    }
    out.assumptions = fw.assumptions;
    out.validate();
    return out;
}

/// Cautious acceptance of `goal` in `fw` restricted to `facts`; nullopt when
/// no stable extension exists.
inline std::optional<bool> accepts_on_facts(const AbaFramework& fw, const std::vector<Atom>& facts, const Atom& goal,
                                            const SolverOptions& opts = {}) {
    auto g = ground(with_facts(fw, facts));
    auto exts = stable_extensions(g, opts);
    if (exts.empty()) return std::nullopt;
    return is_cautious(g, exts, goal);
}

struct ExampleOutcome {
    Atom example;
    bool positive = true;
    bool accepted = false;
    bool unclassifiable = false;

    bool correct() const { return !unclassifiable && accepted == positive; }
};

struct VerificationReport {
    std::vector<ExampleOutcome> outcomes;

    std::size_t correct() const {
        return static_cast<std::size_t>(
            std::count_if(outcomes.begin(), outcomes.end(), [](const ExampleOutcome& o) { return o.correct(); }));
    }
    bool pass() const { return correct() == outcomes.size(); }
};

/// Grounds `fw` once per example image (its rules plus that image's facts) and
/// checks cautious acceptance of every example.
inline VerificationReport verify_solution(const AbaFramework& fw, const ExampleSet& examples) {
    std::vector<Atom> facts = background_facts(examples.background);
    for (const auto& f : background_facts(fw)) facts.push_back(f);
    std::sort(facts.begin(), facts.end());
    facts.erase(std::unique(facts.begin(), facts.end()), facts.end());
    auto by_image = facts_by_image(facts);

    VerificationReport report;
    for (const auto* list : {&examples.positives, &examples.negatives}) {
        for (const auto& e : *list) {
            ExampleOutcome o{e, list == &examples.positives, false, false};
            std::vector<Atom> image_facts;
            if (e.arity() == 1) {
                auto it = by_image.find(e.args[0].name);
                if (it != by_image.end()) image_facts = it->second;
            }
            // Images without an image/1 fact keep every fact mentioning them.
            if (image_facts.empty())
                for (const auto& f : facts)
                    for (const auto& t : f.args)
                        if (e.arity() == 1 && t.name == e.args[0].name) {
                            image_facts.push_back(f);
                            break;
                        }
            auto r = accepts_on_facts(fw, image_facts, e);
            if (!r) o.unclassifiable = true;
            else o.accepted = *r;
            report.outcomes.push_back(std::move(o));
        }
    }
    return report;
}

namespace detail {

using Mask = std::uint64_t;

inline Mask bit(std::size_t i) { return Mask{1} << i; }

struct CompiledImage {
    std::string id;
    std::vector<Mask> props;                 // per object
    std::vector<std::vector<Mask>> rel_out;  // [relation][b] = {c : r(b,c)}
    std::vector<std::vector<Mask>> rel_in;   // [relation][b] = {c : r(c,b)}
};

struct CompiledExamples {
    std::vector<std::string> props;      // sorted
    std::vector<std::string> relations;  // sorted
    std::vector<CompiledImage> pos, neg;

    std::vector<std::string> names(Mask m) const {
        std::vector<std::string> out;
        for (std::size_t i = 0; i < props.size(); ++i)
            if (m & bit(i)) out.push_back(props[i]);
        return out;
    }
};

inline CompiledExamples compile_examples(const ExampleSet& ex) {
    auto by_image = facts_by_image(background_facts(ex.background));
    CompiledExamples out;
    std::set<std::string> props, relations;
    auto objects_of = [](const std::vector<Atom>& facts) {
        std::vector<std::string> objs;
        for (const auto& f : facts)
            if (f.predicate == "in" && f.arity() == 2 &&
                std::find(objs.begin(), objs.end(), f.args[1].name) == objs.end())
                objs.push_back(f.args[1].name);
        return objs;
    };
    for (const auto& [img, facts] : by_image) {
        auto objs = objects_of(facts);
        for (const auto& f : facts) {
            auto is_obj = [&](const Term& t) { return std::find(objs.begin(), objs.end(), t.name) != objs.end(); };
            if (f.arity() == 1 && is_obj(f.args[0])) props.insert(f.predicate);
            if (f.arity() == 2 && f.predicate != "in" && is_obj(f.args[0]) && is_obj(f.args[1]))
                relations.insert(f.predicate);
        }
    }
    out.props.assign(props.begin(), props.end());
    out.relations.assign(relations.begin(), relations.end());
    if (out.props.size() > 64) throw ValidationError("more than 64 object properties");

    auto compile = [&](const Atom& e) {
        CompiledImage ci;
        ci.id = e.args[0].name;
        const auto& facts = by_image.at(ci.id);
        auto objs = objects_of(facts);
        if (objs.size() > 64) throw ValidationError("image " + ci.id + " has more than 64 objects");
        auto index = [&](const std::string& name) -> std::optional<std::size_t> {
            auto it = std::find(objs.begin(), objs.end(), name);
            if (it == objs.end()) return std::nullopt;
            return static_cast<std::size_t>(it - objs.begin());
        };
        ci.props.assign(objs.size(), 0);
        ci.rel_out.assign(out.relations.size(), std::vector<Mask>(objs.size(), 0));
        ci.rel_in = ci.rel_out;
        for (const auto& f : facts) {
            if (f.arity() == 1) {
                auto o = index(f.args[0].name);
                auto p = std::lower_bound(out.props.begin(), out.props.end(), f.predicate);
                if (o && p != out.props.end() && *p == f.predicate)
                    ci.props[*o] |= bit(static_cast<std::size_t>(p - out.props.begin()));
            } else if (f.arity() == 2 && f.predicate != "in") {
                auto b = index(f.args[0].name), c = index(f.args[1].name);
                auto r = std::lower_bound(out.relations.begin(), out.relations.end(), f.predicate);
                if (!b || !c || r == out.relations.end() || *r != f.predicate) continue;
                auto k = static_cast<std::size_t>(r - out.relations.begin());
                ci.rel_out[k][*b] |= bit(*c);
                ci.rel_in[k][*c] |= bit(*b);
            }
        }
        return ci;
    };
    for (const auto& e : ex.positives) out.pos.push_back(compile(e));
    for (const auto& e : ex.negatives) out.neg.push_back(compile(e));
    return out;
}

struct TopCandidate {
    std::size_t objects = 1;
    Mask mb = 0, mc = 0;
    int relation = -1;
    bool reversed = false;
    std::size_t cost = 0;
    std::string text;
    std::vector<Mask> w_pos, w_neg;  // witness sets; bit 0 stands for the image when objects == 0
};

/// Objects B (or the image, for object-free rules) through which the top
/// rule derives the target, before exceptions.
inline Mask witnesses(const CompiledImage& img, const TopCandidate& t) {
    if (t.objects == 0) return 1;
    Mask partners_all = 0;
    if (t.objects == 2)
        for (std::size_t c = 0; c < img.props.size(); ++c)
            if ((img.props[c] & t.mc) == t.mc) partners_all |= bit(c);
    Mask w = 0;
    for (std::size_t b = 0; b < img.props.size(); ++b) {
        if ((img.props[b] & t.mb) != t.mb) continue;
        if (t.objects == 1) {
            w |= bit(b);
            continue;
        }
        Mask partners = partners_all;
        if (t.relation >= 0) {
            const auto& rel = t.reversed ? img.rel_in : img.rel_out;
            partners &= rel[static_cast<std::size_t>(t.relation)][b];
        }
        if (partners) w |= bit(b);
    }
    return w;
}

/// Objects (or the image) removed by an exception with property mask `me`.
inline Mask killed(const CompiledImage& img, std::size_t objects, Mask me) {
    Mask k = 0;
    for (std::size_t o = 0; o < img.props.size(); ++o)
        if ((img.props[o] & me) == me) k |= bit(o);
    if (objects == 0) return k ? 1 : 0;
    return k;
}

inline void for_each_subset(Mask m, std::size_t max_size, bool include_empty, const auto& fn) {
    std::vector<std::size_t> bits;
    for (std::size_t i = 0; i < 64; ++i)
        if (m & bit(i)) bits.push_back(i);
    const std::size_t n = bits.size();
    for (Mask s = 0; s < (Mask{1} << n); ++s) {
        if (static_cast<std::size_t>(std::popcount(s)) > max_size) continue;
        if (!include_empty && s == 0) continue;
        Mask out = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (s & bit(i)) out |= bit(bits[i]);
        fn(out);
    }
}

struct ExceptionCandidate {
    Mask mask = 0;
    std::size_t cost = 0;
    std::string text;
    std::vector<Mask> kill_pos, kill_neg;
};

class Deadline {
public:
    explicit Deadline(std::chrono::milliseconds budget) : end_(std::chrono::steady_clock::now() + budget) {}
    void check(std::size_t& counter) const {
        if ((++counter & 0x3ff) == 0 && std::chrono::steady_clock::now() > end_)
            throw Timeout("learning exceeded its time budget");
    }
    void check_now() const {
        if (std::chrono::steady_clock::now() > end_) throw Timeout("learning exceeded its time budget");
    }

private:
    std::chrono::steady_clock::time_point end_;
};

/// Exception search for one top candidate; results are memoised across
/// budget levels.
class ExceptionSearch {
public:
    ExceptionSearch(const CompiledExamples& ex, const TopCandidate& top, const LearnerConfig& cfg)
        : ex_(ex), top_(top), cfg_(cfg) {
        // Candidates: property subsets of some negative witness.
        std::set<Mask> masks;
        for (std::size_t n = 0; n < ex.neg.size(); ++n) {
            Mask w = top.w_neg[n];
            if (!w) continue;
            const auto& img = ex.neg[n];
            for (std::size_t o = 0; o < img.props.size(); ++o) {
                if (top.objects != 0 && !(w & bit(o))) continue;
                for_each_subset(img.props[o], cfg.max_exception_literals, false, [&](Mask m) { masks.insert(m); });
            }
        }
        for (Mask m : masks) {
            ExceptionCandidate c;
            c.mask = m;
            c.cost = static_cast<std::size_t>(std::popcount(m)) + (top.objects == 0 ? 1 : 0);
            for (const auto& name : ex.names(m)) c.text += name + ",";
            bool safe = true;
            for (std::size_t p = 0; p < ex.pos.size(); ++p) {
                c.kill_pos.push_back(killed(ex.pos[p], top.objects, m));
                if ((top.w_pos[p] & ~c.kill_pos.back()) == 0) safe = false;
            }
            if (!safe) continue;
            bool useful = false;
            for (std::size_t n = 0; n < ex.neg.size(); ++n) {
                c.kill_neg.push_back(killed(ex.neg[n], top.objects, m));
                if (c.kill_neg.back() & top.w_neg[n]) useful = true;
            }
            if (useful) cands_.push_back(std::move(c));
        }
        std::sort(cands_.begin(), cands_.end(), [](const ExceptionCandidate& a, const ExceptionCandidate& b) {
            return std::tie(a.cost, a.text) < std::tie(b.cost, b.text);
        });
        // Infeasible when some negative witness has no safe exception at all.
        for (std::size_t n = 0; n < ex.neg.size() && feasible_; ++n) {
            Mask covered = 0;
            for (const auto& c : cands_) covered |= c.kill_neg[n];
            if ((top.w_neg[n] & ~covered) != 0) feasible_ = false;
        }
    }

    bool feasible() const { return feasible_; }
    std::size_t proven_min() const { return proven_min_; }

    /// Exception masks with total cost exactly `budget`, if any; all smaller
    /// budgets must have been tried before.
    std::optional<std::vector<Mask>> solve(std::size_t budget, const Deadline& deadline, std::size_t& nodes) {
        if (!feasible_ || budget < proven_min_) return std::nullopt;
        std::vector<Mask> kill_pos(ex_.pos.size(), 0), kill_neg(ex_.neg.size(), 0);
        std::vector<std::size_t> chosen;
        if (dfs(budget, kill_pos, kill_neg, chosen, deadline, nodes)) {
            std::vector<Mask> out;
            for (auto i : chosen) out.push_back(cands_[i].mask);
            return out;
        }
        proven_min_ = budget + 1;
        return std::nullopt;
    }

private:
    bool dfs(std::size_t budget, std::vector<Mask>& kill_pos, std::vector<Mask>& kill_neg,
             std::vector<std::size_t>& chosen, const Deadline& deadline, std::size_t& nodes) {
        deadline.check(nodes);
        // Pick the uncovered negative witness with the fewest covering options.
        std::size_t best_n = ex_.neg.size(), best_o = 0, best_options = SIZE_MAX;
        for (std::size_t n = 0; n < ex_.neg.size(); ++n) {
            Mask open = top_.w_neg[n] & ~kill_neg[n];
            while (open) {
                auto o = static_cast<std::size_t>(std::countr_zero(open));
                open &= open - 1;
                std::size_t options = 0;
                for (const auto& c : cands_)
                    if (c.cost <= budget && (c.kill_neg[n] & bit(o))) ++options;
                if (options < best_options) {
                    best_options = options;
                    best_n = n;
                    best_o = o;
                }
            }
        }
        if (best_n == ex_.neg.size()) return budget == 0;
        if (best_options == 0 || chosen.size() >= cfg_.max_exception_rules) return false;
        for (std::size_t i = 0; i < cands_.size(); ++i) {
            const auto& c = cands_[i];
            if (c.cost > budget || !(c.kill_neg[best_n] & bit(best_o))) continue;
            if (std::find(chosen.begin(), chosen.end(), i) != chosen.end()) continue;
            bool keeps_positives = true;
            for (std::size_t p = 0; p < ex_.pos.size() && keeps_positives; ++p)
                if ((top_.w_pos[p] & ~(kill_pos[p] | c.kill_pos[p])) == 0) keeps_positives = false;
            if (!keeps_positives) continue;
            auto saved_pos = kill_pos, saved_neg = kill_neg;
            for (std::size_t p = 0; p < ex_.pos.size(); ++p) kill_pos[p] |= c.kill_pos[p];
            for (std::size_t n = 0; n < ex_.neg.size(); ++n) kill_neg[n] |= c.kill_neg[n];
            chosen.push_back(i);
            if (dfs(budget - c.cost, kill_pos, kill_neg, chosen, deadline, nodes)) return true;
            chosen.pop_back();
            kill_pos = std::move(saved_pos);
            kill_neg = std::move(saved_neg);
        }
        return false;
    }

    const CompiledExamples& ex_;
    const TopCandidate& top_;
    const LearnerConfig& cfg_;
    std::vector<ExceptionCandidate> cands_;
    bool feasible_ = true;
    std::size_t proven_min_ = 0;
};

inline std::vector<TopCandidate> top_candidates(const CompiledExamples& ex, const LearnerConfig& cfg) {
    std::vector<TopCandidate> out;
    std::set<std::tuple<std::size_t, Mask, Mask, int, bool>> seen;
    auto add = [&](TopCandidate t) {
        if (!seen.insert({t.objects, t.mb, t.mc, t.relation, t.reversed}).second) return;
        for (const auto& img : ex.pos) {
            Mask w = witnesses(img, t);
            if (!w) return;  // must derive every positive
            t.w_pos.push_back(w);
        }
        for (const auto& img : ex.neg) t.w_neg.push_back(witnesses(img, t));
        Hypothesis h;
        h.objects = t.objects;
        h.props_b = ex.names(t.mb);
        h.props_c = ex.names(t.mc);
        if (t.relation >= 0) {
            h.relation = ex.relations[static_cast<std::size_t>(t.relation)];
            h.relation_reversed = t.reversed;
        }
        t.cost = h.top_cost();
        t.text = h.top_rule("t", "alpha").to_string();
        out.push_back(std::move(t));
    };

    add(TopCandidate{0, 0, 0, -1, false, 0, {}, {}, {}});
    // Property sets must hold of some object of the first positive.
    const auto& first = ex.pos.front();
    const std::size_t n = first.props.size();
    for (std::size_t b = 0; b < n; ++b)
        for_each_subset(first.props[b], cfg.max_body_literals, true,
                        [&](Mask mb) { add(TopCandidate{1, mb, 0, -1, false, 0, {}, {}, {}}); });
    if (cfg.max_object_vars < 2) return out;
    for (std::size_t b = 0; b < n; ++b) {
        for (std::size_t c = 0; c < n; ++c) {
            if (b == c) continue;
            std::vector<std::pair<int, bool>> rels{{-1, false}};
            if (cfg.allow_relations)
                for (std::size_t r = 0; r < ex.relations.size(); ++r) {
                    if (first.rel_out[r][b] & bit(c)) rels.push_back({static_cast<int>(r), false});
                    if (first.rel_in[r][b] & bit(c)) rels.push_back({static_cast<int>(r), true});
                }
            for_each_subset(first.props[b], cfg.max_body_literals, true, [&](Mask mb) {
                for_each_subset(first.props[c], cfg.max_body_literals, true, [&](Mask mc) {
                    for (auto [r, rev] : rels) {
                        // Without a relation, C may be B itself; skip forms
                        // that say nothing beyond the one-object rule.
                        if (r < 0 && (mc & ~mb) == 0) continue;
                        add(TopCandidate{2, mb, mc, r, rev, 0, {}, {}, {}});
                    }
                });
            });
        }
    }
    return out;
}

}  // namespace detail

inline LearntFramework build_learnt(const Hypothesis& h, const ExampleSet& ex, const std::string& target) {
    const std::string alpha = "alpha_1";
    LearntFramework lf;
    lf.target = target;
    lf.hypothesis = h;
    lf.assumption_names = {alpha};
    std::vector<Rule> rules{h.top_rule(target, alpha)};
    for (auto& r : h.exception_rules(alpha)) rules.push_back(std::move(r));
    for (auto& r : rules) {
        lf.framework.add_rule(r.head, r.body);
        lf.learned_rule_ids.push_back(lf.framework.rules.back().id);
    }
    for (const auto& f : background_facts(ex.background)) lf.framework.add_rule(f, {});
    lf.framework.add_assumption(h.assumption(alpha), h.contrary(alpha));
    lf.framework.validate();
    return lf;
}

/// Smallest hypothesis (top rule plus exceptions, counted in body literals)
/// under which every positive is a cautious consequence and no negative is.
/// Ties prefer fewer exception literals, then rule text order.
inline LearntFramework learn(const ExampleSet& examples, const std::string& target, const LearnerConfig& cfg = {}) {
    cfg.validate();
    if (examples.positives.empty())
        throw InsufficientExamples(target, 0, 1);
    examples.validate();
    for (const auto* list : {&examples.positives, &examples.negatives})
        for (const auto& e : *list)
            if (e.predicate != target) throw ValidationError("example " + e.to_string() + " is not about " + target);

    detail::Deadline deadline(cfg.timeout);
    auto ex = detail::compile_examples(examples);
    auto tops = detail::top_candidates(ex, cfg);
    if (tops.empty()) throw SearchFailure("no top rule derives every positive example");
    std::stable_sort(tops.begin(), tops.end(), [](const auto& a, const auto& b) {
        return std::tie(a.cost, a.text) < std::tie(b.cost, b.text);
    });

    LearnStats stats;
    stats.top_candidates = tops.size();
    std::vector<std::optional<detail::ExceptionSearch>> searches(tops.size());
    const std::size_t max_exception_cost = cfg.max_exception_rules * (cfg.max_exception_literals + 1);
    const std::size_t max_level = tops.back().cost + max_exception_cost;

    for (std::size_t level = tops.front().cost; level <= max_level; ++level) {
        std::optional<Hypothesis> best;
        for (std::size_t i = 0; i < tops.size() && tops[i].cost <= level; ++i) {
            const auto& t = tops[i];
            const std::size_t budget = level - t.cost;
            if (best && budget >= best->exception_cost()) continue;
            deadline.check_now();
            if (!searches[i]) searches[i].emplace(ex, t, cfg);
            auto sol = searches[i]->solve(budget, deadline, stats.search_nodes);
            if (!sol) continue;
            Hypothesis h;
            h.objects = t.objects;
            h.props_b = ex.names(t.mb);
            h.props_c = ex.names(t.mc);
            if (t.relation >= 0) {
                h.relation = ex.relations[static_cast<std::size_t>(t.relation)];
                h.relation_reversed = t.reversed;
            }
            for (auto m : *sol) h.exceptions.push_back(ex.names(m));
            best = std::move(h);
        }
        if (!best) continue;
        auto lf = build_learnt(*best, examples, target);
        if (!verify_solution(lf.framework, examples).pass())
            throw std::logic_error("compiled coverage disagrees with the semantics engine");
        stats.cost = best->cost();
        lf.stats = stats;
        return lf;
    }
    throw SearchFailure("no hypothesis within the configured bounds separates the examples");
}

/// Ordered binary frameworks: stage k separates order[k] from every later
/// class. Examples of a class are the positives of its set.
inline std::vector<LearntFramework> learn_cascade(const std::map<std::string, ExampleSet>& by_class,
                                                  const std::vector<std::string>& order,
                                                  const std::function<std::string(const std::string&)>& target_of,
                                                  const LearnerConfig& cfg = {}) {
    if (order.size() < 2) throw std::invalid_argument("a cascade needs at least two classes");
    for (const auto& c : order)
        if (!by_class.count(c)) throw std::invalid_argument("no examples for class " + c);
    std::vector<LearntFramework> out;
    for (std::size_t k = 0; k + 1 < order.size(); ++k) {
        const std::string target = target_of(order[k]);
        ExampleSet stage;
        auto add = [&](const ExampleSet& src, bool positive) {
            for (const auto& e : src.positives)
                (positive ? stage.positives : stage.negatives).push_back(Atom{target, e.args});
            for (const auto& r : src.background.rules) stage.background.add_rule(r.head, r.body);
        };
        add(by_class.at(order[k]), true);
        for (std::size_t j = k + 1; j < order.size(); ++j) add(by_class.at(order[j]), false);
        out.push_back(learn(stage, target, cfg));
    }
    return out;
}

/// Parses `aba_asp('file.aba', [pos, ...], [neg, ...]).` and returns the
/// file name with the example atoms.
struct AbaAspCommand {
    std::string file;
    std::vector<Atom> positives;
    std::vector<Atom> negatives;
};

inline AbaAspCommand parse_aba_asp(std::string_view text) {
    auto fail = [](const std::string& why) -> AbaAspCommand { throw ValidationError("bad aba_asp command: " + why); };
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (!s.empty() && s.back() == '.') s.pop_back();
    const std::string head = "aba_asp(";
    if (s.rfind(head, 0) != 0 || s.empty() || s.back() != ')') return fail("expected aba_asp(...)");
    s = s.substr(head.size(), s.size() - head.size() - 1);
    AbaAspCommand cmd;
    if (s.empty() || (s[0] != '\'' && s[0] != '"')) return fail("expected a quoted file name");
    auto close = s.find(s[0], 1);
    if (close == std::string::npos) return fail("unterminated file name");
    cmd.file = s.substr(1, close - 1);
    std::size_t pos = close + 1;
    auto list = [&](std::vector<Atom>& into) {
        if (pos >= s.size() || s[pos] != ',') fail("expected ','");
        ++pos;
        if (pos >= s.size() || s[pos] != '[') fail("expected '['");
        auto end = s.find(']', pos);
        if (end == std::string::npos) fail("unterminated list");
        std::string body = s.substr(pos + 1, end - pos - 1);
        pos = end + 1;
        // Split on commas at parenthesis depth 0.
        int depth = 0;
        std::string cur;
        for (char c : body) {
            if (c == '(') ++depth;
            if (c == ')') --depth;
            if (c == ',' && depth == 0) {
                into.push_back(parse_atom(cur));
                cur.clear();
            } else {
                cur += c;
            }
        }
        if (!cur.empty()) into.push_back(parse_atom(cur));
    };
    list(cmd.positives);
    list(cmd.negatives);
    if (pos != s.size()) return fail("trailing text");
    return cmd;
}

}  // namespace nal
