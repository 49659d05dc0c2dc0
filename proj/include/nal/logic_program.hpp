#pragma once

// Flat ABA -> normal logic program translation, and a brute-force
// Gelfond-Lifschitz stable model enumerator used as an independent oracle
// for the assumption-level solver.

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "aba.hpp"
#include "semantics.hpp"

namespace nal {

struct NormalRule {
    std::string id;
    Atom head;
    std::vector<Atom> positive;
    std::vector<Atom> negative;

    std::string to_string() const {
        std::string s = head.to_string();
        if (positive.empty() && negative.empty()) return s + ".";
        s += " :- ";
        bool first = true;
        for (const auto& p : positive) {
            s += (first ? "" : ", ") + p.to_string();
            first = false;
        }
        for (const auto& n : negative) {
            s += (first ? "not " : ", not ") + n.to_string();
            first = false;
        }
        return s + ".";
    }
};

struct LogicProgram {
    std::vector<NormalRule> rules;

    std::string to_text() const {
        std::string out;
        for (const auto& r : rules) out += r.to_string() + "\n";
        return out;
    }
};

/// Replaces every body occurrence of an assumption by negation as failure of
/// its contrary. Assumption and contrary declarations disappear.
inline LogicProgram to_logic_program(const AbaFramework& fw) {
    LogicProgram lp;
    for (const auto& r : fw.rules) {
        NormalRule nr{r.id, r.head, {}, {}};
        for (const auto& b : r.body) {
            auto idx = fw.assumption_index(b);
            if (!idx) {
                for (const auto& a : fw.assumptions)
                    if (unifiable(a.schema, b))
                        throw ValidationError("body atom " + b.to_string() + " of rule " + r.id +
                                              " is only partly an assumption");
                nr.positive.push_back(b);
                continue;
            }
            // Map schema variables to the body terms, which may be variables.
            const auto& schema = fw.assumptions[*idx].schema;
            std::map<std::string, Term> to_body;
            for (std::size_t k = 0; k < schema.args.size(); ++k)
                if (schema.args[k].is_variable()) to_body.emplace(schema.args[k].name, b.args[k]);
            Atom contrary = fw.assumptions[*idx].contrary;
            for (auto& t : contrary.args)
                if (t.is_variable()) t = to_body.at(t.name);
            nr.negative.push_back(std::move(contrary));
        }
        lp.rules.push_back(std::move(nr));
    }
    return lp;
}

/// All stable models of `lp` grounded over `constants`, each a sorted set of
/// atoms; models are sorted. Guesses the truth of every atom occurring under
/// `not`, and keeps a guess when the least model of the reduct reproduces it.
inline std::vector<std::vector<Atom>> brute_force_stable_models(const LogicProgram& lp,
                                                                const std::set<std::string>& constants,
                                                                std::size_t max_choice_atoms = 20) {
    struct GroundNormal {
        Atom head;
        std::vector<Atom> pos, neg;
    };
    std::vector<GroundNormal> ground_rules;
    std::vector<std::string> cs(constants.begin(), constants.end());
    for (const auto& r : lp.rules) {
        std::vector<std::string> vars;
        r.head.collect_variables(vars);
        for (const auto& a : r.positive) a.collect_variables(vars);
        for (const auto& a : r.negative) a.collect_variables(vars);
        if (!vars.empty() && cs.empty()) continue;
        std::vector<std::size_t> idx(vars.size(), 0);
        while (true) {
            Substitution s;
            for (std::size_t i = 0; i < vars.size(); ++i) s[vars[i]] = cs[idx[i]];
            GroundNormal g{substitute(r.head, s), {}, {}};
            for (const auto& a : r.positive) g.pos.push_back(substitute(a, s));
            for (const auto& a : r.negative) g.neg.push_back(substitute(a, s));
            ground_rules.push_back(std::move(g));
            std::size_t k = vars.size();
            while (k > 0 && ++idx[k - 1] == cs.size()) idx[--k] = 0;
            if (k == 0) break;
        }
    }

    std::set<Atom> negated_set;
    for (const auto& g : ground_rules) negated_set.insert(g.neg.begin(), g.neg.end());
    std::vector<Atom> negated(negated_set.begin(), negated_set.end());
    if (negated.size() > max_choice_atoms)
        throw ResourceError(std::to_string(negated.size()) + " negated atoms exceed the brute-force bound");

    std::vector<std::vector<Atom>> models;
    const std::uint64_t guesses = std::uint64_t{1} << negated.size();
    for (std::uint64_t mask = 0; mask < guesses; ++mask) {
        std::set<Atom> guess;
        for (std::size_t i = 0; i < negated.size(); ++i)
            if ((mask >> i) & 1u) guess.insert(negated[i]);
        // Least model of the reduct by naive iteration.
        std::set<Atom> model;
        bool grew = true;
        while (grew) {
            grew = false;
            for (const auto& g : ground_rules) {
                if (model.count(g.head)) continue;
                bool blocked = std::any_of(g.neg.begin(), g.neg.end(), [&](const Atom& a) { return guess.count(a) != 0; });
                if (blocked) continue;
                bool holds = std::all_of(g.pos.begin(), g.pos.end(), [&](const Atom& a) { return model.count(a) != 0; });
                if (holds) {
                    model.insert(g.head);
                    grew = true;
                }
            }
        }
        bool consistent = true;
        for (const auto& a : negated)
            if ((model.count(a) != 0) != (guess.count(a) != 0)) {
                consistent = false;
                break;
            }
        if (consistent) models.emplace_back(model.begin(), model.end());
    }
    std::sort(models.begin(), models.end());
    return models;
}

}  // namespace nal
