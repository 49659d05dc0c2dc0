#pragma once

#include <random>
#include <string>

#include "nal/aba.hpp"

namespace nal::fixtures {

// The running example: images img_1 and img_2 contain circles, img_2 also a
// square, and c_1 holds for images with a circle unless they contain a square.
inline const char* const kExample1 = R"(% running example
circle(A) :- A=img_1.
circle(A) :- A= img_2.
square(A) :- A= img_2.
c_1(A) :- circle(A), alpha(A).
c_alpha(A) :- square(A).
assumption(alpha(A)).
contrary(alpha(A), c_alpha(A)).
)";

inline const char* const kLearnedS1 = R"(% Learnt Rules
s_1(A) :- in(A,B), square(B), alpha_2(B,A).
c_alpha_2(A,B) :- image(B), red(A).
c_alpha_2(A,B) :- image(B), green(A).
assumption(alpha_2(A,B)).
contrary(alpha_2(A,B), c_alpha_2(A,B)).
)";

/// Small random flat frameworks: unary/propositional predicates over up to
/// three constants, at most 12 ground assumptions. Assumption predicates
/// never head a rule, so the result is always flat.
inline AbaFramework random_framework(std::mt19937_64& rng) {
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    const int n_consts = pick(1, 3);
    const int n_plain = pick(2, 4);
    const int n_asm = pick(1, 4);
    std::vector<std::string> consts;
    for (int i = 0; i < n_consts; ++i) consts.push_back("k" + std::to_string(i));
    std::vector<int> plain_arity(n_plain), asm_arity(n_asm);
    for (auto& a : plain_arity) a = pick(0, 1);
    for (auto& a : asm_arity) a = pick(0, 1);

    auto make = [&](const std::string& pred, int arity, bool allow_var) {
        Atom a{pred};
        if (arity == 1) {
            if (allow_var && pick(0, 3) != 0) a.args.push_back(Term::variable(pick(0, 1) ? "X" : "Y"));
            else a.args.push_back(Term::constant(consts[static_cast<std::size_t>(pick(0, n_consts - 1))]));
        }
        return a;
    };

    AbaFramework fw;
    const int n_rules = pick(2, 7);
    for (int r = 0; r < n_rules; ++r) {
        int h = pick(0, n_plain - 1);
        Atom head = make("p" + std::to_string(h), plain_arity[static_cast<std::size_t>(h)], true);
        std::vector<Atom> body;
        int len = pick(0, 3);
        for (int b = 0; b < len; ++b) {
            if (pick(0, 1)) {
                int k = pick(0, n_asm - 1);
                body.push_back(make("a" + std::to_string(k), asm_arity[static_cast<std::size_t>(k)], true));
            } else {
                int k = pick(0, n_plain - 1);
                body.push_back(make("p" + std::to_string(k), plain_arity[static_cast<std::size_t>(k)], true));
            }
        }
        fw.add_rule(std::move(head), std::move(body));
    }
    for (int k = 0; k < n_asm; ++k) {
        Atom schema{"a" + std::to_string(k)};
        if (asm_arity[static_cast<std::size_t>(k)] == 1) schema.args.push_back(Term::variable("X"));
        // Contrary: a plain predicate, using the assumption's variable when arities allow.
        int c = pick(0, n_plain - 1);
        Atom contrary{"p" + std::to_string(c)};
        if (plain_arity[static_cast<std::size_t>(c)] == 1) {
            if (schema.arity() == 1 && pick(0, 3) != 0) contrary.args.push_back(Term::variable("X"));
            else contrary.args.push_back(Term::constant(consts[static_cast<std::size_t>(pick(0, n_consts - 1))]));
        }
        fw.add_assumption(std::move(schema), std::move(contrary));
    }
    // Occasionally close an attack cycle between two assumptions.
    if (n_asm >= 2 && pick(0, 2) == 0) {
        fw.add_rule(fw.assumptions[0].contrary, {fw.assumptions[1].schema});
        fw.add_rule(fw.assumptions[1].contrary, {fw.assumptions[0].schema});
    }
    // Make sure every constant is mentioned so the Herbrand universe is fixed.
    for (const auto& c : consts) fw.add_rule(Atom{"dom", {Term::constant(c)}});
    return fw;
}

}  // namespace nal::fixtures
