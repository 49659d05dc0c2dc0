#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "aba.hpp"

namespace nal {

using AtomId = std::uint32_t;

/// Interns ground atoms to dense ids.
class AtomTable {
public:
    AtomId intern(const Atom& a) {
        auto [it, inserted] = index_.emplace(a, static_cast<AtomId>(atoms_.size()));
        if (inserted) atoms_.push_back(a);
        return it->second;
    }

    std::optional<AtomId> find(const Atom& a) const {
        auto it = index_.find(a);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    const Atom& operator[](AtomId id) const { return atoms_[id]; }
    std::size_t size() const noexcept { return atoms_.size(); }

private:
    std::vector<Atom> atoms_;
    std::unordered_map<Atom, AtomId, AtomHash> index_;
};

struct GroundRule {
    AtomId head;
    std::vector<AtomId> body;
    std::string schema_id;  // id of the rule this is an instance of
};

/// Variable-free instantiation of a framework over a fixed set of constants.
class GroundFramework {
public:
    AtomTable atoms;
    std::vector<GroundRule> rules;
    std::vector<AtomId> assumptions;  // sorted by textual form
    std::unordered_map<AtomId, AtomId> contrary_of;
    std::vector<std::string> constants;

    bool is_assumption(AtomId id) const { return contrary_of.count(id) != 0; }
    AtomId contrary(AtomId assumption) const { return contrary_of.at(assumption); }

    std::string text(AtomId id) const { return atoms[id].to_string(); }

    /// The ground framework as an ordinary (variable-free) AbaFramework; rule
    /// ids are the schema ids.
    AbaFramework to_framework() const {
        // Instances of a schema with several groundings get distinct ids.
        std::map<std::string, std::size_t> total, seen;
        for (const auto& r : rules) ++total[r.schema_id];
        AbaFramework fw;
        for (const auto& r : rules) {
            std::string id = r.schema_id;
            if (total[id] > 1) id += "_" + std::to_string(++seen[r.schema_id]);
            Rule rule{id, atoms[r.head], {}};
            for (auto b : r.body) rule.body.push_back(atoms[b]);
            fw.rules.push_back(std::move(rule));
        }
        for (auto a : assumptions) fw.add_assumption(atoms[a], atoms[contrary(a)]);
        return fw;
    }
};

namespace detail {

// Atom schema with variables resolved to slot indices for fast instantiation.
struct CompiledAtom {
    std::string predicate;
    std::vector<int> slot;            // -1 for constants
    std::vector<std::string> consts;  // constant names (used where slot == -1)

    CompiledAtom(const Atom& a, const std::vector<std::string>& vars) : predicate(a.predicate) {
        for (const auto& t : a.args) {
            if (t.is_variable()) {
                slot.push_back(static_cast<int>(std::find(vars.begin(), vars.end(), t.name) - vars.begin()));
                consts.emplace_back();
            } else {
                slot.push_back(-1);
                consts.push_back(t.name);
            }
        }
    }

    Atom instantiate(const std::vector<const std::string*>& binding) const {
        Atom out{predicate};
        out.args.reserve(slot.size());
        for (std::size_t i = 0; i < slot.size(); ++i)
            out.args.push_back(Term::constant(slot[i] < 0 ? consts[i] : *binding[static_cast<std::size_t>(slot[i])]));
        return out;
    }
};

// Calls fn(binding) for every tuple in constants^n, odometer order.
template <class Fn>
void for_each_tuple(const std::vector<std::string>& constants, std::size_t n, Fn&& fn) {
    std::vector<std::size_t> idx(n, 0);
    std::vector<const std::string*> binding(n, constants.empty() ? nullptr : &constants[0]);
    if (n > 0 && constants.empty()) return;
    while (true) {
        fn(binding);
        std::size_t k = n;
        while (k > 0) {
            --k;
            if (++idx[k] < constants.size()) {
                binding[k] = &constants[idx[k]];
                break;
            }
            idx[k] = 0;
            binding[k] = &constants[0];
            if (k == 0) return;
        }
        if (n == 0) return;
    }
}

}  // namespace detail

/// Instantiates every rule and assumption schema with all substitutions of
/// its variables by the Herbrand constants (constants of `fw` plus `extra`).
/// Instances whose bodies can never hold are kept; the solver prunes them.
inline GroundFramework ground(const AbaFramework& fw, const std::set<std::string>& extra_constants = {}) {
    std::set<std::string> cs = fw.constants();
    cs.insert(extra_constants.begin(), extra_constants.end());
    if (cs.empty() && fw.has_variables())
        throw GroundingError("cannot ground a framework with variables over an empty constant set");

    GroundFramework g;
    g.constants.assign(cs.begin(), cs.end());

    for (const auto& r : fw.rules) {
        auto vars = r.variables();
        detail::CompiledAtom head(r.head, vars);
        std::vector<detail::CompiledAtom> body;
        body.reserve(r.body.size());
        for (const auto& b : r.body) body.emplace_back(b, vars);
        detail::for_each_tuple(g.constants, vars.size(), [&](const std::vector<const std::string*>& bind) {
            GroundRule gr{g.atoms.intern(head.instantiate(bind)), {}, r.id};
            gr.body.reserve(body.size());
            for (const auto& b : body) gr.body.push_back(g.atoms.intern(b.instantiate(bind)));
            g.rules.push_back(std::move(gr));
        });
    }

    std::vector<std::pair<std::string, AtomId>> named;
    for (const auto& a : fw.assumptions) {
        std::vector<std::string> vars;
        a.schema.collect_variables(vars);
        detail::CompiledAtom schema(a.schema, vars);
        detail::CompiledAtom contrary(a.contrary, vars);
        detail::for_each_tuple(g.constants, vars.size(), [&](const std::vector<const std::string*>& bind) {
            AtomId id = g.atoms.intern(schema.instantiate(bind));
            AtomId c = g.atoms.intern(contrary.instantiate(bind));
            if (g.contrary_of.emplace(id, c).second) named.emplace_back(g.atoms[id].to_string(), id);
        });
    }
    std::sort(named.begin(), named.end());
    for (const auto& [_, id] : named) g.assumptions.push_back(id);
    return g;
}

}  // namespace nal
