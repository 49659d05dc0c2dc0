#pragma once

// Closures, stable extensions and cautious consequence for ground flat ABA
// frameworks. Stable extensions are characterised at the assumption level:
// a set of ground assumptions D is stable iff its closure contains the
// contrary of no member of D and the contrary of every assumption outside D.

#include <algorithm>
#include <cstdint>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ground.hpp"

namespace nal {

class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The framework admits no stable extension, so cautious consequence is
/// undefined.
class NoStableExtension : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Extension {
    std::vector<AtomId> assumptions;  // ordered as in GroundFramework::assumptions
    std::vector<char> member;         // closure membership indexed by AtomId

    bool contains(AtomId id) const { return id < member.size() && member[id]; }

    std::size_t closure_size() const {
        return static_cast<std::size_t>(std::count(member.begin(), member.end(), char{1}));
    }

    std::vector<AtomId> closure() const {
        std::vector<AtomId> out;
        for (std::size_t i = 0; i < member.size(); ++i)
            if (member[i]) out.push_back(static_cast<AtomId>(i));
        return out;
    }
};

/// Forward chaining over the ground rules with a set of assumptions taken as
/// facts. Linear in the size of the ground framework.
class ClosureEngine {
public:
    explicit ClosureEngine(const GroundFramework& g) : g_(&g), watchers_(g.atoms.size()) {
        for (std::size_t r = 0; r < g.rules.size(); ++r) {
            if (g.rules[r].body.empty()) facts_.push_back(r);
            for (auto b : g.rules[r].body) watchers_[b].push_back(r);
        }
    }

    std::vector<char> closure(std::span<const AtomId> delta) const {
        const auto& rules = g_->rules;
        std::vector<char> in(g_->atoms.size(), 0);
        std::vector<std::size_t> missing(rules.size());
        for (std::size_t r = 0; r < rules.size(); ++r) missing[r] = rules[r].body.size();
        std::vector<AtomId> queue;
        queue.reserve(g_->atoms.size());
        auto derive = [&](AtomId a) {
            if (!in[a]) {
                in[a] = 1;
                queue.push_back(a);
            }
        };
        for (auto a : delta) derive(a);
        for (auto r : facts_) derive(rules[r].head);
        for (std::size_t qi = 0; qi < queue.size(); ++qi) {
            for (auto r : watchers_[queue[qi]])
                if (--missing[r] == 0) derive(rules[r].head);
        }
        return in;
    }

private:
    const GroundFramework* g_;
    std::vector<std::vector<std::size_t>> watchers_;
    std::vector<std::size_t> facts_;
};

/// All atoms derivable from the rules with `delta` as assumptions (includes
/// delta itself), sorted.
inline std::vector<Atom> derive_closure(const GroundFramework& g, const std::vector<Atom>& delta) {
    std::vector<AtomId> ids;
    for (const auto& a : delta) {
        auto id = g.atoms.find(a);
        if (!id || !g.is_assumption(*id))
            throw std::invalid_argument(a.to_string() + " is not a ground assumption of the framework");
        ids.push_back(*id);
    }
    auto member = ClosureEngine(g).closure(ids);
    std::vector<Atom> out;
    for (std::size_t i = 0; i < member.size(); ++i)
        if (member[i]) out.push_back(g.atoms[static_cast<AtomId>(i)]);
    std::sort(out.begin(), out.end(), [](const Atom& x, const Atom& y) { return x.to_string() < y.to_string(); });
    return out;
}

struct SolverOptions {
    /// Maximum number of assumptions left undecided after propagation; the
    /// enumeration visits 2^n subsets of them.
    std::size_t enumeration_bound = 24;
};

/// Checks both stability conditions for the given assumption set.
inline bool is_stable(const GroundFramework& g, std::span<const AtomId> delta, const std::vector<char>& member) {
    std::vector<char> chosen(g.atoms.size(), 0);
    for (auto a : delta) chosen[a] = 1;
    for (auto a : g.assumptions) {
        bool attacked = member[g.contrary(a)] != 0;
        if (chosen[a] == attacked) return false;
    }
    return true;
}

/// Every stable extension, ordered lexicographically by assumption set.
///
/// Assumptions are first split by an alternating fixpoint: an assumption whose
/// contrary follows from the forced-in assumptions is out of every stable
/// extension; one whose contrary does not follow even from all non-excluded
/// assumptions is in every stable extension. Only the remainder is enumerated.
inline std::vector<Extension> stable_extensions(const GroundFramework& g, const SolverOptions& opts = {}) {
    ClosureEngine engine(g);
    const std::size_t n = g.assumptions.size();
    enum class State : char { Open, In, Out };
    std::vector<State> state(n, State::Open);

    auto collect = [&](auto pred) {
        std::vector<AtomId> out;
        for (std::size_t i = 0; i < n; ++i)
            if (pred(state[i])) out.push_back(g.assumptions[i]);
        return out;
    };

    bool changed = true;
    while (changed) {
        changed = false;
        auto lower = engine.closure(collect([](State s) { return s == State::In; }));
        auto upper = engine.closure(collect([](State s) { return s != State::Out; }));
        for (std::size_t i = 0; i < n; ++i) {
            AtomId c = g.contrary(g.assumptions[i]);
            if (lower[c]) {
                if (state[i] == State::In) return {};  // a forced assumption is defeated
                if (state[i] == State::Open) {
                    state[i] = State::Out;
                    changed = true;
                }
            } else if (!upper[c] && state[i] == State::Open) {
                state[i] = State::In;
                changed = true;
            }
        }
    }

    std::vector<std::size_t> open;
    for (std::size_t i = 0; i < n; ++i)
        if (state[i] == State::Open) open.push_back(i);
    if (open.size() > opts.enumeration_bound)
        throw ResourceError(std::to_string(open.size()) + " undecided assumptions exceed the enumeration bound of " +
                            std::to_string(opts.enumeration_bound));

    std::vector<std::pair<std::vector<std::size_t>, Extension>> found;
    const std::uint64_t subsets = std::uint64_t{1} << open.size();
    for (std::uint64_t mask = 0; mask < subsets; ++mask) {
        std::vector<std::size_t> chosen;
        for (std::size_t i = 0, k = 0; i < n; ++i) {
            if (state[i] == State::In) chosen.push_back(i);
            else if (state[i] == State::Open && ((mask >> k++) & 1u)) chosen.push_back(i);
        }
        std::vector<AtomId> delta;
        for (auto i : chosen) delta.push_back(g.assumptions[i]);
        auto member = engine.closure(delta);
        if (!is_stable(g, delta, member)) continue;
        found.push_back({std::move(chosen), Extension{std::move(delta), std::move(member)}});
    }
    std::sort(found.begin(), found.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    std::vector<Extension> out;
    out.reserve(found.size());
    for (auto& f : found) out.push_back(std::move(f.second));
    return out;
}

/// True iff the atom belongs to the closure of every stable extension.
inline bool is_cautious(const GroundFramework& g, const std::vector<Extension>& extensions, const Atom& atom) {
    if (extensions.empty()) throw NoStableExtension("framework has no stable extension");
    auto id = g.atoms.find(atom);
    if (!id) return false;
    return std::all_of(extensions.begin(), extensions.end(), [&](const Extension& e) { return e.contains(*id); });
}

inline bool is_cautious(const GroundFramework& g, const Atom& atom, const SolverOptions& opts = {}) {
    return is_cautious(g, stable_extensions(g, opts), atom);
}

/// Ground assumptions that occur in some rule instance whose other body atoms
/// are derivable; the rest can never support an argument.
inline std::vector<AtomId> relevant_assumptions(const GroundFramework& g) {
    auto upper = ClosureEngine(g).closure(g.assumptions);
    std::set<AtomId> out;
    for (const auto& r : g.rules) {
        bool viable = std::all_of(r.body.begin(), r.body.end(), [&](AtomId b) { return upper[b] != 0; });
        if (!viable) continue;
        for (auto b : r.body)
            if (g.is_assumption(b)) out.insert(b);
    }
    std::vector<AtomId> v;
    for (auto a : g.assumptions)
        if (out.count(a)) v.push_back(a);
    return v;
}

}  // namespace nal
