#pragma once

// Explicit arguments and attacks. Extensions are computed at the assumption
// level (semantics.hpp); arguments are built on demand for explanations.

#include <algorithm>
#include <cctype>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "semantics.hpp"

namespace nal {

/// Orders "rho2" before "rho10".
inline bool natural_less(const std::string& a, const std::string& b) {
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (std::isdigit(static_cast<unsigned char>(a[i])) && std::isdigit(static_cast<unsigned char>(b[j]))) {
            std::size_t i2 = i, j2 = j;
            while (i2 < a.size() && std::isdigit(static_cast<unsigned char>(a[i2]))) ++i2;
            while (j2 < b.size() && std::isdigit(static_cast<unsigned char>(b[j2]))) ++j2;
            std::string_view x(a.data() + i, i2 - i), y(b.data() + j, j2 - j);
            while (x.size() > 1 && x.front() == '0') x.remove_prefix(1);
            while (y.size() > 1 && y.front() == '0') y.remove_prefix(1);
            if (x.size() != y.size()) return x.size() < y.size();
            if (x != y) return x < y;
            i = i2;
            j = j2;
            continue;
        }
        if (a[i] != b[j]) return a[i] < b[j];
        ++i;
        ++j;
    }
    return a.size() - i < b.size() - j;
}

struct NaturalLess {
    bool operator()(const std::string& a, const std::string& b) const { return natural_less(a, b); }
};

/// Derivation tree node. Leaves are either `true` (is_true) or assumptions
/// (empty rule_id, no children).
struct ArgumentNode {
    Atom label;
    bool is_true = false;
    std::string rule_id;
    std::vector<ArgumentNode> children;

    std::string to_string() const {
        if (is_true) return "true";
        if (rule_id.empty()) return label.to_string();
        std::string s = label.to_string() + " <-" + rule_id + " [";
        for (std::size_t i = 0; i < children.size(); ++i) {
            if (i) s += ", ";
            s += children[i].to_string();
        }
        return s + "]";
    }
};

struct Argument {
    Atom claim;
    std::set<Atom> support_assumptions;
    std::set<std::string, NaturalLess> support_rules;
    ArgumentNode tree;

    /// `{alpha(img_1)} |-{rho1,rho4} c_1(img_1)`
    std::string to_string() const {
        std::vector<std::string> as;
        for (const auto& a : support_assumptions) as.push_back(a.to_string());
        std::sort(as.begin(), as.end());
        std::string s = "{";
        for (std::size_t i = 0; i < as.size(); ++i) s += (i ? "," : "") + as[i];
        s += "} |-{";
        std::size_t i = 0;
        for (const auto& r : support_rules) s += (i++ ? "," : "") + r;
        return s + "} " + claim.to_string();
    }
};

struct Attack {
    std::size_t attacker;  // index into the argument list
    std::size_t target;
    Atom undercut_assumption;
};

namespace detail {

class ArgumentBuilder {
public:
    ArgumentBuilder(const GroundFramework& g, std::size_t limit) : g_(g), limit_(limit) {
        for (std::size_t r = 0; r < g.rules.size(); ++r) by_head_[g.rules[r].head].push_back(r);
        // Atoms outside the closure of all assumptions have no argument at all.
        derivable_ = ClosureEngine(g).closure(g.assumptions);
    }

    struct Partial {
        ArgumentNode tree;
        std::set<AtomId> assumptions;
        std::set<std::string, NaturalLess> rules;
    };

    std::vector<Partial> build(AtomId atom, std::vector<AtomId>& path) {
        std::vector<Partial> out;
        if (!derivable_[atom]) return out;
        if (g_.is_assumption(atom)) {
            out.push_back({ArgumentNode{g_.atoms[atom], false, {}, {}}, {atom}, {}});
            return out;
        }
        if (std::find(path.begin(), path.end(), atom) != path.end()) return out;
        auto it = by_head_.find(atom);
        if (it == by_head_.end()) return out;
        path.push_back(atom);
        for (auto r : it->second) {
            const auto& rule = g_.rules[r];
            if (rule.body.empty()) {
                out.push_back({ArgumentNode{g_.atoms[atom], false, rule.schema_id, {ArgumentNode{{}, true, {}, {}}}},
                               {},
                               {rule.schema_id}});
                if (out.size() >= limit_) break;
                continue;
            }
            std::vector<std::vector<Partial>> options;
            bool viable = true;
            for (auto b : rule.body) {
                options.push_back(build(b, path));
                if (options.back().empty()) {
                    viable = false;
                    break;
                }
            }
            if (!viable) continue;
            // Cartesian product of child arguments, capped at the limit.
            std::vector<std::size_t> pick(options.size(), 0);
            while (out.size() < limit_) {
                Partial p{ArgumentNode{g_.atoms[atom], false, rule.schema_id, {}}, {}, {rule.schema_id}};
                for (std::size_t k = 0; k < options.size(); ++k) {
                    const auto& child = options[k][pick[k]];
                    p.tree.children.push_back(child.tree);
                    p.assumptions.insert(child.assumptions.begin(), child.assumptions.end());
                    p.rules.insert(child.rules.begin(), child.rules.end());
                }
                out.push_back(std::move(p));
                bool exhausted = true;
                for (std::size_t k = options.size(); k-- > 0;) {
                    if (++pick[k] < options[k].size()) {
                        exhausted = false;
                        break;
                    }
                    pick[k] = 0;
                }
                if (exhausted) break;
            }
            if (out.size() >= limit_) break;
        }
        path.pop_back();
        return out;
    }

private:
    const GroundFramework& g_;
    std::size_t limit_;
    std::unordered_map<AtomId, std::vector<std::size_t>> by_head_;
    std::vector<char> derivable_;
};

}  // namespace detail

/// Arguments for `claim` by backward chaining; a branch never revisits an
/// atom, so every returned tree is finite. At most `limit` are returned.
inline std::vector<Argument> construct_arguments(const GroundFramework& g, const Atom& claim, std::size_t limit = 16) {
    if (limit == 0) throw std::invalid_argument("argument limit must be at least 1");
    std::vector<Argument> out;
    auto id = g.atoms.find(claim);
    if (!id) return out;
    detail::ArgumentBuilder builder(g, limit);
    std::vector<AtomId> path;
    std::set<std::string> seen;
    for (auto& p : builder.build(*id, path)) {
        Argument a{claim, {}, std::move(p.rules), std::move(p.tree)};
        for (auto x : p.assumptions) a.support_assumptions.insert(g.atoms[x]);
        if (seen.insert(a.tree.to_string()).second) out.push_back(std::move(a));
    }
    return out;
}

/// All attacks among `args`: A attacks B on assumption a when a supports B
/// and A's claim is the contrary of a.
inline std::vector<Attack> compute_attacks(const std::vector<Argument>& args, const GroundFramework& g) {
    std::vector<Attack> out;
    for (std::size_t j = 0; j < args.size(); ++j) {
        for (const auto& a : args[j].support_assumptions) {
            auto id = g.atoms.find(a);
            if (!id || !g.is_assumption(*id)) continue;
            const Atom& contrary = g.atoms[g.contrary(*id)];
            for (std::size_t i = 0; i < args.size(); ++i)
                if (args[i].claim == contrary) out.push_back({i, j, a});
        }
    }
    std::sort(out.begin(), out.end(), [](const Attack& x, const Attack& y) {
        return std::tie(x.attacker, x.target) < std::tie(y.attacker, y.target);
    });
    return out;
}

}  // namespace nal
