#pragma once

// Data model for flat assumption-based argumentation frameworks.

#include <algorithm>
#include <cctype>
#include <compare>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace nal {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, std::size_t line, std::size_t column)
        : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
          line_(line), column_(column) {}
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class GroundingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Terms and atoms
// ---------------------------------------------------------------------------

struct Term {
    enum class Kind { Constant, Variable };

    Kind kind = Kind::Constant;
    std::string name;

    static Term constant(std::string n) { return {Kind::Constant, std::move(n)}; }
    static Term variable(std::string n) { return {Kind::Variable, std::move(n)}; }

    bool is_variable() const noexcept { return kind == Kind::Variable; }
    bool is_constant() const noexcept { return kind == Kind::Constant; }

    friend bool operator==(const Term&, const Term&) = default;
    friend auto operator<=>(const Term&, const Term&) = default;
};

inline bool is_constant_name(std::string_view s) {
    if (s.empty() || !(s[0] >= 'a' && s[0] <= 'z')) return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    return true;
}

inline bool is_variable_name(std::string_view s) {
    if (s.empty() || !(s[0] >= 'A' && s[0] <= 'Z')) return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    return true;
}

struct Atom {
    std::string predicate;
    std::vector<Term> args;

    Atom() = default;
    Atom(std::string pred, std::vector<Term> a = {}) : predicate(std::move(pred)), args(std::move(a)) {}

    std::size_t arity() const noexcept { return args.size(); }

    bool is_ground() const noexcept {
        for (const auto& t : args)
            if (t.is_variable()) return false;
        return true;
    }

    // Distinct variables in order of first occurrence.
    void collect_variables(std::vector<std::string>& out) const {
        for (const auto& t : args) {
            if (!t.is_variable()) continue;
            bool seen = false;
            for (const auto& v : out)
                if (v == t.name) { seen = true; break; }
            if (!seen) out.push_back(t.name);
        }
    }

    std::string to_string() const {
        if (args.empty()) return predicate;
        std::string s = predicate;
        s += '(';
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (i) s += ',';
            s += args[i].name;
        }
        s += ')';
        return s;
    }

    friend bool operator==(const Atom&, const Atom&) = default;
    friend auto operator<=>(const Atom&, const Atom&) = default;
};

// ground_atom("in", {"img_1", "obj_1_0"}) == in(img_1,obj_1_0)
inline Atom ground_atom(std::string pred, std::initializer_list<std::string> consts) {
    Atom a{std::move(pred)};
    for (const auto& c : consts) a.args.push_back(Term::constant(c));
    return a;
}

struct AtomHash {
    std::size_t operator()(const Atom& a) const noexcept {
        std::size_t h = std::hash<std::string>{}(a.predicate);
        for (const auto& t : a.args)
            h = h * 1000003u ^ (std::hash<std::string>{}(t.name) + (t.is_variable() ? 0x9e3779b9u : 0u));
        return h;
    }
};

using Substitution = std::map<std::string, std::string>;

inline Atom substitute(const Atom& a, const Substitution& s) {
    Atom out{a.predicate};
    out.args.reserve(a.args.size());
    for (const auto& t : a.args) {
        if (t.is_variable()) {
            auto it = s.find(t.name);
            out.args.push_back(it == s.end() ? t : Term::constant(it->second));
        } else {
            out.args.push_back(t);
        }
    }
    return out;
}

// Extends `s` so that pattern matches the ground atom; false on mismatch.
inline bool match(const Atom& pattern, const Atom& ground, Substitution& s) {
    if (pattern.predicate != ground.predicate || pattern.args.size() != ground.args.size()) return false;
    for (std::size_t i = 0; i < pattern.args.size(); ++i) {
        const auto& p = pattern.args[i];
        const auto& g = ground.args[i];
        if (p.is_constant()) {
            if (p.name != g.name) return false;
            continue;
        }
        auto [it, inserted] = s.emplace(p.name, g.name);
        if (!inserted && it->second != g.name) return false;
    }
    return true;
}

// Unifiability of two function-free atoms, variables of each side renamed apart.
inline bool unifiable(const Atom& lhs, const Atom& rhs) {
    if (lhs.predicate != rhs.predicate || lhs.args.size() != rhs.args.size()) return false;
    // Union-find over "l:X", "r:X" and constants "c:name".
    std::map<std::string, std::string> parent;
    std::function<std::string(const std::string&)> find = [&](const std::string& x) -> std::string {
        auto it = parent.find(x);
        if (it == parent.end() || it->second == x) return x;
        return it->second = find(it->second);
    };
    auto key = [](const Term& t, char side) {
        return t.is_variable() ? std::string{side} + ":" + t.name : "c:" + t.name;
    };
    for (std::size_t i = 0; i < lhs.args.size(); ++i) {
        std::string a = find(key(lhs.args[i], 'l'));
        std::string b = find(key(rhs.args[i], 'r'));
        if (a == b) continue;
        bool a_const = a.starts_with("c:");
        bool b_const = b.starts_with("c:");
        if (a_const && b_const) return false;
        if (a_const) parent[b] = a;
        else parent[a] = b;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Rules and frameworks
// ---------------------------------------------------------------------------

struct Rule {
    std::string id;
    Atom head;
    std::vector<Atom> body;

    bool is_fact() const noexcept { return body.empty(); }

    std::vector<std::string> variables() const {
        std::vector<std::string> vars;
        head.collect_variables(vars);
        for (const auto& b : body) b.collect_variables(vars);
        return vars;
    }

    bool is_ground() const noexcept {
        if (!head.is_ground()) return false;
        for (const auto& b : body)
            if (!b.is_ground()) return false;
        return true;
    }

    std::string to_string() const {
        std::string s = head.to_string();
        if (!body.empty()) {
            s += " :- ";
            for (std::size_t i = 0; i < body.size(); ++i) {
                if (i) s += ", ";
                s += body[i].to_string();
            }
        }
        s += '.';
        return s;
    }

    friend bool operator==(const Rule&, const Rule&) = default;
};

/// An assumption schema together with its contrary. The contrary's variables
/// are a subset of the assumption's.
struct Assumption {
    Atom schema;
    Atom contrary;

    friend bool operator==(const Assumption&, const Assumption&) = default;
};

inline std::string auto_rule_id(std::size_t index) { return "rho" + std::to_string(index + 1); }

class AbaFramework {
public:
    std::vector<Rule> rules;
    std::vector<Assumption> assumptions;

    /// Index of the assumption schema the atom is an instance of, if any.
    std::optional<std::size_t> assumption_index(const Atom& atom) const {
        for (std::size_t i = 0; i < assumptions.size(); ++i) {
            Substitution s;
            if (match(assumptions[i].schema, atom, s)) return i;
        }
        return std::nullopt;
    }

    std::set<std::string> constants() const {
        std::set<std::string> out;
        auto add = [&](const Atom& a) {
            for (const auto& t : a.args)
                if (t.is_constant()) out.insert(t.name);
        };
        for (const auto& r : rules) {
            add(r.head);
            for (const auto& b : r.body) add(b);
        }
        for (const auto& a : assumptions) {
            add(a.schema);
            add(a.contrary);
        }
        return out;
    }

    bool has_variables() const {
        for (const auto& r : rules)
            if (!r.is_ground()) return true;
        for (const auto& a : assumptions)
            if (!a.schema.is_ground() || !a.contrary.is_ground()) return true;
        return false;
    }

    /// Throws ValidationError on arity clash, non-flatness, or contrary
    /// problems. Called by the parser; call again after building by hand.
    void validate() const;

    /// Appends a rule, assigning the next positional id when `id` is empty.
    Rule& add_rule(Atom head, std::vector<Atom> body = {}, std::string id = {}) {
        if (id.empty()) id = auto_rule_id(rules.size());
        rules.push_back(Rule{std::move(id), std::move(head), std::move(body)});
        return rules.back();
    }

    void add_assumption(Atom schema, Atom contrary) {
        assumptions.push_back(Assumption{std::move(schema), std::move(contrary)});
    }

    friend bool operator==(const AbaFramework&, const AbaFramework&) = default;
};

inline void AbaFramework::validate() const {
    std::map<std::string, std::size_t> arity;
    auto check_arity = [&](const Atom& a) {
        auto [it, inserted] = arity.emplace(a.predicate, a.arity());
        if (!inserted && it->second != a.arity())
            throw ValidationError("arity clash for predicate '" + a.predicate + "': " +
                                  std::to_string(it->second) + " vs " + std::to_string(a.arity()));
    };
    std::set<std::string> ids;
    for (const auto& r : rules) {
        if (!ids.insert(r.id).second) throw ValidationError("duplicate rule id '" + r.id + "'");
        check_arity(r.head);
        for (const auto& b : r.body) check_arity(b);
    }
    for (const auto& a : assumptions) {
        check_arity(a.schema);
        check_arity(a.contrary);
    }

    for (const auto& a : assumptions) {
        for (const auto& r : rules)
            if (unifiable(a.schema, r.head))
                throw ValidationError("framework is not flat: assumption " + a.schema.to_string() +
                                      " unifies with the head of rule " + r.id);
        std::vector<std::string> avars, cvars;
        a.schema.collect_variables(avars);
        a.contrary.collect_variables(cvars);
        for (const auto& v : cvars)
            if (std::find(avars.begin(), avars.end(), v) == avars.end())
                throw ValidationError("contrary " + a.contrary.to_string() + " uses variable " + v +
                                      " not present in assumption " + a.schema.to_string());
        for (const auto& b : assumptions)
            if (unifiable(a.contrary, b.schema))
                throw ValidationError("contrary " + a.contrary.to_string() + " of " + a.schema.to_string() +
                                      " is itself an assumption");
    }
    for (std::size_t i = 0; i < assumptions.size(); ++i)
        for (std::size_t j = i + 1; j < assumptions.size(); ++j)
            if (unifiable(assumptions[i].schema, assumptions[j].schema))
                throw ValidationError("overlapping assumption schemas " + assumptions[i].schema.to_string() +
                                      " and " + assumptions[j].schema.to_string());
}

}  // namespace nal
