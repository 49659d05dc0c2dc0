#pragma once

// Reader and writer for the line-oriented `.aba` text format:
//
//   [name:] head :- b1, ..., bn.      rule
//   atom.                             fact
//   head :- X=c, Y=d.                 fact in equality form, normalized to a ground fact
//   assumption(alpha(X)).
//   contrary(alpha(X), c_alpha(X)).
//
// `%` starts a comment running to the end of the line.

#include <cctype>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "aba.hpp"

namespace nal {

namespace detail {

struct Token {
    enum class Kind { Ident, Var, LParen, RParen, Comma, Dot, Neck, Colon, Equals, End };
    Kind kind;
    std::string text;
    std::size_t line;
    std::size_t column;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        skip_space();
        Token t{Token::Kind::End, {}, line_, col_};
        if (pos_ >= src_.size()) return t;
        char c = src_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                advance();
            t.text = std::string(src_.substr(start, pos_ - start));
            t.kind = std::isupper(static_cast<unsigned char>(c)) || c == '_' ? Token::Kind::Var : Token::Kind::Ident;
            return t;
        }
        if (std::isdigit(static_cast<unsigned char>(c)))
            throw ParseError("constants must start with a lowercase letter", line_, col_);
        advance();
        switch (c) {
            case '(': t.kind = Token::Kind::LParen; break;
            case ')': t.kind = Token::Kind::RParen; break;
            case ',': t.kind = Token::Kind::Comma; break;
            case '.': t.kind = Token::Kind::Dot; break;
            case '=': t.kind = Token::Kind::Equals; break;
            case ':':
                if (pos_ < src_.size() && src_[pos_] == '-') {
                    advance();
                    t.kind = Token::Kind::Neck;
                } else {
                    t.kind = Token::Kind::Colon;
                }
                break;
            default:
                throw ParseError(std::string("unexpected character '") + c + "'", t.line, t.column);
        }
        t.text = std::string(1, c);
        return t;
    }

private:
    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_space() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '%') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;
};

// Body literal: either an atom or an equality Var=const.
struct Literal {
    bool is_equality = false;
    Atom atom;
    Term lhs, rhs;
};

class Parser {
public:
    explicit Parser(std::string_view src) : lex_(src) { tok_ = lex_.next(); }

    AbaFramework parse() {
        AbaFramework fw;
        struct PendingContrary {
            Atom assumption;
            Atom contrary;
            std::size_t line, column;
        };
        std::vector<std::pair<Atom, Token>> assumption_decls;
        std::vector<PendingContrary> contrary_decls;

        while (tok_.kind != Token::Kind::End) {
            Token start = tok_;
            std::string name;
            if (tok_.kind != Token::Kind::Ident)
                throw ParseError("expected a statement, found '" + tok_.text + "'", tok_.line, tok_.column);
            Atom head = parse_atom_or_named(name);

            if (name.empty() && head.predicate == "assumption" && head.arity() == 1 && pending_inner_.size() == 1) {
                expect(Token::Kind::Dot, "'.'");
                assumption_decls.emplace_back(pending_inner_[0], start);
                continue;
            }
            if (name.empty() && head.predicate == "contrary" && head.arity() == 2 && pending_inner_.size() == 2) {
                expect(Token::Kind::Dot, "'.'");
                contrary_decls.push_back({pending_inner_[0], pending_inner_[1], start.line, start.column});
                continue;
            }

            std::vector<Literal> body;
            if (tok_.kind == Token::Kind::Neck) {
                consume();
                body.push_back(parse_literal());
                while (tok_.kind == Token::Kind::Comma) {
                    consume();
                    body.push_back(parse_literal());
                }
            }
            expect(Token::Kind::Dot, "'.' at end of statement");
            fw.rules.push_back(normalize(std::move(name), std::move(head), std::move(body), start, fw.rules.size()));
        }

        // Pair assumption declarations with contrary declarations (equal up to variable renaming).
        std::vector<bool> used(contrary_decls.size(), false);
        for (const auto& [schema, where] : assumption_decls) {
            std::optional<std::size_t> found;
            for (std::size_t i = 0; i < contrary_decls.size(); ++i) {
                if (!variant(schema, contrary_decls[i].assumption)) continue;
                if (found)
                    throw ValidationError("duplicate contrary for assumption " + schema.to_string() + " (line " +
                                          std::to_string(contrary_decls[i].line) + ")");
                found = i;
            }
            if (!found) throw ValidationError("assumption " + schema.to_string() + " has no contrary");
            used[*found] = true;
            const auto& decl = contrary_decls[*found];
            Substitution rename;
            for (std::size_t k = 0; k < schema.args.size(); ++k)
                if (decl.assumption.args[k].is_variable()) rename[decl.assumption.args[k].name] = schema.args[k].name;
            Atom contrary{decl.contrary.predicate};
            for (const auto& t : decl.contrary.args) {
                auto it = t.is_variable() ? rename.find(t.name) : rename.end();
                contrary.args.push_back(it == rename.end() ? t : Term::variable(it->second));
            }
            fw.add_assumption(schema, std::move(contrary));
        }
        for (std::size_t i = 0; i < contrary_decls.size(); ++i)
            if (!used[i])
                throw ValidationError("contrary declared for undeclared assumption " +
                                      contrary_decls[i].assumption.to_string());
        fw.validate();
        return fw;
    }

private:
    using Kind = Token::Kind;

    void consume() { tok_ = lex_.next(); }

    void expect(Kind k, const char* what) {
        if (tok_.kind != k)
            throw ParseError(std::string("expected ") + what + ", found '" + (tok_.kind == Kind::End ? "<eof>" : tok_.text) + "'",
                             tok_.line, tok_.column);
        consume();
    }

    // Two atoms are variants when a bijective variable renaming makes them equal.
    static bool variant(const Atom& a, const Atom& b) {
        if (a.predicate != b.predicate || a.arity() != b.arity()) return false;
        std::map<std::string, std::string> fwd, bwd;
        for (std::size_t i = 0; i < a.args.size(); ++i) {
            const auto& x = a.args[i];
            const auto& y = b.args[i];
            if (x.kind != y.kind) return false;
            if (x.is_constant()) {
                if (x.name != y.name) return false;
                continue;
            }
            auto [f, fi] = fwd.emplace(x.name, y.name);
            auto [g, gi] = bwd.emplace(y.name, x.name);
            if (f->second != y.name || g->second != x.name) return false;
        }
        return true;
    }

    Term parse_term() {
        if (tok_.kind == Kind::Ident) {
            Term t = Term::constant(tok_.text);
            consume();
            return t;
        }
        if (tok_.kind == Kind::Var) {
            Term t = Term::variable(tok_.text);
            consume();
            return t;
        }
        throw ParseError("expected a term, found '" + tok_.text + "'", tok_.line, tok_.column);
    }

    Atom parse_atom() {
        if (tok_.kind != Kind::Ident)
            throw ParseError("expected a predicate name, found '" + tok_.text + "'", tok_.line, tok_.column);
        Atom a{tok_.text};
        consume();
        if (tok_.kind == Kind::LParen) {
            consume();
            a.args.push_back(parse_term());
            while (tok_.kind == Kind::Comma) {
                consume();
                a.args.push_back(parse_term());
            }
            expect(Kind::RParen, "')'");
        }
        return a;
    }

    // Parses `[name:] atom`. For `assumption(...)` / `contrary(...)` the
    // arguments are atoms, so those are parsed into pending_inner_.
    Atom parse_atom_or_named(std::string& name) {
        pending_inner_.clear();
        Token first = tok_;
        consume();
        if (tok_.kind == Kind::Colon) {
            consume();
            name = first.text;
            return parse_atom();
        }
        Atom a{first.text};
        if (tok_.kind != Kind::LParen) return a;
        consume();
        bool declaration = first.text == "assumption" || first.text == "contrary";
        if (declaration) {
            pending_inner_.push_back(parse_atom());
            while (tok_.kind == Kind::Comma) {
                consume();
                pending_inner_.push_back(parse_atom());
            }
            expect(Kind::RParen, "')'");
            for (const auto& inner : pending_inner_) a.args.push_back(Term::constant(inner.predicate));
            return a;
        }
        a.args.push_back(parse_term());
        while (tok_.kind == Kind::Comma) {
            consume();
            a.args.push_back(parse_term());
        }
        expect(Kind::RParen, "')'");
        return a;
    }

    Literal parse_literal() {
        Literal lit;
        if (tok_.kind == Kind::Var) {
            lit.is_equality = true;
            lit.lhs = parse_term();
            expect(Kind::Equals, "'='");
            lit.rhs = parse_term();
            return lit;
        }
        Token at = tok_;
        Atom a = parse_atom();
        if (tok_.kind == Kind::Equals) {
            if (!a.args.empty()) throw ParseError("left side of '=' must be a term", at.line, at.column);
            consume();
            lit.is_equality = true;
            lit.lhs = Term::constant(a.predicate);
            lit.rhs = parse_term();
            return lit;
        }
        lit.atom = std::move(a);
        return lit;
    }

    // Applies the equalities of a body as a substitution.
    static Rule normalize(std::string name, Atom head, std::vector<Literal> body, const Token& where,
                          std::size_t index) {
        Substitution eq;
        std::vector<Atom> atoms;
        for (auto& lit : body) {
            if (!lit.is_equality) {
                atoms.push_back(std::move(lit.atom));
                continue;
            }
            Term l = lit.lhs, r = lit.rhs;
            if (l.is_constant() && r.is_variable()) std::swap(l, r);
            if (l.is_constant()) {
                if (l.name != r.name)
                    throw ParseError("unsatisfiable equality " + l.name + "=" + r.name, where.line, where.column);
                continue;
            }
            if (r.is_variable())
                throw ParseError("equality between variables is not supported", where.line, where.column);
            auto [it, inserted] = eq.emplace(l.name, r.name);
            if (!inserted && it->second != r.name)
                throw ParseError("conflicting equalities for " + l.name, where.line, where.column);
        }
        Rule rule;
        rule.id = name.empty() ? auto_rule_id(index) : std::move(name);
        rule.head = substitute(head, eq);
        for (auto& a : atoms) rule.body.push_back(substitute(a, eq));
        if (!eq.empty() && rule.body.empty() && !rule.head.is_ground())
            throw ParseError("fact head has variables not bound by equalities", where.line, where.column);
        return rule;
    }

    Lexer lex_;
    Token tok_;
    std::vector<Atom> pending_inner_;
};

}  // namespace detail

/// Parses `.aba` text into a validated flat framework. Throws ParseError on
/// syntax errors and ValidationError on semantic ones.
inline AbaFramework parse_framework(std::string_view text) { return detail::Parser(text).parse(); }

/// Parses a single atom such as `s_1(img_7)`; surrounding quotes are stripped.
inline Atom parse_atom(std::string_view text) {
    while (!text.empty() && (text.front() == '"' || text.front() == '\'' || std::isspace(static_cast<unsigned char>(text.front()))))
        text.remove_prefix(1);
    while (!text.empty() && (text.back() == '"' || text.back() == '\'' || text.back() == '.' ||
                             std::isspace(static_cast<unsigned char>(text.back()))))
        text.remove_suffix(1);
    auto fw = parse_framework(std::string(text) + ".");
    if (fw.rules.size() != 1 || !fw.rules[0].body.empty())
        throw ParseError("expected a single atom", 1, 1);
    return fw.rules[0].head;
}

/// Header lines of the form `% @key value` carry metadata (target predicate,
/// class tag) alongside a model; the parser itself ignores them.
inline std::map<std::string, std::string> read_directives(std::string_view text) {
    std::map<std::string, std::string> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() : eol + 1;
        std::size_t at = line.find("% @");
        if (at != 0) continue;
        line.remove_prefix(3);
        std::size_t sp = line.find(' ');
        if (sp == std::string_view::npos) continue;
        std::string value(line.substr(sp + 1));
        while (!value.empty() && std::isspace(static_cast<unsigned char>(value.back()))) value.pop_back();
        out[std::string(line.substr(0, sp))] = value;
    }
    return out;
}

inline std::string serialize_framework(const AbaFramework& fw,
                                       const std::map<std::string, std::string>& directives = {}) {
    std::string out = "% flat ABA framework\n";
    for (const auto& [k, v] : directives) out += "% @" + k + " " + v + "\n";
    for (std::size_t i = 0; i < fw.rules.size(); ++i) {
        const auto& r = fw.rules[i];
        if (r.id != auto_rule_id(i)) out += r.id + ": ";
        out += r.to_string();
        out += '\n';
    }
    for (const auto& a : fw.assumptions) {
        out += "assumption(" + a.schema.to_string() + ").\n";
        out += "contrary(" + a.schema.to_string() + ", " + a.contrary.to_string() + ").\n";
    }
    return out;
}

}  // namespace nal
