#pragma once

// Abstract syntax for the source calculus (lambda + let + integers +
// effect primitives) and the monadic target calculus (unit/bind/malias),
// with a recursive-descent parser for source programs and precedence-aware
// pretty-printers for both calculi.
//
// Concrete source grammar:
//
//   program  ::= { "def" name ":" type "=" expr } "main" "=" expr
//   expr     ::= "\" name [":" type] "." expr
//              | "let" name "=" expr "in" expr
//              | "if" expr "then" expr "else" expr
//              | cmp
//   cmp      ::= add { ("<=" | ">") add }
//   add      ::= mul { ("+" | "-") mul }
//   mul      ::= app { "*" app }
//   app      ::= atom { atom }
//   atom     ::= integer | name | "(" expr ")"
//              | "read" string | "tick" string
//   type     ::= ("int" | "bool" | "(" type ")") [ "->" type ]
//
// Comments run from "--" to end of line.

#include <cctype>
#include <cstdint>
#include <functional>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

#include "malias/util.hpp"

namespace malias {

// ---------------------------------------------------------------------------
// Errors

struct ParseError : std::runtime_error {
    int line;
    int column;
    ParseError(int line_, int col_, const std::string& what_)
        : std::runtime_error("parse error at " + std::to_string(line_) + ":" +
                             std::to_string(col_) + ": " + what_),
          line(line_),
          column(col_) {}
};

// ---------------------------------------------------------------------------
// Types

struct SourceType;
using SourceTypePtr = std::shared_ptr<const SourceType>;

struct SourceType {
    struct Base {
        std::string name;  // "int" | "bool"
    };
    struct Arrow {
        SourceTypePtr from;
        SourceTypePtr to;
    };
    std::variant<Base, Arrow> node;
};

inline SourceTypePtr ty_base(std::string name) {
    return std::make_shared<SourceType>(SourceType{SourceType::Base{std::move(name)}});
}
inline SourceTypePtr ty_int() {
    static const SourceTypePtr t = ty_base("int");
    return t;
}
inline SourceTypePtr ty_bool() {
    static const SourceTypePtr t = ty_base("bool");
    return t;
}
inline SourceTypePtr ty_arrow(SourceTypePtr from, SourceTypePtr to) {
    return std::make_shared<SourceType>(SourceType{SourceType::Arrow{std::move(from), std::move(to)}});
}

inline bool type_equal(const SourceTypePtr& a, const SourceTypePtr& b) {
    if (a == b) return true;
    return std::visit(
        overloaded{
            [&](const SourceType::Base& x) {
                auto* y = std::get_if<SourceType::Base>(&b->node);
                return y != nullptr && x.name == y->name;
            },
            [&](const SourceType::Arrow& x) {
                auto* y = std::get_if<SourceType::Arrow>(&b->node);
                return y != nullptr && type_equal(x.from, y->from) && type_equal(x.to, y->to);
            }},
        a->node);
}

struct TargetType;
using TargetTypePtr = std::shared_ptr<const TargetType>;

// Target types add the computation scheme M t, which may nest.
struct TargetType {
    struct Base {
        std::string name;
    };
    struct Arrow {
        TargetTypePtr from;
        TargetTypePtr to;
    };
    struct M {
        TargetTypePtr inner;
    };
    std::variant<Base, Arrow, M> node;
};

inline TargetTypePtr tty_base(std::string name) {
    return std::make_shared<TargetType>(TargetType{TargetType::Base{std::move(name)}});
}
inline TargetTypePtr tty_int() {
    static const TargetTypePtr t = tty_base("int");
    return t;
}
inline TargetTypePtr tty_bool() {
    static const TargetTypePtr t = tty_base("bool");
    return t;
}
inline TargetTypePtr tty_arrow(TargetTypePtr from, TargetTypePtr to) {
    return std::make_shared<TargetType>(TargetType{TargetType::Arrow{std::move(from), std::move(to)}});
}
inline TargetTypePtr tty_m(TargetTypePtr inner) {
    return std::make_shared<TargetType>(TargetType{TargetType::M{std::move(inner)}});
}

inline bool type_equal(const TargetTypePtr& a, const TargetTypePtr& b) {
    if (a == b) return true;
    return std::visit(
        overloaded{
            [&](const TargetType::Base& x) {
                auto* y = std::get_if<TargetType::Base>(&b->node);
                return y != nullptr && x.name == y->name;
            },
            [&](const TargetType::Arrow& x) {
                auto* y = std::get_if<TargetType::Arrow>(&b->node);
                return y != nullptr && type_equal(x.from, y->from) && type_equal(x.to, y->to);
            },
            [&](const TargetType::M& x) {
                auto* y = std::get_if<TargetType::M>(&b->node);
                return y != nullptr && type_equal(x.inner, y->inner);
            }},
        a->node);
}

// ---------------------------------------------------------------------------
// Expressions

enum class PrimOp { Add, Sub, Mul, Leq, Gt };

inline const char* prim_symbol(PrimOp op) {
    switch (op) {
        case PrimOp::Add: return "+";
        case PrimOp::Sub: return "-";
        case PrimOp::Mul: return "*";
        case PrimOp::Leq: return "<=";
        case PrimOp::Gt: return ">";
    }
    return "?";
}

// read "key" reads an integer from the run configuration; tick "label"
// logs a labelled event and yields 0.
struct EffectSpec {
    enum class Kind { Read, Tick };
    Kind kind;
    std::string arg;

    bool operator==(const EffectSpec& o) const { return kind == o.kind && arg == o.arg; }
};

struct SourceExpr;
using SourceExprPtr = std::shared_ptr<const SourceExpr>;

struct SourceExpr {
    struct Var {
        std::string name;
    };
    struct Lam {
        std::string param;
        SourceTypePtr ann;  // optional; nullptr when unannotated
        SourceExprPtr body;
    };
    struct App {
        SourceExprPtr fn;
        SourceExprPtr arg;
    };
    struct Let {
        std::string name;
        SourceExprPtr bound;
        SourceExprPtr body;
    };
    struct IntLit {
        std::int64_t value;
    };
    struct Prim {
        PrimOp op;
        SourceExprPtr lhs;
        SourceExprPtr rhs;
    };
    struct If {
        SourceExprPtr cond;
        SourceExprPtr then_branch;
        SourceExprPtr else_branch;
    };
    struct Effect {
        EffectSpec spec;
    };
    struct DefRef {
        std::string name;
    };
    std::variant<Var, Lam, App, Let, IntLit, Prim, If, Effect, DefRef> node;
};

inline SourceExprPtr s_var(std::string n) {
    return std::make_shared<SourceExpr>(SourceExpr{SourceExpr::Var{std::move(n)}});
}
inline SourceExprPtr s_lam(std::string p, SourceExprPtr body, SourceTypePtr ann = nullptr) {
    return std::make_shared<SourceExpr>(SourceExpr{SourceExpr::Lam{std::move(p), std::move(ann), std::move(body)}});
}
inline SourceExprPtr s_app(SourceExprPtr f, SourceExprPtr a) {
    return std::make_shared<SourceExpr>(SourceExpr{SourceExpr::App{std::move(f), std::move(a)}});
}
inline SourceExprPtr s_let(std::string n, SourceExprPtr bound, SourceExprPtr body) {
    return std::make_shared<SourceExpr>(SourceExpr{SourceExpr::Let{std::move(n), std::move(bound), std::move(body)}});
}
inline SourceExprPtr s_int(std::int64_t v) {
    return std::make_shared<SourceExpr>(SourceExpr{SourceExpr::IntLit{v}});
}
inline SourceExprPtr s_prim(PrimOp op, SourceExprPtr l, SourceExprPtr r) {
    return std::make_shared<SourceExpr>(SourceExpr{SourceExpr::Prim{op, std::move(l), std::move(r)}});
}
inline SourceExprPtr s_if(SourceExprPtr c, SourceExprPtr t, SourceExprPtr e) {
    return std::make_shared<SourceExpr>(SourceExpr{SourceExpr::If{std::move(c), std::move(t), std::move(e)}});
}
inline SourceExprPtr s_read(std::string key) {
    return std::make_shared<SourceExpr>(SourceExpr{SourceExpr::Effect{{EffectSpec::Kind::Read, std::move(key)}}});
}
inline SourceExprPtr s_tick(std::string label) {
    return std::make_shared<SourceExpr>(SourceExpr{SourceExpr::Effect{{EffectSpec::Kind::Tick, std::move(label)}}});
}
inline SourceExprPtr s_defref(std::string n) {
    return std::make_shared<SourceExpr>(SourceExpr{SourceExpr::DefRef{std::move(n)}});
}

struct TargetExpr;
using TargetExprPtr = std::shared_ptr<const TargetExpr>;

struct TargetExpr {
    struct Var {
        std::string name;
    };
    struct Lam {
        std::string param;
        TargetTypePtr ann;  // filled in by the translators, printed nowhere
        TargetExprPtr body;
    };
    struct App {
        TargetExprPtr fn;
        TargetExprPtr arg;
    };
    struct IntLit {
        std::int64_t value;
    };
    struct Prim {
        PrimOp op;
        TargetExprPtr lhs;
        TargetExprPtr rhs;
    };
    struct If {
        TargetExprPtr cond;
        TargetExprPtr then_branch;
        TargetExprPtr else_branch;
    };
    struct Effect {
        EffectSpec spec;
    };
    struct DefRef {
        std::string name;
    };
    struct Unit {
        TargetExprPtr arg;
    };
    struct Bind {
        TargetExprPtr comp;
        TargetExprPtr cont;
    };
    struct MAlias {
        TargetExprPtr arg;
    };
    std::variant<Var, Lam, App, IntLit, Prim, If, Effect, DefRef, Unit, Bind, MAlias> node;
};

inline TargetExprPtr t_var(std::string n) {
    return std::make_shared<TargetExpr>(TargetExpr{TargetExpr::Var{std::move(n)}});
}
inline TargetExprPtr t_lam(std::string p, TargetExprPtr body, TargetTypePtr ann = nullptr) {
    return std::make_shared<TargetExpr>(TargetExpr{TargetExpr::Lam{std::move(p), std::move(ann), std::move(body)}});
}
inline TargetExprPtr t_app(TargetExprPtr f, TargetExprPtr a) {
    return std::make_shared<TargetExpr>(TargetExpr{TargetExpr::App{std::move(f), std::move(a)}});
}
inline TargetExprPtr t_int(std::int64_t v) {
    return std::make_shared<TargetExpr>(TargetExpr{TargetExpr::IntLit{v}});
}
inline TargetExprPtr t_prim(PrimOp op, TargetExprPtr l, TargetExprPtr r) {
    return std::make_shared<TargetExpr>(TargetExpr{TargetExpr::Prim{op, std::move(l), std::move(r)}});
}
inline TargetExprPtr t_if(TargetExprPtr c, TargetExprPtr t, TargetExprPtr e) {
    return std::make_shared<TargetExpr>(TargetExpr{TargetExpr::If{std::move(c), std::move(t), std::move(e)}});
}
inline TargetExprPtr t_effect(EffectSpec spec) {
    return std::make_shared<TargetExpr>(TargetExpr{TargetExpr::Effect{std::move(spec)}});
}
inline TargetExprPtr t_defref(std::string n) {
    return std::make_shared<TargetExpr>(TargetExpr{TargetExpr::DefRef{std::move(n)}});
}
inline TargetExprPtr t_unit(TargetExprPtr e) {
    return std::make_shared<TargetExpr>(TargetExpr{TargetExpr::Unit{std::move(e)}});
}
inline TargetExprPtr t_bind(TargetExprPtr m, TargetExprPtr k) {
    return std::make_shared<TargetExpr>(TargetExpr{TargetExpr::Bind{std::move(m), std::move(k)}});
}
inline TargetExprPtr t_malias(TargetExprPtr m) {
    return std::make_shared<TargetExpr>(TargetExpr{TargetExpr::MAlias{std::move(m)}});
}

// ---------------------------------------------------------------------------
// Programs

struct Program {
    struct Def {
        std::string name;
        SourceTypePtr type;
        SourceExprPtr body;
    };
    std::vector<Def> defs;
    SourceExprPtr main;

    const Def* find_def(const std::string& name) const {
        for (const auto& d : defs)
            if (d.name == name) return &d;
        return nullptr;
    }
};

// ---------------------------------------------------------------------------
// Lexer

namespace detail {

enum class Tok {
    Ident,
    Int,
    Str,
    KwDef,
    KwMain,
    KwLet,
    KwIn,
    KwIf,
    KwThen,
    KwElse,
    KwRead,
    KwTick,
    KwTyInt,
    KwTyBool,
    Backslash,
    Dot,
    LParen,
    RParen,
    Colon,
    Equals,
    Arrow,
    Plus,
    Minus,
    Star,
    Leq,
    Gt,
    End,
};

inline const char* tok_name(Tok t) {
    switch (t) {
        case Tok::Ident: return "identifier";
        case Tok::Int: return "integer";
        case Tok::Str: return "string";
        case Tok::KwDef: return "'def'";
        case Tok::KwMain: return "'main'";
        case Tok::KwLet: return "'let'";
        case Tok::KwIn: return "'in'";
        case Tok::KwIf: return "'if'";
        case Tok::KwThen: return "'then'";
        case Tok::KwElse: return "'else'";
        case Tok::KwRead: return "'read'";
        case Tok::KwTick: return "'tick'";
        case Tok::KwTyInt: return "'int'";
        case Tok::KwTyBool: return "'bool'";
        case Tok::Backslash: return "'\\'";
        case Tok::Dot: return "'.'";
        case Tok::LParen: return "'('";
        case Tok::RParen: return "')'";
        case Tok::Colon: return "':'";
        case Tok::Equals: return "'='";
        case Tok::Arrow: return "'->'";
        case Tok::Plus: return "'+'";
        case Tok::Minus: return "'-'";
        case Tok::Star: return "'*'";
        case Tok::Leq: return "'<='";
        case Tok::Gt: return "'>'";
        case Tok::End: return "end of input";
    }
    return "?";
}

struct Token {
    Tok kind;
    std::string text;  // identifier name or string payload
    std::int64_t value = 0;
    int line = 1;
    int col = 1;
};

inline bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
inline bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' || c == '\'';
}

inline std::vector<Token> lex(const std::string& text) {
    static const std::unordered_map<std::string, Tok> keywords = {
        {"def", Tok::KwDef},   {"main", Tok::KwMain}, {"let", Tok::KwLet},
        {"in", Tok::KwIn},     {"if", Tok::KwIf},     {"then", Tok::KwThen},
        {"else", Tok::KwElse}, {"read", Tok::KwRead}, {"tick", Tok::KwTick},
        {"int", Tok::KwTyInt}, {"bool", Tok::KwTyBool},
    };
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](char c) {
        if (c == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    };
    while (i < text.size()) {
        char c = text[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            advance(c);
            ++i;
            continue;
        }
        if (c == '-' && i + 1 < text.size() && text[i + 1] == '-') {
            while (i < text.size() && text[i] != '\n') {
                advance(text[i]);
                ++i;
            }
            continue;
        }
        Token tok;
        tok.line = line;
        tok.col = col;
        if (is_ident_start(c)) {
            std::size_t j = i;
            while (j < text.size() && is_ident_char(text[j])) ++j;
            tok.text = text.substr(i, j - i);
            auto kw = keywords.find(tok.text);
            tok.kind = kw == keywords.end() ? Tok::Ident : kw->second;
            while (i < j) {
                advance(text[i]);
                ++i;
            }
            out.push_back(std::move(tok));
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) != 0) {
            std::size_t j = i;
            while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j])) != 0) ++j;
            tok.kind = Tok::Int;
            tok.value = std::stoll(text.substr(i, j - i));
            while (i < j) {
                advance(text[i]);
                ++i;
            }
            out.push_back(std::move(tok));
            continue;
        }
        if (c == '"') {
            advance(c);
            ++i;
            std::string s;
            bool closed = false;
            while (i < text.size()) {
                char d = text[i];
                advance(d);
                ++i;
                if (d == '"') {
                    closed = true;
                    break;
                }
                if (d == '\\' && i < text.size()) {
                    char e = text[i];
                    advance(e);
                    ++i;
                    s.push_back(e);
                    continue;
                }
                s.push_back(d);
            }
            if (!closed) throw ParseError(tok.line, tok.col, "unterminated string literal");
            tok.kind = Tok::Str;
            tok.text = std::move(s);
            out.push_back(std::move(tok));
            continue;
        }
        auto two = [&](char a, char b) {
            return c == a && i + 1 < text.size() && text[i + 1] == b;
        };
        if (two('-', '>')) {
            tok.kind = Tok::Arrow;
            advance('-');
            advance('>');
            i += 2;
        } else if (two('<', '=')) {
            tok.kind = Tok::Leq;
            advance('<');
            advance('=');
            i += 2;
        } else {
            switch (c) {
                case '\\': tok.kind = Tok::Backslash; break;
                case '.': tok.kind = Tok::Dot; break;
                case '(': tok.kind = Tok::LParen; break;
                case ')': tok.kind = Tok::RParen; break;
                case ':': tok.kind = Tok::Colon; break;
                case '=': tok.kind = Tok::Equals; break;
                case '+': tok.kind = Tok::Plus; break;
                case '-': tok.kind = Tok::Minus; break;
                case '*': tok.kind = Tok::Star; break;
                case '>': tok.kind = Tok::Gt; break;
                default:
                    throw ParseError(line, col, std::string("unexpected character '") + c + "'");
            }
            advance(c);
            ++i;
        }
        out.push_back(std::move(tok));
    }
    Token end;
    end.kind = Tok::End;
    end.line = line;
    end.col = col;
    out.push_back(end);
    return out;
}

class Parser {
public:
    explicit Parser(const std::string& text) : toks_(lex(text)) {}

    Program parse_program() {
        Program p;
        while (at(Tok::KwDef)) {
            next();
            Token name = expect(Tok::Ident, "definition name");
            if (known_defs_.count(name.text) != 0)
                throw ParseError(name.line, name.col, "duplicate definition '" + name.text + "'");
            expect(Tok::Colon, "':'");
            SourceTypePtr ty = parse_type();
            expect(Tok::Equals, "'='");
            known_defs_.insert(name.text);  // definitions may refer to themselves
            SourceExprPtr body = parse_expr();
            p.defs.push_back({name.text, ty, body});
        }
        expect(Tok::KwMain, "'def' or 'main'");
        expect(Tok::Equals, "'='");
        p.main = parse_expr();
        expect(Tok::End, "end of input");
        return p;
    }

    SourceExprPtr parse_expr_only() {
        SourceExprPtr e = parse_expr();
        expect(Tok::End, "end of input");
        return e;
    }

    SourceTypePtr parse_type_only() {
        SourceTypePtr t = parse_type();
        expect(Tok::End, "end of input");
        return t;
    }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::vector<std::string> bound_;
    std::unordered_set<std::string> known_defs_;

    const Token& peek() const { return toks_[pos_]; }
    bool at(Tok k) const { return peek().kind == k; }
    Token next() { return toks_[pos_++]; }
    Token expect(Tok k, const std::string& what) {
        if (!at(k)) {
            throw ParseError(peek().line, peek().col,
                             "expected " + what + ", found " + tok_name(peek().kind));
        }
        return next();
    }

    bool is_bound(const std::string& n) const {
        for (auto it = bound_.rbegin(); it != bound_.rend(); ++it)
            if (*it == n) return true;
        return false;
    }

    SourceTypePtr parse_type() {
        SourceTypePtr lhs = parse_type_atom();
        if (at(Tok::Arrow)) {
            next();
            return ty_arrow(lhs, parse_type());  // right-associative
        }
        return lhs;
    }

    SourceTypePtr parse_type_atom() {
        if (at(Tok::KwTyInt)) {
            next();
            return ty_int();
        }
        if (at(Tok::KwTyBool)) {
            next();
            return ty_bool();
        }
        if (at(Tok::LParen)) {
            next();
            SourceTypePtr t = parse_type();
            expect(Tok::RParen, "')'");
            return t;
        }
        throw ParseError(peek().line, peek().col,
                         std::string("expected one of 'int', 'bool', '('; found ") +
                             tok_name(peek().kind));
    }

    SourceExprPtr parse_expr() {
        if (at(Tok::Backslash)) {
            next();
            Token param = expect(Tok::Ident, "parameter name");
            SourceTypePtr ann;
            if (at(Tok::Colon)) {
                next();
                ann = parse_type();
            }
            expect(Tok::Dot, "'.'");
            bound_.push_back(param.text);
            SourceExprPtr body = parse_expr();
            bound_.pop_back();
            return s_lam(param.text, body, ann);
        }
        if (at(Tok::KwLet)) {
            next();
            Token name = expect(Tok::Ident, "binding name");
            expect(Tok::Equals, "'='");
            SourceExprPtr bound = parse_expr();
            expect(Tok::KwIn, "'in'");
            bound_.push_back(name.text);
            SourceExprPtr body = parse_expr();
            bound_.pop_back();
            return s_let(name.text, bound, body);
        }
        if (at(Tok::KwIf)) {
            next();
            SourceExprPtr c = parse_expr();
            expect(Tok::KwThen, "'then'");
            SourceExprPtr t = parse_expr();
            expect(Tok::KwElse, "'else'");
            SourceExprPtr e = parse_expr();
            return s_if(c, t, e);
        }
        return parse_cmp();
    }

    SourceExprPtr parse_cmp() {
        SourceExprPtr lhs = parse_add();
        while (at(Tok::Leq) || at(Tok::Gt)) {
            PrimOp op = at(Tok::Leq) ? PrimOp::Leq : PrimOp::Gt;
            next();
            lhs = s_prim(op, lhs, parse_add());
        }
        return lhs;
    }

    SourceExprPtr parse_add() {
        SourceExprPtr lhs = parse_mul();
        while (at(Tok::Plus) || at(Tok::Minus)) {
            PrimOp op = at(Tok::Plus) ? PrimOp::Add : PrimOp::Sub;
            next();
            lhs = s_prim(op, lhs, parse_mul());
        }
        return lhs;
    }

    SourceExprPtr parse_mul() {
        SourceExprPtr lhs = parse_app();
        while (at(Tok::Star)) {
            next();
            lhs = s_prim(PrimOp::Mul, lhs, parse_app());
        }
        return lhs;
    }

    bool starts_atom() const {
        switch (peek().kind) {
            case Tok::Int:
            case Tok::Ident:
            case Tok::LParen:
            case Tok::KwRead:
            case Tok::KwTick:
                return true;
            default:
                return false;
        }
    }

    SourceExprPtr parse_app() {
        SourceExprPtr e = parse_atom();
        while (starts_atom()) e = s_app(e, parse_atom());
        return e;
    }

    SourceExprPtr parse_atom() {
        const Token& t = peek();
        switch (t.kind) {
            case Tok::Int:
                next();
                return s_int(t.value);
            case Tok::Ident: {
                next();
                if (is_bound(t.text)) return s_var(t.text);
                if (known_defs_.count(t.text) != 0) return s_defref(t.text);
                return s_var(t.text);  // unbound; the type checker reports it
            }
            case Tok::LParen: {
                next();
                SourceExprPtr e = parse_expr();
                expect(Tok::RParen, "')'");
                return e;
            }
            case Tok::KwRead: {
                next();
                Token key = expect(Tok::Str, "string key");
                return s_read(key.text);
            }
            case Tok::KwTick: {
                next();
                Token label = expect(Tok::Str, "string label");
                return s_tick(label.text);
            }
            default:
                throw ParseError(t.line, t.col,
                                 std::string("expected one of integer, identifier, '(', "
                                             "'read', 'tick'; found ") +
                                     tok_name(t.kind));
        }
    }
};

}  // namespace detail

inline Program parse_program(const std::string& text) {
    return detail::Parser(text).parse_program();
}

// Parses a bare expression with no top-level definitions in scope.
inline SourceExprPtr parse_expr(const std::string& text) {
    return detail::Parser(text).parse_expr_only();
}

inline SourceTypePtr parse_type(const std::string& text) {
    return detail::Parser(text).parse_type_only();
}

// ---------------------------------------------------------------------------
// Pretty-printing

inline std::string quote_string(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

inline std::string pretty_type(const SourceTypePtr& t) {
    return std::visit(overloaded{[](const SourceType::Base& b) { return b.name; },
                                 [](const SourceType::Arrow& a) {
                                     std::string lhs = pretty_type(a.from);
                                     if (std::holds_alternative<SourceType::Arrow>(a.from->node))
                                         lhs = "(" + lhs + ")";
                                     return lhs + " -> " + pretty_type(a.to);
                                 }},
                      t->node);
}

inline std::string pretty_type(const TargetTypePtr& t) {
    return std::visit(overloaded{[](const TargetType::Base& b) { return b.name; },
                                 [](const TargetType::Arrow& a) {
                                     std::string lhs = pretty_type(a.from);
                                     if (std::holds_alternative<TargetType::Arrow>(a.from->node))
                                         lhs = "(" + lhs + ")";
                                     return lhs + " -> " + pretty_type(a.to);
                                 },
                                 [](const TargetType::M& m) {
                                     std::string inner = pretty_type(m.inner);
                                     if (!std::holds_alternative<TargetType::Base>(m.inner->node))
                                         inner = "(" + inner + ")";
                                     return "M " + inner;
                                 }},
                      t->node);
}

namespace detail {

// Precedence levels shared by both printers; a node prints parenthesized
// when its own level is below the level its context requires.
enum Level { LvExpr = 0, LvCmp = 1, LvAdd = 2, LvMul = 3, LvApp = 4, LvAtom = 5 };

inline int prim_level(PrimOp op) {
    switch (op) {
        case PrimOp::Leq:
        case PrimOp::Gt: return LvCmp;
        case PrimOp::Add:
        case PrimOp::Sub: return LvAdd;
        case PrimOp::Mul: return LvMul;
    }
    return LvCmp;
}

inline void print_source(std::ostream& os, const SourceExprPtr& e, int need);

inline void print_source_prim(std::ostream& os, const SourceExpr::Prim& p, int need) {
    int lv = prim_level(p.op);
    bool parens = lv < need;
    if (parens) os << "(";
    print_source(os, p.lhs, lv);
    os << " " << prim_symbol(p.op) << " ";
    print_source(os, p.rhs, lv + 1);
    if (parens) os << ")";
}

inline void print_source(std::ostream& os, const SourceExprPtr& e, int need) {
    std::visit(
        overloaded{
            [&](const SourceExpr::Var& v) { os << v.name; },
            [&](const SourceExpr::DefRef& d) { os << d.name; },
            [&](const SourceExpr::IntLit& n) { os << n.value; },
            [&](const SourceExpr::Lam& l) {
                bool parens = LvExpr < need;
                if (parens) os << "(";
                os << "\\" << l.param;
                if (l.ann) os << " : " << pretty_type(l.ann);
                os << ". ";
                print_source(os, l.body, LvExpr);
                if (parens) os << ")";
            },
            [&](const SourceExpr::Let& l) {
                bool parens = LvExpr < need;
                if (parens) os << "(";
                os << "let " << l.name << " = ";
                print_source(os, l.bound, LvExpr);
                os << " in ";
                print_source(os, l.body, LvExpr);
                if (parens) os << ")";
            },
            [&](const SourceExpr::If& i) {
                bool parens = LvExpr < need;
                if (parens) os << "(";
                os << "if ";
                print_source(os, i.cond, LvExpr);
                os << " then ";
                print_source(os, i.then_branch, LvExpr);
                os << " else ";
                print_source(os, i.else_branch, LvExpr);
                if (parens) os << ")";
            },
            [&](const SourceExpr::App& a) {
                bool parens = LvApp < need;
                if (parens) os << "(";
                print_source(os, a.fn, LvApp);
                os << " ";
                print_source(os, a.arg, LvAtom);
                if (parens) os << ")";
            },
            [&](const SourceExpr::Prim& p) { print_source_prim(os, p, need); },
            [&](const SourceExpr::Effect& f) {
                bool parens = LvApp < need;
                if (parens) os << "(";
                os << (f.spec.kind == EffectSpec::Kind::Read ? "read " : "tick ")
                   << quote_string(f.spec.arg);
                if (parens) os << ")";
            }},
        e->node);
}

inline void print_target(std::ostream& os, const TargetExprPtr& e, int need);

inline void print_target_prim(std::ostream& os, const TargetExpr::Prim& p, int need) {
    int lv = prim_level(p.op);
    bool parens = lv < need;
    if (parens) os << "(";
    print_target(os, p.lhs, lv);
    os << " " << prim_symbol(p.op) << " ";
    print_target(os, p.rhs, lv + 1);
    if (parens) os << ")";
}

inline void print_target(std::ostream& os, const TargetExprPtr& e, int need) {
    auto app_like = [&](const char* head, const std::vector<TargetExprPtr>& args) {
        bool parens = LvApp < need;
        if (parens) os << "(";
        os << head;
        for (const auto& a : args) {
            os << " ";
            print_target(os, a, LvAtom);
        }
        if (parens) os << ")";
    };
    std::visit(
        overloaded{
            [&](const TargetExpr::Var& v) { os << v.name; },
            [&](const TargetExpr::DefRef& d) { os << d.name; },
            [&](const TargetExpr::IntLit& n) { os << n.value; },
            [&](const TargetExpr::Lam& l) {
                bool parens = LvExpr < need;
                if (parens) os << "(";
                os << "\\" << l.param << ". ";
                print_target(os, l.body, LvExpr);
                if (parens) os << ")";
            },
            [&](const TargetExpr::If& i) {
                bool parens = LvExpr < need;
                if (parens) os << "(";
                os << "if ";
                print_target(os, i.cond, LvExpr);
                os << " then ";
                print_target(os, i.then_branch, LvExpr);
                os << " else ";
                print_target(os, i.else_branch, LvExpr);
                if (parens) os << ")";
            },
            [&](const TargetExpr::App& a) {
                bool parens = LvApp < need;
                if (parens) os << "(";
                print_target(os, a.fn, LvApp);
                os << " ";
                print_target(os, a.arg, LvAtom);
                if (parens) os << ")";
            },
            [&](const TargetExpr::Prim& p) { print_target_prim(os, p, need); },
            [&](const TargetExpr::Effect& f) {
                bool parens = LvApp < need;
                if (parens) os << "(";
                os << (f.spec.kind == EffectSpec::Kind::Read ? "read " : "tick ")
                   << quote_string(f.spec.arg);
                if (parens) os << ")";
            },
            [&](const TargetExpr::Unit& u) { app_like("unit", {u.arg}); },
            [&](const TargetExpr::Bind& b) { app_like("bind", {b.comp, b.cont}); },
            [&](const TargetExpr::MAlias& m) { app_like("malias", {m.arg}); }},
        e->node);
}

}  // namespace detail

inline std::string pretty_source(const SourceExprPtr& e) {
    std::ostringstream os;
    detail::print_source(os, e, detail::LvExpr);
    return os.str();
}

inline std::string pretty_target(const TargetExprPtr& e) {
    std::ostringstream os;
    detail::print_target(os, e, detail::LvExpr);
    return os.str();
}

inline std::string pretty_program(const Program& p) {
    std::ostringstream os;
    for (const auto& d : p.defs)
        os << "def " << d.name << " : " << pretty_type(d.type) << " = " << pretty_source(d.body)
           << "\n";
    os << "main = " << pretty_source(p.main) << "\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// Alpha-equivalence (de Bruijn comparison)

namespace detail {

inline bool alpha_equal_rec(const SourceExprPtr& a, const SourceExprPtr& b,
                            std::vector<std::string>& ea, std::vector<std::string>& eb) {
    auto index_of = [](const std::vector<std::string>& env, const std::string& n) -> int {
        for (int i = static_cast<int>(env.size()) - 1; i >= 0; --i)
            if (env[static_cast<std::size_t>(i)] == n) return static_cast<int>(env.size()) - 1 - i;
        return -1;
    };
    if (a->node.index() != b->node.index()) return false;
    return std::visit(
        overloaded{
            [&](const SourceExpr::Var& va) {
                const auto& vb = std::get<SourceExpr::Var>(b->node);
                int ia = index_of(ea, va.name);
                int ib = index_of(eb, vb.name);
                if (ia != ib) return false;
                return ia >= 0 || va.name == vb.name;  // both bound at same depth, or same free name
            },
            [&](const SourceExpr::DefRef& da) {
                return da.name == std::get<SourceExpr::DefRef>(b->node).name;
            },
            [&](const SourceExpr::IntLit& na) {
                return na.value == std::get<SourceExpr::IntLit>(b->node).value;
            },
            [&](const SourceExpr::Lam& la) {
                const auto& lb = std::get<SourceExpr::Lam>(b->node);
                if ((la.ann == nullptr) != (lb.ann == nullptr)) return false;
                if (la.ann && !type_equal(la.ann, lb.ann)) return false;
                ea.push_back(la.param);
                eb.push_back(lb.param);
                bool ok = alpha_equal_rec(la.body, lb.body, ea, eb);
                ea.pop_back();
                eb.pop_back();
                return ok;
            },
            [&](const SourceExpr::App& pa) {
                const auto& pb = std::get<SourceExpr::App>(b->node);
                return alpha_equal_rec(pa.fn, pb.fn, ea, eb) &&
                       alpha_equal_rec(pa.arg, pb.arg, ea, eb);
            },
            [&](const SourceExpr::Let& la) {
                const auto& lb = std::get<SourceExpr::Let>(b->node);
                if (!alpha_equal_rec(la.bound, lb.bound, ea, eb)) return false;
                ea.push_back(la.name);
                eb.push_back(lb.name);
                bool ok = alpha_equal_rec(la.body, lb.body, ea, eb);
                ea.pop_back();
                eb.pop_back();
                return ok;
            },
            [&](const SourceExpr::Prim& pa) {
                const auto& pb = std::get<SourceExpr::Prim>(b->node);
                return pa.op == pb.op && alpha_equal_rec(pa.lhs, pb.lhs, ea, eb) &&
                       alpha_equal_rec(pa.rhs, pb.rhs, ea, eb);
            },
            [&](const SourceExpr::If& ia) {
                const auto& ib = std::get<SourceExpr::If>(b->node);
                return alpha_equal_rec(ia.cond, ib.cond, ea, eb) &&
                       alpha_equal_rec(ia.then_branch, ib.then_branch, ea, eb) &&
                       alpha_equal_rec(ia.else_branch, ib.else_branch, ea, eb);
            },
            [&](const SourceExpr::Effect& fa) {
                return fa.spec == std::get<SourceExpr::Effect>(b->node).spec;
            }},
        a->node);
}

}  // namespace detail

inline bool alpha_equal(const SourceExprPtr& a, const SourceExprPtr& b) {
    std::vector<std::string> ea, eb;
    return detail::alpha_equal_rec(a, b, ea, eb);
}

// ---------------------------------------------------------------------------
// Structural helpers used by tests and the translator invariants

inline void visit_subexprs(const SourceExprPtr& e, const std::function<void(const SourceExprPtr&)>& f);

namespace detail {
inline void visit_children(const SourceExprPtr& e,
                           const std::function<void(const SourceExprPtr&)>& f) {
    std::visit(overloaded{[&](const SourceExpr::Lam& l) { visit_subexprs(l.body, f); },
                          [&](const SourceExpr::App& a) {
                              visit_subexprs(a.fn, f);
                              visit_subexprs(a.arg, f);
                          },
                          [&](const SourceExpr::Let& l) {
                              visit_subexprs(l.bound, f);
                              visit_subexprs(l.body, f);
                          },
                          [&](const SourceExpr::Prim& p) {
                              visit_subexprs(p.lhs, f);
                              visit_subexprs(p.rhs, f);
                          },
                          [&](const SourceExpr::If& i) {
                              visit_subexprs(i.cond, f);
                              visit_subexprs(i.then_branch, f);
                              visit_subexprs(i.else_branch, f);
                          },
                          [&](const auto&) {}},
               e->node);
}
}  // namespace detail

inline void visit_subexprs(const SourceExprPtr& e,
                           const std::function<void(const SourceExprPtr&)>& f) {
    f(e);
    detail::visit_children(e, f);
}

inline void visit_subexprs(const TargetExprPtr& e,
                           const std::function<void(const TargetExprPtr&)>& f) {
    f(e);
    std::visit(overloaded{[&](const TargetExpr::Lam& l) { visit_subexprs(l.body, f); },
                          [&](const TargetExpr::App& a) {
                              visit_subexprs(a.fn, f);
                              visit_subexprs(a.arg, f);
                          },
                          [&](const TargetExpr::Prim& p) {
                              visit_subexprs(p.lhs, f);
                              visit_subexprs(p.rhs, f);
                          },
                          [&](const TargetExpr::If& i) {
                              visit_subexprs(i.cond, f);
                              visit_subexprs(i.then_branch, f);
                              visit_subexprs(i.else_branch, f);
                          },
                          [&](const TargetExpr::Unit& u) { visit_subexprs(u.arg, f); },
                          [&](const TargetExpr::Bind& b) {
                              visit_subexprs(b.comp, f);
                              visit_subexprs(b.cont, f);
                          },
                          [&](const TargetExpr::MAlias& m) { visit_subexprs(m.arg, f); },
                          [&](const auto&) {}},
               e->node);
}

inline std::size_t count_malias_nodes(const TargetExprPtr& e) {
    std::size_t n = 0;
    visit_subexprs(e, [&](const TargetExprPtr& sub) {
        if (std::holds_alternative<TargetExpr::MAlias>(sub->node)) ++n;
    });
    return n;
}

}  // namespace malias
