#include "msk/syntax.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

#include "msk/errors.hpp"

namespace msk {

namespace {

E node(Tag t, std::string name = {}, std::vector<E> kids = {}, std::size_t index = 0) {
    auto e = std::make_shared<Expr>();
    e->tag = t;
    e->name = std::move(name);
    e->kids = std::move(kids);
    e->index = index;
    return e;
}

std::size_t binds(Tag t, std::size_t child) {
    // number of binders child `child` sits under
    if ((t == Tag::Pi || t == Tag::Sigma) && child == 1) return 1;
    if (t == Tag::Lam) return 1;
    return 0;
}

E rebuild(const E& e, std::vector<E> kids, E annot) {
    bool same = annot == e->annot;
    for (std::size_t i = 0; same && i < kids.size(); ++i) same = kids[i] == e->kids[i];
    if (same) return e;
    auto n = std::make_shared<Expr>(*e);
    n->kids = std::move(kids);
    n->annot = std::move(annot);
    return n;
}

// generic traversal; f(e, depth) returns a replacement or nullptr to recurse
E map_expr(const E& e, std::size_t depth, const std::function<E(const E&, std::size_t)>& f) {
    if (auto r = f(e, depth)) return r;
    std::vector<E> kids;
    kids.reserve(e->kids.size());
    for (std::size_t i = 0; i < e->kids.size(); ++i) kids.push_back(map_expr(e->kids[i], depth + binds(e->tag, i), f));
    E annot = e->annot ? map_expr(e->annot, depth, f) : nullptr;
    return rebuild(e, std::move(kids), std::move(annot));
}

} // namespace

namespace mk {
E u() { return node(Tag::U); }
E unit() { return node(Tag::Unit); }
E tt() { return node(Tag::Tt); }
E refl() { return node(Tag::Refl); }
E var(std::size_t i) { return node(Tag::Var, {}, {}, i); }
E lvl(std::size_t l) { return node(Tag::Lvl, {}, {}, l); }
E base(std::string name) { return node(Tag::Base, std::move(name)); }
E pi(std::string x, E dom, E cod) { return node(Tag::Pi, std::move(x), {std::move(dom), std::move(cod)}); }
E sigma(std::string x, E dom, E cod) { return node(Tag::Sigma, std::move(x), {std::move(dom), std::move(cod)}); }
E arrow(E dom, E cod) { return pi("_", std::move(dom), shift(cod, 1)); }
E lam(std::string x, E body) { return node(Tag::Lam, std::move(x), {std::move(body)}); }
E app(E f, E a) { return node(Tag::App, {}, {std::move(f), std::move(a)}); }
E apps(E f, const std::vector<E>& args) {
    for (const auto& a : args) f = app(f, a);
    return f;
}
E pair(E a, E b) { return node(Tag::Pair, {}, {std::move(a), std::move(b)}); }
E fst(E p) { return node(Tag::Fst, {}, {std::move(p)}); }
E snd(E p) { return node(Tag::Snd, {}, {std::move(p)}); }
E id(E type, E lhs, E rhs) { return node(Tag::Id, {}, {std::move(type), std::move(lhs), std::move(rhs)}); }
E id_over(E family, std::vector<E> paths, E lhs, E rhs) {
    std::vector<E> kids{std::move(family), std::move(lhs), std::move(rhs)};
    for (auto& p : paths) kids.push_back(std::move(p));
    return node(Tag::IdOver, {}, std::move(kids));
}
} // namespace mk

E shift(const E& e, std::ptrdiff_t by, std::size_t cutoff) {
    if (by == 0) return e;
    return map_expr(e, cutoff, [by](const E& x, std::size_t depth) -> E {
        if (x->tag != Tag::Var || x->index < depth) return nullptr;
        if (by < 0 && x->index < static_cast<std::size_t>(-by) + depth)
            throw TypeError("shift below zero");
        return mk::var(x->index + by);
    });
}

E instantiate(const E& body, const E& s) {
    return map_expr(body, 0, [&s](const E& x, std::size_t depth) -> E {
        if (x->tag != Tag::Var || x->index < depth) return nullptr;
        if (x->index == depth) return shift(s, static_cast<std::ptrdiff_t>(depth));
        return mk::var(x->index - 1);
    });
}

E close_levels(const E& e, std::size_t depth) {
    return map_expr(e, depth, [](const E& x, std::size_t d) -> E {
        if (x->tag != Tag::Lvl) return nullptr;
        if (x->index >= d) throw TypeError("level " + std::to_string(x->index) + " out of scope");
        return mk::var(d - 1 - x->index);
    });
}

bool has_var(const E& e, std::size_t index) {
    bool found = false;
    map_expr(e, 0, [&](const E& x, std::size_t depth) -> E {
        if (x->tag == Tag::Var && x->index == index + depth) found = true;
        return nullptr;
    });
    return found;
}

bool has_levels(const E& e) {
    bool found = false;
    map_expr(e, 0, [&](const E& x, std::size_t) -> E {
        if (x->tag == Tag::Lvl) found = true;
        return nullptr;
    });
    return found;
}

E normalize(const E& e) {
    switch (e->tag) {
    case Tag::App: {
        E f = normalize(e->kids[0]);
        E a = normalize(e->kids[1]);
        if (f->tag == Tag::Lam) return normalize(instantiate(f->kids[0], a));
        return rebuild(e, {f, a}, nullptr);
    }
    case Tag::Fst:
    case Tag::Snd: {
        E p = normalize(e->kids[0]);
        if (p->tag == Tag::Pair) return p->kids[e->tag == Tag::Fst ? 0 : 1];
        return rebuild(e, {p}, nullptr);
    }
    default: {
        std::vector<E> kids;
        for (const auto& k : e->kids) kids.push_back(normalize(k));
        return rebuild(e, std::move(kids), e->annot ? normalize(e->annot) : nullptr);
    }
    }
}

bool alpha_eq(const E& a, const E& b) {
    if (a == b) return true;
    if (a->tag != b->tag || a->kids.size() != b->kids.size()) return false;
    if ((a->tag == Tag::Var || a->tag == Tag::Lvl) && a->index != b->index) return false;
    if (a->tag == Tag::Base && a->name != b->name) return false;
    for (std::size_t i = 0; i < a->kids.size(); ++i)
        if (!alpha_eq(a->kids[i], b->kids[i])) return false;
    return true;
}

// ---- printer

namespace {

void collect_bases(const E& e, std::set<std::string>& out) {
    if (e->tag == Tag::Base) out.insert(e->name);
    for (const auto& k : e->kids) collect_bases(k, out);
}

struct Printer {
    std::vector<std::string> scope;  // innermost last
    std::set<std::string> reserved;

    std::string fresh(const std::string& hint) {
        std::string n = hint.empty() ? "x" : hint;
        auto taken = [&](const std::string& s) {
            return reserved.count(s) || std::find(scope.begin(), scope.end(), s) != scope.end();
        };
        while (taken(n)) n += "'";
        return n;
    }

    // prec: 0 binder/arrow, 1 application, 2 atom
    std::string go(const E& e, int prec) {
        auto paren = [&](int need, const std::string& s) { return prec > need ? "(" + s + ")" : s; };
        switch (e->tag) {
        case Tag::U: return "U";
        case Tag::Unit: return "Unit";
        case Tag::Tt: return "tt";
        case Tag::Refl: return "refl";
        case Tag::Base: return e->name;
        case Tag::Lvl: return "%" + std::to_string(e->index);
        case Tag::Var:
            if (e->index >= scope.size()) return "#" + std::to_string(e->index);
            return scope[scope.size() - 1 - e->index];
        case Tag::Pi:
        case Tag::Sigma: {
            const E& d = e->kids[0];
            bool dotted = d->tag == Tag::Lam || d->tag == Tag::Sigma || (d->tag == Tag::Pi && has_var(d->kids[1], 0));
            std::string dom = go(d, e->tag == Tag::Pi && !has_var(e->kids[1], 0) ? 1 : 0);
            if (dotted && dom.front() != '(') dom = "(" + dom + ")";
            if (e->tag == Tag::Pi && !has_var(e->kids[1], 0)) {
                scope.push_back("_");
                std::string cod = go(e->kids[1], 0);
                scope.pop_back();
                return paren(0, dom + " → " + cod);
            }
            std::string x = has_var(e->kids[1], 0) ? fresh(e->name) : "_";
            scope.push_back(x);
            std::string cod = go(e->kids[1], 0);
            scope.pop_back();
            return paren(0, std::string(e->tag == Tag::Pi ? "Π " : "Σ ") + x + ":" + dom + ". " + cod);
        }
        case Tag::Lam: {
            std::vector<std::string> xs;
            E body = e;
            while (body->tag == Tag::Lam) {
                std::string x = has_var(body->kids[0], 0) ? fresh(body->name) : "_";
                xs.push_back(x);
                scope.push_back(x);
                body = body->kids[0];
            }
            std::string s = "λ";
            for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? " " : "") + xs[i];
            s += ". " + go(body, 0);
            scope.resize(scope.size() - xs.size());
            return paren(0, s);
        }
        case Tag::App: {
            std::vector<E> args;
            E head = e;
            while (head->tag == Tag::App) {
                args.push_back(head->kids[1]);
                head = head->kids[0];
            }
            std::string s = go(head, 2);
            for (auto it = args.rbegin(); it != args.rend(); ++it) s += " " + go(*it, 2);
            return paren(1, s);
        }
        case Tag::Pair: return "(" + go(e->kids[0], 0) + ", " + go(e->kids[1], 0) + ")";
        case Tag::Fst: return paren(1, "fst " + go(e->kids[0], 2));
        case Tag::Snd: return paren(1, "snd " + go(e->kids[0], 2));
        case Tag::Id:
            return paren(1, "Id " + go(e->kids[0], 2) + " " + go(e->kids[1], 2) + " " + go(e->kids[2], 2));
        case Tag::IdOver: {
            std::string s = "IdOver " + go(e->kids[0], 2) + " [";
            for (std::size_t i = 3; i < e->kids.size(); ++i) s += (i > 3 ? ", " : "") + go(e->kids[i], 0);
            s += "] " + go(e->kids[1], 2) + " " + go(e->kids[2], 2);
            return paren(1, s);
        }
        }
        return "?";
    }
};

} // namespace

std::string show(const E& e, const std::vector<std::string>& context) {
    Printer p;
    p.scope = context;
    collect_bases(e, p.reserved);
    return p.go(e, 0);
}

// ---- parser

namespace {

struct Token {
    enum Kind { Ident, Sym, End } kind;
    std::string text;
    std::size_t line, col;
};

std::vector<Token> lex(const std::string& s) {
    std::vector<Token> out;
    std::size_t line = 1, col = 1, i = 0;
    auto adv = [&](std::size_t n) {
        i += n;
        col += 1;
    };
    while (i < s.size()) {
        unsigned char c = s[i];
        if (c == '\n') {
            ++line;
            col = 1;
            ++i;
            continue;
        }
        if (std::isspace(c)) {
            adv(1);
            continue;
        }
        if (c == '-' && i + 1 < s.size() && s[i + 1] == '-') {  // comment
            while (i < s.size() && s[i] != '\n') ++i;
            continue;
        }
        if (std::isalpha(c) || c == '_') {
            std::size_t j = i;
            while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_' || s[j] == '\''))
                ++j;
            out.push_back({Token::Ident, s.substr(i, j - i), line, col});
            col += j - i;
            i = j;
            continue;
        }
        if (c == '-' && i + 1 < s.size() && s[i + 1] == '>') {
            out.push_back({Token::Sym, "->", line, col});
            i += 2;
            col += 2;
            continue;
        }
        static const std::pair<const char*, const char*> unicode[] = {
            {"λ", "\\"}, {"Π", "Pi"}, {"Σ", "Sig"}, {"→", "->"}};
        bool matched = false;
        for (auto [u, ascii] : unicode) {
            std::string us(u);
            if (s.compare(i, us.size(), us) == 0) {
                bool ident = std::string(ascii) == "Pi" || std::string(ascii) == "Sig";
                out.push_back({ident ? Token::Ident : Token::Sym, ascii, line, col});
                i += us.size();
                ++col;
                matched = true;
                break;
            }
        }
        if (matched) continue;
        if (std::string("()[],:.\\").find(static_cast<char>(c)) != std::string::npos) {
            out.push_back({Token::Sym, std::string(1, static_cast<char>(c)), line, col});
            adv(1);
            continue;
        }
        throw ParseError(std::string("unexpected character '") + static_cast<char>(c) + "'", line, col);
    }
    out.push_back({Token::End, "", line, col});
    return out;
}

const std::set<std::string> kKeywords = {"Pi", "Sig", "Id", "IdOver", "Unit", "U", "tt", "refl", "fst", "snd", "base"};

struct Parser {
    std::vector<Token> toks;
    std::size_t pos = 0;
    std::set<std::string> bases;
    std::vector<std::string> scope;

    const Token& peek() const { return toks[pos]; }
    bool is(const std::string& t) const { return peek().kind != Token::End && peek().text == t; }
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, peek().line, peek().col); }
    void expect(const std::string& t) {
        if (!is(t)) fail("expected '" + t + "'" + (peek().kind == Token::End ? " before end of input" : ", found '" + peek().text + "'"));
        ++pos;
    }
    std::string binder() {
        if (peek().kind != Token::Ident || (kKeywords.count(peek().text) && peek().text != "_"))
            fail("expected a variable name");
        return toks[pos++].text;
    }

    E expr() {
        if (is("Pi") || is("Sig")) {
            bool pi = peek().text == "Pi";
            ++pos;
            std::string x = binder();
            expect(":");
            E dom = expr();
            expect(".");
            scope.push_back(x);
            E cod = expr();
            scope.pop_back();
            return pi ? mk::pi(x, dom, cod) : mk::sigma(x, dom, cod);
        }
        if (is("\\")) {
            ++pos;
            std::vector<std::string> xs{binder()};
            while (!is(".")) xs.push_back(binder());
            expect(".");
            for (const auto& x : xs) scope.push_back(x);
            E body = expr();
            for (auto it = xs.rbegin(); it != xs.rend(); ++it) {
                body = mk::lam(*it, body);
                scope.pop_back();
            }
            return body;
        }
        E lhs = application();
        if (is("->")) {
            ++pos;
            scope.push_back("");  // anonymous
            E rhs = expr();
            scope.pop_back();
            return mk::pi("_", lhs, rhs);
        }
        return lhs;
    }

    bool starts_atom() const {
        if (peek().kind == Token::End) return false;
        if (peek().kind == Token::Sym) return peek().text == "(";
        return !(peek().text == "Pi" || peek().text == "Sig" || peek().text == "Id" || peek().text == "IdOver" ||
                 peek().text == "fst" || peek().text == "snd" || peek().text == "base");
    }

    E application() {
        if (is("Id")) {
            ++pos;
            E a = atom(), l = atom(), r = atom();
            return mk::id(a, l, r);
        }
        if (is("IdOver")) {
            ++pos;
            E fam = atom();
            expect("[");
            std::vector<E> paths;
            if (!is("]")) {
                paths.push_back(expr());
                while (is(",")) {
                    ++pos;
                    paths.push_back(expr());
                }
            }
            expect("]");
            E l = atom(), r = atom();
            return mk::id_over(fam, paths, l, r);
        }
        if (is("fst") || is("snd")) {
            bool first = peek().text == "fst";
            ++pos;
            E p = atom();
            E e = first ? mk::fst(p) : mk::snd(p);
            while (starts_atom()) e = mk::app(e, atom());
            return e;
        }
        E e = atom();
        while (starts_atom()) e = mk::app(e, atom());
        return e;
    }

    E atom() {
        if (is("(")) {
            ++pos;
            E a = expr();
            if (is(",")) {
                ++pos;
                E b = expr();
                expect(")");
                return mk::pair(a, b);
            }
            expect(")");
            return a;
        }
        if (peek().kind != Token::Ident) fail(peek().kind == Token::End ? "unexpected end of input" : "unexpected '" + peek().text + "'");
        std::string t = toks[pos].text;
        if (t == "U") return ++pos, mk::u();
        if (t == "Unit") return ++pos, mk::unit();
        if (t == "tt") return ++pos, mk::tt();
        if (t == "refl") return ++pos, mk::refl();
        if (kKeywords.count(t)) fail("unexpected keyword '" + t + "'");
        for (std::size_t i = scope.size(); i-- > 0;)
            if (scope[i] == t && t != "_") {
                ++pos;
                return mk::var(scope.size() - 1 - i);
            }
        if (bases.count(t)) return ++pos, mk::base(t);
        fail("unbound name '" + t + "'");
    }
};

} // namespace

E parse_expr(const std::string& text, const std::vector<std::string>& bases) {
    Parser p;
    p.toks = lex(text);
    p.bases.insert(bases.begin(), bases.end());
    E e = p.expr();
    if (p.peek().kind != Token::End) p.fail("unexpected '" + p.peek().text + "' after expression");
    return e;
}

ParsedFile parse_file(const std::string& text) {
    Parser p;
    p.toks = lex(text);
    ParsedFile out;
    while (p.is("base")) {
        ++p.pos;
        std::string n = p.binder();
        if (p.bases.count(n)) p.fail("base '" + n + "' declared twice");
        p.bases.insert(n);
        out.bases.push_back(n);
    }
    out.expr = p.expr();
    if (p.peek().kind != Token::End) p.fail("unexpected '" + p.peek().text + "' after expression");
    return out;
}

} // namespace msk
