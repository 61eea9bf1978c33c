#include <algorithm>

#include "msk/errors.hpp"
#include "msk/syntax.hpp"

namespace msk {

namespace {

std::vector<std::string> names(const TypeContext& ctx) {
    std::vector<std::string> out;
    for (const auto& [n, t] : ctx.vars) out.push_back(n);
    return out;
}

TypeContext extend(const TypeContext& ctx, const std::string& x, const E& type) {
    TypeContext c = ctx;
    c.vars.emplace_back(x, type);
    return c;
}

E with(const E& e, std::vector<E> kids, E annot = nullptr) {
    auto n = std::make_shared<Expr>(*e);
    n->kids = std::move(kids);
    if (annot) n->annot = std::move(annot);
    return n;
}

[[noreturn]] void mismatch(const TypeContext& ctx, const std::string& what, const E& want, const E& got) {
    auto ns = names(ctx);
    throw TypeError(what + ": expected " + show(want, ns) + ", got " + show(got, ns));
}

} // namespace

bool conv(const E& a, const E& b) { return alpha_eq(normalize(a), normalize(b)); }

E check_type(const TypeContext& ctx, const E& e) { return check(ctx, e, mk::u()); }

Checked infer(const TypeContext& ctx, const E& e) {
    switch (e->tag) {
    case Tag::U:
    case Tag::Unit: return {e, mk::u()};
    case Tag::Tt: return {e, mk::unit()};
    case Tag::Refl: throw TypeError("cannot infer the type of refl");
    case Tag::Lvl: throw TypeError("unresolved level in term");
    case Tag::Base: {
        auto it = ctx.bases.find(e->name);
        if (it == ctx.bases.end()) throw TypeError("unknown base '" + e->name + "'");
        return {e, it->second};
    }
    case Tag::Var: {
        if (e->index >= ctx.vars.size()) throw TypeError("variable #" + std::to_string(e->index) + " out of scope");
        return {e, shift(ctx.vars[ctx.vars.size() - 1 - e->index].second, e->index + 1)};
    }
    case Tag::Pi:
    case Tag::Sigma: {
        E a = check_type(ctx, e->kids[0]);
        E b = check_type(extend(ctx, e->name, a), e->kids[1]);
        return {with(e, {a, b}), mk::u()};
    }
    case Tag::Lam: {
        if (!e->annot) throw TypeError("cannot infer the type of a lambda");
        E a = check_type(ctx, e->annot);
        auto body = infer(extend(ctx, e->name, a), e->kids[0]);
        return {with(e, {body.expr}, a), mk::pi(e->name, a, body.type)};
    }
    case Tag::App: {
        auto f = infer(ctx, e->kids[0]);
        E t = normalize(f.type);
        if (t->tag != Tag::Pi)
            throw TypeError("application of a non-function of type " + show(t, names(ctx)));
        E a = check(ctx, e->kids[1], t->kids[0]);
        return {with(e, {f.expr, a}), normalize(instantiate(t->kids[1], a))};
    }
    case Tag::Pair: {
        auto a = infer(ctx, e->kids[0]);
        auto b = infer(ctx, e->kids[1]);
        return {with(e, {a.expr, b.expr}), mk::sigma("_", a.type, shift(b.type, 1))};
    }
    case Tag::Fst:
    case Tag::Snd: {
        auto p = infer(ctx, e->kids[0]);
        E t = normalize(p.type);
        if (t->tag != Tag::Sigma) throw TypeError("projection from a non-pair of type " + show(t, names(ctx)));
        E out = with(e, {p.expr});
        if (e->tag == Tag::Fst) return {out, t->kids[0]};
        return {out, normalize(instantiate(t->kids[1], mk::fst(p.expr)))};
    }
    case Tag::Id: {
        E a = check_type(ctx, e->kids[0]);
        E l = check(ctx, e->kids[1], a);
        E r = check(ctx, e->kids[2], a);
        return {with(e, {a, l, r}), mk::u()};
    }
    case Tag::IdOver: {
        std::vector<E> lefts, rights, kids{e->kids[0], nullptr, nullptr};
        for (std::size_t i = 3; i < e->kids.size(); ++i) {
            auto p = infer(ctx, e->kids[i]);
            E t = normalize(p.type);
            if (t->tag != Tag::Id && t->tag != Tag::IdOver)
                throw TypeError("path of non-identity type " + show(t, names(ctx)));
            lefts.push_back(t->kids[1]);
            rights.push_back(t->kids[2]);
            kids.push_back(p.expr);
        }
        E lt = check_type(ctx, normalize(mk::apps(e->kids[0], lefts)));
        E rt = check_type(ctx, normalize(mk::apps(e->kids[0], rights)));
        kids[1] = check(ctx, e->kids[1], lt);
        kids[2] = check(ctx, e->kids[2], rt);
        return {with(e, std::move(kids)), mk::u()};
    }
    }
    throw TypeError("unknown expression");
}

E check(const TypeContext& ctx, const E& e, const E& type) {
    E t = normalize(type);
    switch (e->tag) {
    case Tag::Lam: {
        if (t->tag != Tag::Pi) throw TypeError("lambda checked against " + show(t, names(ctx)));
        if (e->annot && !conv(e->annot, t->kids[0])) mismatch(ctx, "lambda domain", t->kids[0], e->annot);
        E body = check(extend(ctx, e->name, t->kids[0]), e->kids[0], t->kids[1]);
        return with(e, {body}, t->kids[0]);
    }
    case Tag::Pair: {
        if (t->tag != Tag::Sigma) throw TypeError("pair checked against " + show(t, names(ctx)));
        E a = check(ctx, e->kids[0], t->kids[0]);
        E b = check(ctx, e->kids[1], instantiate(t->kids[1], a));
        return with(e, {a, b});
    }
    case Tag::Refl: {
        if (t->tag == Tag::Id) {
            if (normalize(t->kids[0])->tag == Tag::Unit || conv(t->kids[1], t->kids[2])) return e;
            mismatch(ctx, "refl endpoints", t->kids[1], t->kids[2]);
        }
        if (t->tag == Tag::IdOver) {
            // set-level: the paths carry no information beyond their endpoints
            if (conv(t->kids[1], t->kids[2])) return e;
            mismatch(ctx, "refl endpoints", t->kids[1], t->kids[2]);
        }
        throw TypeError("refl checked against " + show(t, names(ctx)));
    }
    default: {
        auto got = infer(ctx, e);
        E g = normalize(got.type);
        if (!alpha_eq(g, t)) mismatch(ctx, "type mismatch", t, g);
        return got.expr;
    }
    }
}

} // namespace msk
