#include "msk/translate.hpp"

#include <algorithm>
#include <functional>

#include "msk/errors.hpp"

namespace msk {

std::vector<std::size_t> Shape::above(std::size_t j) const {
    std::vector<std::size_t> out;
    for (auto k : levels)
        if (poset.lt(j, k)) out.push_back(k);
    return out;
}

std::vector<std::size_t> Shape::at_least(std::size_t j) const {
    std::vector<std::size_t> out;
    for (auto k : levels)
        if (poset.leq(j, k)) out.push_back(k);
    return out;
}

std::size_t Shape::position(std::size_t element) const {
    auto it = std::find(levels.begin(), levels.end(), element);
    if (it == levels.end()) throw UnknownElement("element not in shape");
    return static_cast<std::size_t>(it - levels.begin());
}

Shape shape_named(const std::string& name) {
    Shape s;
    s.name = name;
    if (name == "two") {
        s.poset = Poset::chain(2);
        s.binder_suffix = {"_r", ""};
        s.decl_suffix = {"_r", ""};
    } else if (name == "span" || name == "chain3") {
        s.poset = name == "span" ? Poset::build({"0", "1", "01"}, {{"01", "0"}, {"01", "1"}}) : Poset::chain(3);
        for (const auto& e : s.poset.elements()) {
            s.binder_suffix.push_back(e);
            s.decl_suffix.push_back("_" + e);
        }
    } else {
        throw UnknownName("no shape named '" + name + "' (expected two, span or chain3)");
    }
    s.levels = linear_extension(s.poset.opposite());
    return s;
}

namespace {

using Vals = std::map<std::size_t, E>;

std::string stem_of(const E& t) {
    switch (t->tag) {
    case Tag::U: return "B";
    case Tag::Pi: return "f";
    case Tag::Sigma: return "p";
    case Tag::Id: return "e";
    default: return "y";
    }
}

struct Translator {
    const Shape& s;
    std::vector<std::vector<E>> env;  // source variables, outermost first; per element
    std::size_t depth = 0;

    std::vector<E> pick(const Vals& xs, const std::vector<std::size_t>& ks) const {
        std::vector<E> out;
        for (auto k : ks) out.push_back(xs.at(k));
        return out;
    }

    // Π (or λ when dom is empty) over one binder per element of ks
    E bind(const std::vector<std::size_t>& ks, std::size_t idx, Vals& xs, const std::string& stem,
           const std::function<E(std::size_t, const Vals&)>* dom, const std::function<E()>& body) {
        if (idx == ks.size()) return body();
        std::size_t k = ks[idx];
        E d = dom ? (*dom)(k, xs) : nullptr;
        xs[k] = mk::lvl(depth++);
        E rest = bind(ks, idx + 1, xs, stem, dom, body);
        --depth;
        xs.erase(k);
        std::string n = stem + s.binder_suffix[k];
        return dom ? mk::pi(n, d, rest) : mk::lam(n, rest);
    }

    void push_var(const Vals& comps) {
        std::vector<E> row(s.poset.size());
        for (const auto& [k, e] : comps) row[k] = e;
        env.push_back(std::move(row));
    }

    E type(const E& t, std::size_t j, const Vals& vals) {
        auto above = s.above(j);
        switch (t->tag) {
        case Tag::U: {
            Vals xs;
            std::function<E(std::size_t, const Vals&)> dom = [&](std::size_t k, const Vals& bound) {
                return mk::apps(vals.at(k), pick(bound, s.above(k)));
            };
            return bind(above, 0, xs, "x", &dom, [] { return mk::u(); });
        }
        case Tag::Unit: return mk::unit();
        case Tag::Base: return mk::apps(mk::base(t->name + s.decl_suffix[j]), pick(vals, above));
        case Tag::Pi: {
            const E& a = t->kids[0];
            const E& c = t->kids[1];
            Vals xs;
            std::function<E(std::size_t, const Vals&)> dom = [&](std::size_t k, const Vals& bound) {
                Vals v;
                for (auto l : s.above(k)) v[l] = bound.at(l);
                return type(a, k, v);
            };
            std::string stem = t->name == "_" || t->name.empty() ? "x" : t->name;
            return bind(s.at_least(j), 0, xs, stem, &dom, [&] {
                Vals applied;
                for (auto k : above) applied[k] = mk::apps(vals.at(k), pick(xs, s.at_least(k)));
                push_var(xs);
                E r = type(c, j, applied);
                env.pop_back();
                return r;
            });
        }
        case Tag::Sigma: {
            Vals firsts, seconds;
            for (auto k : above) {
                firsts[k] = mk::fst(vals.at(k));
                seconds[k] = mk::snd(vals.at(k));
            }
            E dom = type(t->kids[0], j, firsts);
            Vals comps = firsts;
            comps[j] = mk::lvl(depth++);
            push_var(comps);
            E body = type(t->kids[1], j, seconds);
            env.pop_back();
            --depth;
            std::string stem = t->name == "_" || t->name.empty() ? "x" : t->name;
            return mk::sigma(stem + s.binder_suffix[j], dom, body);
        }
        case Tag::Id: {
            E l = term(t->kids[1], j), r = term(t->kids[2], j);
            if (above.empty()) return mk::id(type(t->kids[0], j, {}), l, r);
            return mk::id_over(term(t->kids[0], j), pick(vals, above), l, r);
        }
        case Tag::Var:
        case Tag::App:
        case Tag::Fst:
        case Tag::Snd: return mk::apps(term(t, j), pick(vals, above));
        default: throw UnsupportedConstruct("expression in type position: " + show(t));
        }
    }

    E term(const E& t, std::size_t j) {
        switch (t->tag) {
        case Tag::Var: {
            if (t->index >= env.size()) throw UnsupportedConstruct("free variable in translated expression");
            E c = env[env.size() - 1 - t->index][j];
            if (!c) throw UnsupportedConstruct("variable has no component at " + s.poset.name(j));
            return c;
        }
        case Tag::Tt:
        case Tag::Refl: return t;
        case Tag::Base: return mk::base(t->name + s.decl_suffix[j]);
        case Tag::App: {
            E f = term(t->kids[0], j);
            std::vector<E> args;
            for (auto k : s.at_least(j)) args.push_back(term(t->kids[1], k));
            return mk::apps(f, args);
        }
        case Tag::Lam: {
            Vals xs;
            std::string stem = t->name == "_" || t->name.empty() ? "x" : t->name;
            return bind(s.at_least(j), 0, xs, stem, nullptr, [&] {
                push_var(xs);
                E r = term(t->kids[0], j);
                env.pop_back();
                return r;
            });
        }
        case Tag::Pair: return mk::pair(term(t->kids[0], j), term(t->kids[1], j));
        case Tag::Fst: return mk::fst(term(t->kids[0], j));
        case Tag::Snd: return mk::snd(term(t->kids[0], j));
        case Tag::U:
        case Tag::Unit:
        case Tag::Pi:
        case Tag::Sigma:
        case Tag::Id: {
            Vals ys;
            return bind(s.above(j), 0, ys, stem_of(t), nullptr, [&] { return type(t, j, ys); });
        }
        default: throw UnsupportedConstruct("cannot translate " + show(t));
        }
    }

    E component(const E& t, std::size_t j) { return s.above(j).empty() ? type(t, j, {}) : term(t, j); }
};

} // namespace

std::vector<E> translate_sketch(const E& ty, const Shape& s) {
    Translator tr{s, {}, 0};
    std::vector<E> out;
    for (auto j : s.levels) out.push_back(normalize(close_levels(tr.component(ty, j), 0)));
    return out;
}

GluedType translate_two(const E& ty) {
    auto c = translate_sketch(ty, shape_named("two"));
    return {c[0], c[1]};
}

std::vector<E> translate_open(const E& expr, const Shape& s, std::size_t vars) {
    Translator tr{s, {}, 0};
    std::size_t n = s.levels.size();
    for (std::size_t v = 0; v < vars; ++v) {
        Vals comps;
        for (std::size_t p = 0; p < n; ++p) comps[s.levels[p]] = mk::lvl(v * n + p);
        tr.push_var(comps);
    }
    tr.depth = vars * n;
    std::vector<E> out;
    for (auto j : s.levels) out.push_back(tr.component(expr, j));
    return out;
}

E replace_levels(const E& e, const std::vector<E>& values) {
    if (e->tag == Tag::Lvl)
        return e->index < values.size() ? values[e->index] : mk::lvl(e->index - values.size());
    auto n = std::make_shared<Expr>(*e);
    for (auto& k : n->kids) k = replace_levels(k, values);
    if (n->annot) n->annot = replace_levels(n->annot, values);
    return n;
}

TypeContext target_context(const std::vector<std::string>& bases, const Shape& s) {
    TypeContext ctx;
    for (const auto& b : bases) {
        std::vector<E> comps;
        for (auto j : s.levels) comps.push_back(mk::base(b + s.decl_suffix[j]));
        auto types = component_types(comps, s);
        for (std::size_t p = 0; p < s.levels.size(); ++p) ctx.bases[b + s.decl_suffix[s.levels[p]]] = types[p];
    }
    return ctx;
}

std::vector<E> component_types(const std::vector<E>& comps, const Shape& s) {
    Translator tr{s, {}, 0};
    std::vector<E> out;
    for (auto j : s.levels) {
        Vals vals;
        for (auto k : s.above(j)) vals[k] = comps.at(s.position(k));
        out.push_back(normalize(close_levels(tr.type(mk::u(), j, vals), 0)));
    }
    return out;
}

// ---- corpus

namespace {

struct CorpusGen {
    std::vector<std::string> bases;

    // ctx: variable types, outermost first, each relative to its own prefix
    std::vector<E> atoms(const std::vector<E>& ctx) const {
        std::vector<E> out{mk::unit()};
        for (const auto& b : bases) out.push_back(mk::base(b));
        std::size_t n = ctx.size();
        for (std::size_t i = 0; i < n; ++i) {
            E ti = shift(ctx[i], static_cast<std::ptrdiff_t>(n - i));  // into the full context
            if (ti->tag != Tag::Unit && ti->tag != Tag::Base) continue;
            for (std::size_t k = i; k < n; ++k) {
                E tk = shift(ctx[k], static_cast<std::ptrdiff_t>(n - k));
                if (!alpha_eq(ti, tk)) continue;
                out.push_back(mk::id(ti, mk::var(n - 1 - i), mk::var(n - 1 - k)));
            }
        }
        return out;
    }

    std::vector<E> exactly(const std::vector<E>& ctx, std::size_t d) const {
        if (d == 0) return atoms(ctx);
        std::vector<E> out;
        for (const auto& dom : atoms(ctx)) {
            auto inner = ctx;
            inner.push_back(dom);
            for (const auto& c : exactly(inner, d - 1)) {
                out.push_back(mk::pi("x" + std::to_string(ctx.size()), dom, c));
                out.push_back(mk::sigma("x" + std::to_string(ctx.size()), dom, c));
            }
        }
        return out;
    }
};

} // namespace

std::vector<E> type_corpus(const std::vector<std::string>& bases, std::size_t depth, std::size_t limit) {
    CorpusGen g{bases};
    std::vector<E> out;
    for (std::size_t d = 0; d <= depth && out.size() < limit; ++d) {
        auto layer = g.exactly({}, d);
        std::size_t room = limit - out.size();
        std::size_t stride = layer.size() <= room ? 1 : (layer.size() + room - 1) / room;
        for (std::size_t i = 0; i < layer.size() && out.size() < limit; i += stride) out.push_back(layer[i]);
    }
    return out;
}

} // namespace msk
