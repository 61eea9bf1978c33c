#include <algorithm>
#include <numeric>

#include "msk/errors.hpp"
#include "msk/translate.hpp"

namespace msk {

namespace {

V make(Value::Kind k) {
    auto v = std::make_shared<Value>();
    v->kind = k;
    return v;
}
V unit_value() {
    static V u = make(Value::Unit);
    return u;
}
V refl_value() {
    static V r = make(Value::Refl);
    return r;
}
V atom(const std::string& base, std::size_t i) {
    auto v = std::make_shared<Value>();
    v->kind = Value::Atom;
    v->base = base;
    v->atom = i;
    return v;
}
V pair_value(V a, V b) {
    auto v = std::make_shared<Value>();
    v->kind = Value::Pair;
    v->a = std::move(a);
    v->b = std::move(b);
    return v;
}

std::size_t index_in(const std::vector<V>& xs, const V& v) {
    auto it = std::lower_bound(xs.begin(), xs.end(), v, ValueLess{});
    if (it == xs.end() || compare(*it, v) != 0) throw TypeError("value " + show_value(v) + " outside its type");
    return static_cast<std::size_t>(it - xs.begin());
}

std::vector<V> restrict_env(const Model& m, const std::vector<V>& env, std::size_t s, std::size_t t) {
    std::vector<V> out;
    out.reserve(env.size());
    for (const auto& v : env) out.push_back(restrict_value(m, v, s, t));
    return out;
}

const V& lookup(const std::vector<V>& env, std::size_t index) {
    if (index >= env.size()) throw TypeError("unbound variable in interpretation");
    return env[env.size() - 1 - index];
}

// head and arguments of an application spine
E spine(const E& e, std::vector<E>& args) {
    if (e->tag != Tag::App) return e;
    E h = spine(e->kids[0], args);
    args.push_back(e->kids[1]);
    return h;
}

} // namespace

int compare(const V& x, const V& y) {
    if (x == y) return 0;
    if (x->kind != y->kind) return x->kind < y->kind ? -1 : 1;
    switch (x->kind) {
    case Value::Unit:
    case Value::Refl: return 0;
    case Value::Atom:
        if (x->base != y->base) return x->base < y->base ? -1 : 1;
        return x->atom == y->atom ? 0 : (x->atom < y->atom ? -1 : 1);
    case Value::Pair:
        if (int c = compare(x->a, y->a)) return c;
        return compare(x->b, y->b);
    case Value::Fun: {
        std::size_t n = std::min(x->table.size(), y->table.size());
        for (std::size_t i = 0; i < n; ++i) {
            const auto& [sx, ax, rx] = x->table[i];
            const auto& [sy, ay, ry] = y->table[i];
            if (sx != sy) return sx < sy ? -1 : 1;
            if (int c = compare(ax, ay)) return c;
            if (int c = compare(rx, ry)) return c;
        }
        return x->table.size() == y->table.size() ? 0 : (x->table.size() < y->table.size() ? -1 : 1);
    }
    }
    return 0;
}

std::string show_value(const V& v) {
    switch (v->kind) {
    case Value::Unit: return "tt";
    case Value::Refl: return "refl";
    case Value::Atom: return v->base + "." + std::to_string(v->atom);
    case Value::Pair: return "(" + show_value(v->a) + ", " + show_value(v->b) + ")";
    case Value::Fun: {
        std::string s = "{";
        for (std::size_t i = 0; i < v->table.size(); ++i) {
            const auto& [st, a, r] = v->table[i];
            s += (i ? "; " : "") + std::to_string(st) + ":" + show_value(a) + "->" + show_value(r);
        }
        return s + "}";
    }
    }
    return "?";
}

V restrict_value(const Model& m, const V& v, std::size_t s, std::size_t t) {
    if (s == t) return v;
    switch (v->kind) {
    case Value::Unit:
    case Value::Refl: return v;
    case Value::Atom: return m.bases.at(v->base).restrict(v, s, t);
    case Value::Pair: return pair_value(restrict_value(m, v->a, s, t), restrict_value(m, v->b, s, t));
    case Value::Fun: {
        auto out = std::make_shared<Value>();
        out->kind = Value::Fun;
        for (const auto& entry : v->table)
            if (m.base.leq(t, std::get<0>(entry))) out->table.push_back(entry);
        return out;
    }
    }
    return v;
}

std::vector<V> type_elements(const Model& m, const E& ty, std::size_t stage, const std::vector<V>& env,
                             Budget& budget) {
    switch (ty->tag) {
    case Tag::Unit: return {unit_value()};
    case Tag::U: throw OracleUnsupported("the universe has no finite interpretation");
    case Tag::Base:
    case Tag::App: {
        std::vector<E> args;
        E head = spine(ty, args);
        if (head->tag != Tag::Base) throw OracleUnsupported("type family variables are not interpreted");
        auto it = m.bases.find(head->name);
        if (it == m.bases.end()) throw UnknownName("no interpretation for base '" + head->name + "'");
        std::vector<V> vals;
        for (const auto& a : args) vals.push_back(evaluate(m, a, stage, env, budget));
        return it->second.elements(stage, vals);
    }
    case Tag::Sigma: {
        std::vector<V> out;
        for (const auto& a : type_elements(m, ty->kids[0], stage, env, budget)) {
            auto inner = env;
            inner.push_back(a);
            for (const auto& c : type_elements(m, ty->kids[1], stage, inner, budget)) {
                budget.charge();
                out.push_back(pair_value(a, c));
            }
        }
        return out;
    }
    case Tag::Pi: {
        // natural families over the stages above: one slot per (t, a)
        struct Slot {
            std::size_t t;
            V arg;
            std::vector<V> fiber;
        };
        std::vector<Slot> slots;
        std::map<std::size_t, std::vector<V>> envs, doms;
        SlotProblem p;
        // upper stages first, so links from lower slots prune immediately
        auto order = linear_extension(m.base.opposite());
        for (std::size_t t : order) {
            if (!m.base.leq(stage, t)) continue;
            envs[t] = restrict_env(m, env, stage, t);
            doms[t] = type_elements(m, ty->kids[0], t, envs[t], budget);
            for (const auto& a : doms[t]) {
                auto inner = envs[t];
                inner.push_back(a);
                Slot sl{t, a, type_elements(m, ty->kids[1], t, inner, budget)};
                p.add_slot(iota(sl.fiber.size()));
                slots.push_back(std::move(sl));
            }
        }
        std::map<std::pair<std::size_t, std::size_t>, std::size_t> where;  // (t, arg index) -> slot
        {
            std::size_t k = 0;
            for (std::size_t t : order)
                if (doms.count(t))
                    for (std::size_t i = 0; i < doms[t].size(); ++i) where[{t, i}] = k++;
        }
        for (std::size_t k = 0; k < slots.size(); ++k) {
            const auto& sl = slots[k];
            for (auto [a, b] : m.base.covers()) {
                if (a != sl.t) continue;
                std::size_t target = where.at({b, index_in(doms[b], restrict_value(m, sl.arg, a, b))});
                Table map;
                for (const auto& c : sl.fiber) map.push_back(index_in(slots[target].fiber, restrict_value(m, c, a, b)));
                p.link(k, target, std::move(map));
            }
        }
        std::vector<V> out;
        for (const auto& sol : solve_all(p, budget)) {
            auto f = std::make_shared<Value>();
            f->kind = Value::Fun;
            for (std::size_t k = 0; k < slots.size(); ++k)
                f->table.emplace_back(slots[k].t, slots[k].arg, slots[k].fiber[sol[k]]);
            std::sort(f->table.begin(), f->table.end(), [](const auto& x, const auto& y) {
                if (std::get<0>(x) != std::get<0>(y)) return std::get<0>(x) < std::get<0>(y);
                return compare(std::get<1>(x), std::get<1>(y)) < 0;
            });
            out.push_back(f);
        }
        std::sort(out.begin(), out.end(), ValueLess{});
        return out;
    }
    case Tag::Id:
    case Tag::IdOver: {
        V l = evaluate(m, ty->kids[1], stage, env, budget);
        V r = evaluate(m, ty->kids[2], stage, env, budget);
        if (compare(l, r) == 0) return {refl_value()};
        return {};
    }
    case Tag::Var:
    case Tag::Fst:
    case Tag::Snd: throw OracleUnsupported("type variables are not interpreted");
    default: throw TypeError("not a type: " + show(ty));
    }
}

V evaluate(const Model& m, const E& term, std::size_t stage, const std::vector<V>& env, Budget& budget) {
    switch (term->tag) {
    case Tag::Var: return lookup(env, term->index);
    case Tag::Tt: return unit_value();
    case Tag::Refl: return refl_value();
    case Tag::Pair:
        return pair_value(evaluate(m, term->kids[0], stage, env, budget), evaluate(m, term->kids[1], stage, env, budget));
    case Tag::Fst:
    case Tag::Snd: {
        V p = evaluate(m, term->kids[0], stage, env, budget);
        if (p->kind != Value::Pair) throw TypeError("projection of a non-pair value");
        return term->tag == Tag::Fst ? p->a : p->b;
    }
    case Tag::App: {
        V f = evaluate(m, term->kids[0], stage, env, budget);
        V a = evaluate(m, term->kids[1], stage, env, budget);
        if (f->kind != Value::Fun) throw TypeError("application of a non-function value");
        for (const auto& [t, arg, res] : f->table)
            if (t == stage && compare(arg, a) == 0) return res;
        throw TypeError("argument " + show_value(a) + " outside the function's domain");
    }
    case Tag::Lam: {
        if (!term->annot) throw TypeError("lambda without a domain; typecheck first");
        auto f = std::make_shared<Value>();
        f->kind = Value::Fun;
        for (std::size_t t = 0; t < m.base.size(); ++t) {
            if (!m.base.leq(stage, t)) continue;
            auto rt = restrict_env(m, env, stage, t);
            for (const auto& a : type_elements(m, term->annot, t, rt, budget)) {
                auto inner = rt;
                inner.push_back(a);
                f->table.emplace_back(t, a, evaluate(m, term->kids[0], t, inner, budget));
            }
        }
        return f;
    }
    default: throw OracleUnsupported("types as values are not interpreted: " + show(term));
    }
}

Model copresheaf_model(const Poset& base, const std::map<std::string, Copresheaf>& env) {
    Model m{base, {}};
    for (const auto& [name, x] : env) {
        if (!(x.base() == base)) throw BaseMismatch("base '" + name + "' lives over another poset");
        BaseSemantics b;
        b.elements = [name, x](std::size_t s, const std::vector<V>& args) {
            if (!args.empty()) throw TypeError("base '" + name + "' takes no arguments");
            std::vector<V> out;
            for (std::size_t i = 0; i < x.card(s); ++i) out.push_back(atom(name, i));
            return out;
        };
        b.restrict = [name, x](const V& v, std::size_t s, std::size_t t) { return atom(name, x.apply(s, t, v->atom)); };
        m.bases[name] = std::move(b);
    }
    return m;
}

Copresheaf glued_copresheaf(const GluedDecl& d) {
    if (d.relation_cards.size() != d.static_card)
        throw SchemaError("base '" + d.name + "': relation needs one cardinality per static element");
    Table edge;
    for (std::size_t i = 0; i < d.static_card; ++i) edge.insert(edge.end(), d.relation_cards[i], i);
    std::size_t total = edge.size();
    return Copresheaf(Poset::chain(2), {total, d.static_card}, {{{0, 1}, edge}});
}

Model glued_set_model(const std::vector<GluedDecl>& decls) {
    Model m{Poset::point(), {}};
    auto same = [](const V& v, std::size_t, std::size_t) { return v; };
    for (const auto& d : decls) {
        if (d.relation_cards.size() != d.static_card)
            throw SchemaError("base '" + d.name + "': relation needs one cardinality per static element");
        std::string name = d.name, rel = d.name + "_r";
        std::size_t n = d.static_card;
        auto cards = d.relation_cards;
        m.bases[name] = {[name, n](std::size_t, const std::vector<V>& args) {
                             if (!args.empty()) throw TypeError("base '" + name + "' takes no arguments");
                             std::vector<V> out;
                             for (std::size_t i = 0; i < n; ++i) out.push_back(atom(name, i));
                             return out;
                         },
                         same};
        m.bases[rel] = {[rel, name, cards](std::size_t, const std::vector<V>& args) {
                            if (args.size() != 1 || args[0]->kind != Value::Atom || args[0]->base != name)
                                throw TypeError("'" + rel + "' expects one element of " + name);
                            std::vector<V> out;
                            for (std::size_t i = 0; i < cards.at(args[0]->atom); ++i) out.push_back(atom(rel, i));
                            return out;
                        },
                        same};
    }
    return m;
}

Copresheaf interpret_model(const E& ty, const Model& m, std::size_t budget_limit) {
    Budget budget(budget_limit);
    E t = normalize(ty);
    std::vector<std::vector<V>> elems;
    std::vector<std::size_t> cards;
    for (std::size_t s = 0; s < m.base.size(); ++s) {
        elems.push_back(type_elements(m, t, s, {}, budget));
        cards.push_back(elems.back().size());
    }
    std::map<Edge, Table> edges;
    for (auto [a, b] : m.base.covers()) {
        Table tab;
        for (const auto& v : elems[a]) tab.push_back(index_in(elems[b], restrict_value(m, v, a, b)));
        edges[{a, b}] = std::move(tab);
    }
    return Copresheaf(m.base, cards, edges);
}

TranslationVerdict check_translation(const E& ty, const std::vector<GluedDecl>& env, std::size_t budget_limit) {
    TranslationVerdict out;
    TypeContext src;
    std::map<std::string, Copresheaf> direct_env;
    std::vector<std::string> names;
    for (const auto& d : env) {
        src.bases[d.name] = mk::u();
        direct_env[d.name] = glued_copresheaf(d);
        names.push_back(d.name);
    }
    E checked = check_type(src, ty);
    out.direct = interpret_model(checked, copresheaf_model(Poset::chain(2), direct_env), budget_limit);

    out.glued = translate_two(checked);
    TypeContext tgt = target_context(names, shape_named("two"));
    E stat = check_type(tgt, out.glued.stat);
    check(tgt, out.glued.relation, mk::arrow(stat, mk::u()));
    TypeContext fam = tgt;
    fam.vars.emplace_back("y", stat);
    E body = check_type(fam, normalize(mk::app(shift(out.glued.relation, 1), mk::var(0))));

    Model sets = glued_set_model(env);
    Budget budget(budget_limit);
    auto statics = type_elements(sets, stat, 0, {}, budget);
    Table edge;
    std::vector<std::size_t> fiber_sizes;
    for (std::size_t i = 0; i < statics.size(); ++i) {
        auto fiber = type_elements(sets, body, 0, {statics[i]}, budget);
        fiber_sizes.push_back(fiber.size());
        edge.insert(edge.end(), fiber.size(), i);
    }
    out.reassembled = Copresheaf(Poset::chain(2), {edge.size(), statics.size()}, {{{0, 1}, edge}});

    // over {0<1} an object is a map; iso iff the fiber sizes agree as multisets
    auto fibers_of = [](const Copresheaf& x) {
        std::vector<std::vector<std::size_t>> f(x.card(1));
        const auto& e = x.edge(0, 1);
        for (std::size_t k = 0; k < e.size(); ++k) f[e[k]].push_back(k);
        return f;
    };
    auto fd = fibers_of(out.direct), fr = fibers_of(out.reassembled);
    auto by_size = [](const std::vector<std::vector<std::size_t>>& f) {
        std::vector<std::size_t> order(f.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return f[a].size() < f[b].size(); });
        return order;
    };
    auto od = by_size(fd), orr = by_size(fr);
    out.iso = fd.size() == fr.size();
    for (std::size_t i = 0; out.iso && i < od.size(); ++i) out.iso = fd[od[i]].size() == fr[orr[i]].size();
    if (out.iso) {
        Table c0(out.direct.card(0)), c1(out.direct.card(1));
        for (std::size_t i = 0; i < od.size(); ++i) {
            c1[od[i]] = orr[i];
            for (std::size_t k = 0; k < fd[od[i]].size(); ++k) c0[fd[od[i]][k]] = fr[orr[i]][k];
        }
        out.witness = NatMap(out.direct, out.reassembled, {c0, c1});
    }
    auto card = [](const Copresheaf& x) {
        return "{" + std::to_string(x.card(0)) + "," + std::to_string(x.card(1)) + "}";
    };
    out.detail = "direct " + card(out.direct) + ", reassembled " + card(out.reassembled) + (out.iso ? ", iso" : ", not iso");
    return out;
}

} // namespace msk
