#include "msk/copresheaf.hpp"

#include <algorithm>
#include <numeric>

#include "msk/errors.hpp"

namespace msk {

Table compose(const Table& g, const Table& f) {
    Table r(f.size());
    for (std::size_t x = 0; x < f.size(); ++x) r[x] = g.at(f[x]);
    return r;
}

Table identity_table(std::size_t n) { return iota(n); }

Table constant_table(std::size_t n, std::size_t value) { return Table(n, value); }

bool is_bijection(const Table& t, std::size_t codomain) {
    if (t.size() != codomain) return false;
    std::vector<bool> hit(codomain, false);
    for (auto v : t) {
        if (v >= codomain || hit[v]) return false;
        hit[v] = true;
    }
    return true;
}

static std::string edge_label(const Poset& p, std::size_t a, std::size_t b) {
    return p.name(a) + "<" + p.name(b);
}

Copresheaf::Copresheaf() : Copresheaf(Poset(), {}, {}) {}

Copresheaf::Copresheaf(Poset base, std::vector<std::size_t> card, std::map<Edge, Table> edges) {
    const std::size_t n = base.size();
    if (card.size() != n) throw SchemaError("card has " + std::to_string(card.size()) + " entries, base has " + std::to_string(n));
    for (auto& [e, t] : edges) {
        if (e.first >= n || e.second >= n || !base.is_cover(e.first, e.second))
            throw SchemaError("edge table on a non-cover pair");
        if (t.size() != card[e.first])
            throw SchemaError("edge " + edge_label(base, e.first, e.second) + " has wrong length");
        for (auto v : t)
            if (v >= card[e.second])
                throw SchemaError("edge " + edge_label(base, e.first, e.second) + " leaves its codomain");
    }
    for (auto& c : base.covers())
        if (!edges.count(c)) throw SchemaError("missing edge " + edge_label(base, c.first, c.second));

    std::vector<Table> trans(n * n);
    auto ext = linear_extension(base);
    for (std::size_t b = 0; b < n; ++b) {
        for (auto it = ext.rbegin(); it != ext.rend(); ++it) {
            std::size_t a = *it;
            if (!base.leq(a, b)) continue;
            if (a == b) {
                trans[a * n + b] = identity_table(card[a]);
                continue;
            }
            bool first = true;
            Table& out = trans[a * n + b];
            for (auto& [lo, hi] : base.covers()) {
                if (lo != a || !base.leq(hi, b)) continue;
                Table cand = compose(trans[hi * n + b], edges.at({lo, hi}));
                if (first) {
                    out = std::move(cand);
                    first = false;
                } else if (cand != out) {
                    throw NotFunctorial("paths from " + base.name(a) + " to " + base.name(b) + " disagree");
                }
            }
        }
    }
    auto d = std::make_shared<Data>();
    d->base = std::move(base);
    d->card = std::move(card);
    d->edges = std::move(edges);
    d->trans = std::move(trans);
    d_ = std::move(d);
}

Copresheaf Copresheaf::from_function(Poset base, std::vector<std::size_t> card,
                                     const std::function<std::size_t(std::size_t, std::size_t, std::size_t)>& f) {
    std::map<Edge, Table> edges;
    for (auto& [a, b] : base.covers()) {
        Table t(card.at(a));
        for (std::size_t x = 0; x < t.size(); ++x) t[x] = f(a, b, x);
        edges[{a, b}] = std::move(t);
    }
    return Copresheaf(std::move(base), std::move(card), std::move(edges));
}

const Table& Copresheaf::edge(std::size_t a, std::size_t b) const {
    auto it = d_->edges.find({a, b});
    if (it == d_->edges.end()) throw NotComparable("not a cover pair");
    return it->second;
}

const Table& Copresheaf::transition(std::size_t a, std::size_t b) const {
    const std::size_t n = d_->base.size();
    if (a >= n || b >= n) throw UnknownElement("element index out of range");
    if (!d_->base.leq(a, b))
        throw NotComparable(d_->base.name(a) + " is not below " + d_->base.name(b));
    return d_->trans[a * n + b];
}

bool operator==(const Copresheaf& x, const Copresheaf& y) {
    if (x.d_ == y.d_) return true;
    return x.d_->base == y.d_->base && x.d_->card == y.d_->card && x.d_->edges == y.d_->edges;
}

void require_same_base(const Poset& a, const Poset& b) {
    if (!(a == b)) throw BaseMismatch("copresheaves live over different bases");
}

NatMap::NatMap(Copresheaf source, Copresheaf target, std::vector<Table> comps)
    : src_(std::move(source)), tgt_(std::move(target)), comps_(std::move(comps)) {
    require_same_base(src_.base(), tgt_.base());
    const auto& p = src_.base();
    if (comps_.size() != p.size()) throw SchemaError("natural map has wrong number of components");
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (comps_[i].size() != src_.card(i)) throw SchemaError("component at " + p.name(i) + " has wrong length");
        for (auto v : comps_[i])
            if (v >= tgt_.card(i)) throw SchemaError("component at " + p.name(i) + " leaves its codomain");
    }
    for (auto& [a, b] : p.covers()) {
        const auto& sx = src_.edge(a, b);
        const auto& ty = tgt_.edge(a, b);
        for (std::size_t x = 0; x < sx.size(); ++x)
            if (ty[comps_[a][x]] != comps_[b][sx[x]])
                throw NotNatural("square at " + edge_label(p, a, b) + " does not commute");
    }
}

NatMap NatMap::identity(const Copresheaf& x) {
    std::vector<Table> c;
    for (auto n : x.cards()) c.push_back(identity_table(n));
    return NatMap(x, x, std::move(c));
}

NatMap compose(const NatMap& g, const NatMap& f) {
    if (!(f.target() == g.source())) throw BaseMismatch("maps are not composable");
    std::vector<Table> c;
    for (std::size_t i = 0; i < f.comps().size(); ++i) c.push_back(compose(g.at(i), f.at(i)));
    return NatMap(f.source(), g.target(), std::move(c));
}

bool is_iso(const NatMap& f) {
    for (std::size_t i = 0; i < f.comps().size(); ++i)
        if (!is_bijection(f.at(i), f.target().card(i))) return false;
    return true;
}

bool is_mono(const NatMap& f) {
    for (auto& t : f.comps()) {
        auto s = t;
        std::sort(s.begin(), s.end());
        if (std::adjacent_find(s.begin(), s.end()) != s.end()) return false;
    }
    return true;
}

NatMap inverse(const NatMap& f) {
    if (!is_iso(f)) throw PreconditionFailed("map is not invertible");
    std::vector<Table> c;
    for (auto& t : f.comps()) {
        Table inv(t.size());
        for (std::size_t x = 0; x < t.size(); ++x) inv[t[x]] = x;
        c.push_back(std::move(inv));
    }
    return NatMap(f.target(), f.source(), std::move(c));
}

Copresheaf terminal(const Poset& base) {
    return Copresheaf::from_function(base, std::vector<std::size_t>(base.size(), 1),
                                     [](std::size_t, std::size_t, std::size_t) { return std::size_t{0}; });
}

Copresheaf initial(const Poset& base) {
    return Copresheaf::from_function(base, std::vector<std::size_t>(base.size(), 0),
                                     [](std::size_t, std::size_t, std::size_t) { return std::size_t{0}; });
}

NatMap to_terminal(const Copresheaf& x) {
    std::vector<Table> c;
    for (auto n : x.cards()) c.push_back(constant_table(n, 0));
    return NatMap(x, terminal(x.base()), std::move(c));
}

NatMap from_initial(const Copresheaf& x) {
    return NatMap(initial(x.base()), x, std::vector<Table>(x.base().size()));
}

Cone product(const Copresheaf& x, const Copresheaf& y) {
    require_same_base(x.base(), y.base());
    const auto& p = x.base();
    std::vector<std::size_t> card(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) card[i] = x.card(i) * y.card(i);
    auto obj = Copresheaf::from_function(p, card, [&](std::size_t a, std::size_t b, std::size_t e) {
        std::size_t ny = y.card(a);
        return x.edge(a, b)[e / ny] * y.card(b) + y.edge(a, b)[e % ny];
    });
    std::vector<Table> px(p.size()), py(p.size());
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t e = 0; e < card[i]; ++e) {
            px[i].push_back(e / y.card(i));
            py[i].push_back(e % y.card(i));
        }
    return Cone{obj, {NatMap(obj, x, px), NatMap(obj, y, py)}};
}

// Subsets of pairs, lexicographic, with edge maps induced from X x Y.
static Cone pair_subobject(const Copresheaf& x, const Copresheaf& y,
                           const std::function<bool(std::size_t i, std::size_t a, std::size_t b)>& keep) {
    const auto& p = x.base();
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> elems(p.size());
    std::vector<std::map<std::pair<std::size_t, std::size_t>, std::size_t>> index(p.size());
    std::vector<std::size_t> card(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        for (std::size_t a = 0; a < x.card(i); ++a)
            for (std::size_t b = 0; b < y.card(i); ++b)
                if (keep(i, a, b)) {
                    index[i][{a, b}] = elems[i].size();
                    elems[i].emplace_back(a, b);
                }
        card[i] = elems[i].size();
    }
    auto obj = Copresheaf::from_function(p, card, [&](std::size_t lo, std::size_t hi, std::size_t e) {
        auto [a, b] = elems[lo][e];
        return index[hi].at({x.edge(lo, hi)[a], y.edge(lo, hi)[b]});
    });
    std::vector<Table> px(p.size()), py(p.size());
    for (std::size_t i = 0; i < p.size(); ++i)
        for (auto [a, b] : elems[i]) {
            px[i].push_back(a);
            py[i].push_back(b);
        }
    return Cone{obj, {NatMap(obj, x, px), NatMap(obj, y, py)}};
}

Cone pullback(const NatMap& f, const NatMap& g) {
    if (!(f.target() == g.target())) throw BaseMismatch("pullback of maps with different codomains");
    return pair_subobject(f.source(), g.source(),
                          [&](std::size_t i, std::size_t a, std::size_t b) { return f.at(i)[a] == g.at(i)[b]; });
}

Cone equalizer(const NatMap& f, const NatMap& g) {
    if (!(f.source() == g.source()) || !(f.target() == g.target()))
        throw BaseMismatch("equalizer of non-parallel maps");
    const auto& x = f.source();
    const auto& p = x.base();
    std::vector<Table> keep(p.size());
    std::vector<std::vector<std::size_t>> index(p.size());
    std::vector<std::size_t> card(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        index[i].assign(x.card(i), 0);
        for (std::size_t a = 0; a < x.card(i); ++a)
            if (f.at(i)[a] == g.at(i)[a]) {
                index[i][a] = keep[i].size();
                keep[i].push_back(a);
            }
        card[i] = keep[i].size();
    }
    auto obj = Copresheaf::from_function(p, card, [&](std::size_t lo, std::size_t hi, std::size_t e) {
        return index[hi][x.edge(lo, hi)[keep[lo][e]]];
    });
    return Cone{obj, {NatMap(obj, x, keep)}};
}

Cone coproduct(const Copresheaf& x, const Copresheaf& y) {
    require_same_base(x.base(), y.base());
    const auto& p = x.base();
    std::vector<std::size_t> card(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) card[i] = x.card(i) + y.card(i);
    auto obj = Copresheaf::from_function(p, card, [&](std::size_t a, std::size_t b, std::size_t e) {
        if (e < x.card(a)) return x.edge(a, b)[e];
        return x.card(b) + y.edge(a, b)[e - x.card(a)];
    });
    std::vector<Table> ix(p.size()), iy(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        ix[i] = identity_table(x.card(i));
        for (std::size_t e = 0; e < y.card(i); ++e) iy[i].push_back(x.card(i) + e);
    }
    return Cone{obj, {NatMap(x, obj, ix), NatMap(y, obj, iy)}};
}

static std::size_t find_root(std::vector<std::size_t>& parent, std::size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
}

Cone pushout(const NatMap& f, const NatMap& g) {
    if (!(f.source() == g.source())) throw BaseMismatch("pushout of maps with different domains");
    const auto& x = f.target();
    const auto& y = g.target();
    require_same_base(x.base(), y.base());
    const auto& p = x.base();
    const auto& z = f.source();
    std::vector<Table> cls(p.size());  // disjoint-union element -> class
    std::vector<std::size_t> card(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        std::size_t nx = x.card(i), n = nx + y.card(i);
        std::vector<std::size_t> parent = iota(n);
        for (std::size_t e = 0; e < z.card(i); ++e) {
            auto r1 = find_root(parent, f.at(i)[e]);
            auto r2 = find_root(parent, nx + g.at(i)[e]);
            if (r1 != r2) parent[std::max(r1, r2)] = std::min(r1, r2);
        }
        std::map<std::size_t, std::size_t> id;
        cls[i].resize(n);
        for (std::size_t e = 0; e < n; ++e) {
            auto r = find_root(parent, e);
            auto it = id.find(r);
            if (it == id.end()) it = id.emplace(r, id.size()).first;
            cls[i][e] = it->second;
        }
        card[i] = id.size();
    }
    auto obj = Copresheaf::from_function(p, card, [&](std::size_t a, std::size_t b, std::size_t c) {
        std::size_t e = std::find(cls[a].begin(), cls[a].end(), c) - cls[a].begin();
        std::size_t img = e < x.card(a) ? x.edge(a, b)[e] : x.card(b) + y.edge(a, b)[e - x.card(a)];
        return cls[b][img];
    });
    std::vector<Table> ix(p.size()), iy(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        for (std::size_t e = 0; e < x.card(i); ++e) ix[i].push_back(cls[i][e]);
        for (std::size_t e = 0; e < y.card(i); ++e) iy[i].push_back(cls[i][x.card(i) + e]);
    }
    return Cone{obj, {NatMap(x, obj, ix), NatMap(y, obj, iy)}};
}

Cone image(const NatMap& f) {
    const auto& y = f.target();
    const auto& p = y.base();
    std::vector<Table> members(p.size());
    std::vector<std::vector<std::size_t>> index(p.size());
    std::vector<std::size_t> card(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        std::vector<bool> hit(y.card(i), false);
        for (auto v : f.at(i)) hit[v] = true;
        index[i].assign(y.card(i), 0);
        for (std::size_t v = 0; v < y.card(i); ++v)
            if (hit[v]) {
                index[i][v] = members[i].size();
                members[i].push_back(v);
            }
        card[i] = members[i].size();
    }
    auto obj = Copresheaf::from_function(p, card, [&](std::size_t a, std::size_t b, std::size_t e) {
        return index[b][y.edge(a, b)[members[a][e]]];
    });
    std::vector<Table> onto(p.size());
    for (std::size_t i = 0; i < p.size(); ++i)
        for (auto v : f.at(i)) onto[i].push_back(index[i][v]);
    return Cone{obj, {NatMap(f.source(), obj, onto), NatMap(obj, y, members)}};
}

NatMap pair_map(const Cone& prod, const NatMap& f, const NatMap& g) {
    const auto& p = prod.object.base();
    std::vector<Table> c(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        std::size_t ny = prod.legs[1].target().card(i);
        for (std::size_t w = 0; w < f.at(i).size(); ++w) c[i].push_back(f.at(i)[w] * ny + g.at(i)[w]);
    }
    return NatMap(f.source(), prod.object, std::move(c));
}

NatMap pullback_pair(const Cone& pb, const NatMap& u, const NatMap& v) {
    const auto& p = pb.object.base();
    std::vector<Table> c(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        std::map<std::pair<std::size_t, std::size_t>, std::size_t> index;
        for (std::size_t e = 0; e < pb.object.card(i); ++e) index[{pb.legs[0].at(i)[e], pb.legs[1].at(i)[e]}] = e;
        for (std::size_t w = 0; w < u.at(i).size(); ++w) {
            auto it = index.find({u.at(i)[w], v.at(i)[w]});
            if (it == index.end()) throw PreconditionFailed("maps do not form a cone over the pullback");
            c[i].push_back(it->second);
        }
    }
    return NatMap(u.source(), pb.object, std::move(c));
}

NatMap copair_map(const Cone& coprod, const NatMap& f, const NatMap& g) {
    const auto& p = coprod.object.base();
    std::vector<Table> c(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        c[i] = f.at(i);
        c[i].insert(c[i].end(), g.at(i).begin(), g.at(i).end());
    }
    return NatMap(coprod.object, f.target(), std::move(c));
}

NatMap product_map(const NatMap& f, const NatMap& g) {
    auto src = product(f.source(), g.source());
    auto tgt = product(f.target(), g.target());
    return pair_map(tgt, compose(f, src.legs[0]), compose(g, src.legs[1]));
}

std::vector<std::vector<std::size_t>> limit_tuples(const Copresheaf& x, Mask m, Budget& budget) {
    const auto& p = x.base();
    SlotProblem prob;
    std::vector<std::size_t> slot(p.size(), 0);
    for (std::size_t i = 0; i < p.size(); ++i)
        if (has(m, i)) slot[i] = prob.add_slot(iota(x.card(i)));
    for (std::size_t a = 0; a < p.size(); ++a)
        for (std::size_t b = 0; b < p.size(); ++b) {
            if (!has(m, a) || !has(m, b) || !p.lt(a, b)) continue;
            if (p.up(a) & p.down(b) & m & ~bit(a) & ~bit(b)) continue;  // not a cover inside m
            prob.link(slot[a], slot[b], x.transition(a, b));
        }
    return solve_all(prob, budget);
}

// Families natural over the up-set of i; slot (j, x) for j >= i, x in X(j).
static std::vector<std::vector<std::size_t>> natural_families(const Copresheaf& x, const Copresheaf& y,
                                                              std::size_t i, Budget& budget) {
    const auto& p = x.base();
    SlotProblem prob;
    std::vector<std::size_t> first(p.size(), 0);
    for (std::size_t j = 0; j < p.size(); ++j) {
        if (!p.leq(i, j)) continue;
        first[j] = prob.domains.size();
        for (std::size_t e = 0; e < x.card(j); ++e) prob.add_slot(iota(y.card(j)));
    }
    for (auto& [a, b] : p.covers()) {
        if (!p.leq(i, a)) continue;
        for (std::size_t e = 0; e < x.card(a); ++e)
            prob.link(first[a] + e, first[b] + x.edge(a, b)[e], y.edge(a, b));
    }
    return solve_all(prob, budget);
}

Exponential exponential(const Copresheaf& x, const Copresheaf& y, std::size_t budget) {
    require_same_base(x.base(), y.base());
    const auto& p = x.base();
    Budget b(budget);
    Exponential out;
    out.families.resize(p.size());
    std::vector<std::map<std::vector<std::size_t>, std::size_t>> index(p.size());
    std::vector<std::size_t> card(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        out.families[i] = natural_families(x, y, i, b);
        for (std::size_t k = 0; k < out.families[i].size(); ++k) index[i][out.families[i][k]] = k;
        card[i] = out.families[i].size();
    }
    // offset of stage j's slots inside a family at stage i
    auto offset = [&](std::size_t i, std::size_t j) {
        std::size_t o = 0;
        for (std::size_t k = 0; k < j; ++k)
            if (p.leq(i, k)) o += x.card(k);
        return o;
    };
    out.object = Copresheaf::from_function(p, card, [&](std::size_t a, std::size_t b2, std::size_t e) {
        const auto& fam = out.families[a][e];
        std::vector<std::size_t> r;
        for (std::size_t j = 0; j < p.size(); ++j) {
            if (!p.leq(b2, j)) continue;
            auto o = offset(a, j);
            r.insert(r.end(), fam.begin() + o, fam.begin() + o + x.card(j));
        }
        return index[b2].at(r);
    });
    auto prod = product(out.object, x);
    std::vector<Table> ev(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        auto o = offset(i, i);
        for (std::size_t e = 0; e < prod.object.card(i); ++e) {
            std::size_t s = e / x.card(i), xv = e % x.card(i);
            ev[i].push_back(out.families[i][s][o + xv]);
        }
    }
    out.eval = NatMap(prod.object, y, std::move(ev));
    return out;
}

NatMap curry(const Exponential& e, const Copresheaf& z, const Copresheaf& x, const NatMap& f) {
    const auto& p = z.base();
    std::vector<Table> c(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        for (std::size_t zv = 0; zv < z.card(i); ++zv) {
            std::vector<std::size_t> fam;
            for (std::size_t j = 0; j < p.size(); ++j) {
                if (!p.leq(i, j)) continue;
                std::size_t zj = z.transition(i, j)[zv];
                for (std::size_t xv = 0; xv < x.card(j); ++xv) fam.push_back(f.at(j)[zj * x.card(j) + xv]);
            }
            auto& fs = e.families[i];
            auto it = std::lower_bound(fs.begin(), fs.end(), fam);
            if (it == fs.end() || *it != fam) throw PreconditionFailed("curry: family is not natural");
            c[i].push_back(static_cast<std::size_t>(it - fs.begin()));
        }
    }
    return NatMap(z, e.object, std::move(c));
}

DependentProduct dependent_product(const NatMap& f, const NatMap& z, std::size_t budget) {
    const auto& a = f.source();
    const auto& gamma = f.target();
    if (!(z.target() == a)) throw BaseMismatch("dependent product: family does not live over the domain");
    const auto& zz = z.source();
    const auto& p = a.base();
    Budget b(budget);

    struct Elem {
        std::size_t gamma;
        std::vector<std::size_t> fam;
        auto operator<=>(const Elem&) const = default;
    };
    std::vector<std::vector<Elem>> elems(p.size());
    std::vector<std::map<Elem, std::size_t>> index(p.size());
    // slot layout at stage i for gamma value g: list of (j, a)
    auto layout = [&](std::size_t i, std::size_t g) {
        std::vector<std::pair<std::size_t, std::size_t>> slots;
        for (std::size_t j = 0; j < p.size(); ++j) {
            if (!p.leq(i, j)) continue;
            std::size_t gj = gamma.transition(i, j)[g];
            for (std::size_t av = 0; av < a.card(j); ++av)
                if (f.at(j)[av] == gj) slots.emplace_back(j, av);
        }
        return slots;
    };
    for (std::size_t i = 0; i < p.size(); ++i) {
        for (std::size_t g = 0; g < gamma.card(i); ++g) {
            auto slots = layout(i, g);
            std::map<std::pair<std::size_t, std::size_t>, std::size_t> at;
            SlotProblem prob;
            for (auto [j, av] : slots) {
                std::vector<std::size_t> dom;
                for (std::size_t zv = 0; zv < zz.card(j); ++zv)
                    if (z.at(j)[zv] == av) dom.push_back(zv);
                at[{j, av}] = prob.add_slot(std::move(dom));
            }
            for (auto [j, av] : slots)
                for (auto& [lo, hi] : p.covers())
                    if (lo == j) prob.link(at.at({j, av}), at.at({hi, a.edge(lo, hi)[av]}), zz.edge(lo, hi));
            for (auto& fam : solve_all(prob, b)) {
                Elem e{g, fam};
                index[i][e] = elems[i].size();
                elems[i].push_back(std::move(e));
            }
        }
    }
    std::vector<std::size_t> card(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) card[i] = elems[i].size();
    auto pi = Copresheaf::from_function(p, card, [&](std::size_t lo, std::size_t hi, std::size_t e) {
        const auto& el = elems[lo][e];
        auto from = layout(lo, el.gamma);
        Elem r{gamma.edge(lo, hi)[el.gamma], {}};
        for (std::size_t k = 0; k < from.size(); ++k)
            if (p.leq(hi, from[k].first)) r.fam.push_back(el.fam[k]);
        return index[hi].at(r);
    });
    std::vector<Table> proj(p.size());
    for (std::size_t i = 0; i < p.size(); ++i)
        for (auto& e : elems[i]) proj[i].push_back(e.gamma);
    DependentProduct out;
    out.proj = NatMap(pi, gamma, std::move(proj));
    auto pb = pullback(out.proj, f);
    std::vector<Table> ev(p.size());
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t e = 0; e < pb.object.card(i); ++e) {
            std::size_t s = pb.legs[0].at(i)[e], av = pb.legs[1].at(i)[e];
            auto slots = layout(i, elems[i][s].gamma);
            auto k = std::find(slots.begin(), slots.end(), std::make_pair(i, av)) - slots.begin();
            ev[i].push_back(elems[i][s].fam[static_cast<std::size_t>(k)]);
        }
    out.eval = NatMap(pb.object, zz, std::move(ev));
    return out;
}

Copresheaf subterminal_from_cosieve(const Poset& base, Cosieve s) {
    if (!is_cosieve(base, s.bits)) throw PreconditionFailed("not a cosieve");
    std::vector<std::size_t> card(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) card[i] = s.contains(i) ? 1 : 0;
    return Copresheaf::from_function(base, card, [](std::size_t, std::size_t, std::size_t) { return std::size_t{0}; });
}

bool is_subterminal(const Copresheaf& x) {
    for (auto n : x.cards())
        if (n > 1) return false;
    return true;
}

Cosieve cosieve_from_subterminal(const Copresheaf& x) {
    Mask m = 0;
    for (std::size_t i = 0; i < x.base().size(); ++i) {
        if (x.card(i) > 1)
            throw NotSubterminal("component at " + x.base().name(i) + " has " + std::to_string(x.card(i)) + " elements");
        if (x.card(i) == 1) m |= bit(i);
    }
    return Cosieve{m};
}

static SlotProblem hom_problem(const Copresheaf& x, const Copresheaf& y, bool injective,
                               std::vector<std::size_t>& first) {
    const auto& p = x.base();
    SlotProblem prob;
    first.assign(p.size(), 0);
    for (std::size_t i = 0; i < p.size(); ++i) {
        first[i] = prob.domains.size();
        for (std::size_t e = 0; e < x.card(i); ++e)
            prob.add_slot(iota(y.card(i)), injective ? static_cast<int>(i) : -1);
    }
    for (auto& [a, b] : p.covers())
        for (std::size_t e = 0; e < x.card(a); ++e)
            prob.link(first[a] + e, first[b] + x.edge(a, b)[e], y.edge(a, b));
    return prob;
}

static std::vector<Table> split(const std::vector<std::size_t>& v, const Copresheaf& x,
                                const std::vector<std::size_t>& first) {
    std::vector<Table> c(x.base().size());
    for (std::size_t i = 0; i < c.size(); ++i)
        c[i].assign(v.begin() + first[i], v.begin() + first[i] + x.card(i));
    return c;
}

std::vector<NatMap> hom_set(const Copresheaf& x, const Copresheaf& y, std::size_t budget) {
    require_same_base(x.base(), y.base());
    std::vector<std::size_t> first;
    auto prob = hom_problem(x, y, false, first);
    Budget b(budget);
    std::vector<NatMap> out;
    solve(prob, b, [&](const std::vector<std::size_t>& v) {
        out.emplace_back(x, y, split(v, x, first));
        return true;
    });
    return out;
}

std::size_t hom_count(const Copresheaf& x, const Copresheaf& y, std::size_t budget) {
    require_same_base(x.base(), y.base());
    std::vector<std::size_t> first;
    auto prob = hom_problem(x, y, false, first);
    Budget b(budget);
    std::size_t n = 0;
    solve(prob, b, [&](const std::vector<std::size_t>&) {
        ++n;
        return true;
    });
    return n;
}

std::optional<NatMap> find_iso(const Copresheaf& x, const Copresheaf& y, std::size_t budget) {
    require_same_base(x.base(), y.base());
    if (x.cards() != y.cards()) return std::nullopt;
    std::vector<std::size_t> first;
    auto prob = hom_problem(x, y, true, first);
    Budget b(budget);
    std::optional<NatMap> out;
    solve(prob, b, [&](const std::vector<std::size_t>& v) {
        out = NatMap(x, y, split(v, x, first));
        return false;
    });
    return out;
}

bool isomorphic(const Copresheaf& x, const Copresheaf& y, std::size_t budget) {
    if (x == y) return true;
    return find_iso(x, y, budget).has_value();
}

std::vector<Copresheaf> enumerate_copresheaves(const Poset& base, std::size_t max_card, bool dedupe,
                                              std::size_t budget) {
    const std::size_t n = base.size();
    Budget b(budget);
    std::vector<Copresheaf> out;
    std::vector<std::size_t> card(n, 0);
    while (true) {
        SlotProblem prob;
        std::vector<std::size_t> first;
        for (auto& [lo, hi] : base.covers()) {
            first.push_back(prob.domains.size());
            for (std::size_t e = 0; e < card[lo]; ++e) prob.add_slot(iota(card[hi]));
        }
        std::size_t mark = out.size();
        solve(prob, b, [&](const std::vector<std::size_t>& v) {
            std::map<Edge, Table> edges;
            for (std::size_t k = 0; k < base.covers().size(); ++k) {
                auto [lo, hi] = base.covers()[k];
                edges[{lo, hi}] = Table(v.begin() + first[k], v.begin() + first[k] + card[lo]);
            }
            try {
                Copresheaf c(base, card, std::move(edges));
                if (dedupe)
                    for (std::size_t k = mark; k < out.size(); ++k)
                        if (isomorphic(out[k], c)) return true;
                out.push_back(std::move(c));
            } catch (const NotFunctorial&) {
            }
            return true;
        });
        // next card vector, element 0 most significant
        std::size_t k = n;
        while (k > 0 && card[k - 1] == max_card) card[--k] = 0;
        if (k == 0) break;
        ++card[k - 1];
    }
    return out;
}

} // namespace msk
