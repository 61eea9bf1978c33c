#include "msk/oplax.hpp"

#include <algorithm>
#include <sstream>

#include "msk/errors.hpp"

namespace msk {

// ---- lex functors ----

LexFunctor LexFunctor::identity(const Poset& base) {
    LexFunctor f;
    f.kind_ = Kind::Identity;
    f.source_ = f.target_ = base;
    return f;
}

LexFunctor LexFunctor::precompose(const Poset& source, const Poset& target, std::vector<std::size_t> g) {
    if (g.size() != target.size()) throw PreconditionFailed("precompose map must have one entry per target element");
    for (auto v : g)
        if (v >= source.size()) throw UnknownElement("precompose map value outside the source base");
    for (std::size_t a = 0; a < target.size(); ++a)
        for (std::size_t b = 0; b < target.size(); ++b)
            if (target.leq(a, b) && !source.leq(g[a], g[b]))
                throw PreconditionFailed("precompose map is not monotone at " + target.name(a) + " <= " + target.name(b));
    LexFunctor f;
    f.kind_ = Kind::Precompose;
    f.source_ = source;
    f.target_ = target;
    f.map_ = std::move(g);
    return f;
}

LexFunctor LexFunctor::global_sections(const Poset& source) {
    LexFunctor f;
    f.kind_ = Kind::GlobalSections;
    f.source_ = source;
    f.target_ = Poset::point();
    return f;
}

LexFunctor LexFunctor::evaluation(const Poset& source, std::size_t at) {
    if (at >= source.size()) throw UnknownElement("evaluation point outside the base");
    LexFunctor f;
    f.kind_ = Kind::Evaluation;
    f.source_ = source;
    f.target_ = Poset::point();
    f.at_ = at;
    return f;
}

LexFunctor LexFunctor::compose(std::vector<LexFunctor> parts) {
    if (parts.empty()) throw PreconditionFailed("empty composite");
    for (std::size_t k = 0; k + 1 < parts.size(); ++k)
        if (!(parts[k].source() == parts[k + 1].target())) throw BaseMismatch("composite parts do not chain");
    LexFunctor f;
    f.kind_ = Kind::Compose;
    f.source_ = parts.back().source();
    f.target_ = parts.front().target();
    f.parts_ = std::move(parts);
    return f;
}

std::string LexFunctor::describe() const {
    std::ostringstream os;
    switch (kind_) {
    case Kind::Identity: os << "identity"; break;
    case Kind::GlobalSections: os << "global_sections"; break;
    case Kind::Evaluation: os << "evaluation(" << source_.name(at_) << ")"; break;
    case Kind::Precompose:
        os << "precompose[";
        for (std::size_t t = 0; t < map_.size(); ++t) os << (t ? "," : "") << target_.name(t) << "->" << source_.name(map_[t]);
        os << "]";
        break;
    case Kind::Compose:
        os << "compose(";
        for (std::size_t k = 0; k < parts_.size(); ++k) os << (k ? ", " : "") << parts_[k].describe();
        os << ")";
        break;
    }
    return os.str();
}

namespace {

struct Atom {
    bool sections = false;
    Poset source, target;
    std::vector<std::size_t> map;
    friend bool operator==(const Atom&, const Atom&) = default;
};

void push_atom(std::vector<Atom>& out, Atom a) {
    if (a.sections) {
        if (a.source.size() == 1) return;  // limit over a point
        out.push_back(std::move(a));
        return;
    }
    if (!out.empty() && !out.back().sections) {
        auto& prev = out.back();
        std::vector<std::size_t> g(a.map.size());
        for (std::size_t t = 0; t < g.size(); ++t) g[t] = prev.map[a.map[t]];
        prev.map = std::move(g);
        prev.target = a.target;
        if (prev.source == prev.target && prev.map == identity_table(prev.map.size())) out.pop_back();
        return;
    }
    if (a.source == a.target && a.map == identity_table(a.map.size())) return;
    out.push_back(std::move(a));
}

void atoms(const LexFunctor& f, std::vector<Atom>& out) {
    using K = LexFunctor::Kind;
    switch (f.kind()) {
    case K::Identity: break;
    case K::GlobalSections: push_atom(out, Atom{true, f.source(), f.target(), {}}); break;
    case K::Evaluation: push_atom(out, Atom{false, f.source(), f.target(), {f.at()}}); break;
    case K::Precompose: push_atom(out, Atom{false, f.source(), f.target(), f.map()}); break;
    case K::Compose:
        for (auto it = f.parts().rbegin(); it != f.parts().rend(); ++it) atoms(*it, out);
        break;
    }
}

} // namespace

bool structurally_equal(const LexFunctor& a, const LexFunctor& b) {
    if (!(a.source() == b.source()) || !(a.target() == b.target())) return false;
    std::vector<Atom> x, y;
    atoms(a, x);
    atoms(b, y);
    return x == y;
}

namespace {

std::size_t find_tuple(const std::vector<std::vector<std::size_t>>& sorted, const std::vector<std::size_t>& t) {
    auto it = std::lower_bound(sorted.begin(), sorted.end(), t);
    if (it == sorted.end() || *it != t) throw PreconditionFailed("family is not a point of the limit");
    return static_cast<std::size_t>(it - sorted.begin());
}

} // namespace

Copresheaf lex_apply(const LexFunctor& f, const Copresheaf& x) {
    require_same_base(x.base(), f.source());
    using K = LexFunctor::Kind;
    switch (f.kind()) {
    case K::Identity: return x;
    case K::Precompose: {
        const auto& t = f.target();
        const auto& g = f.map();
        std::vector<std::size_t> card(t.size());
        for (std::size_t i = 0; i < t.size(); ++i) card[i] = x.card(g[i]);
        std::map<Edge, Table> edges;
        for (auto& [a, b] : t.covers()) edges[{a, b}] = x.transition(g[a], g[b]);
        return Copresheaf(t, card, edges);
    }
    case K::GlobalSections: {
        Budget budget;
        auto n = limit_tuples(x, x.base().full(), budget).size();
        return Copresheaf(f.target(), {n}, {});
    }
    case K::Evaluation: return Copresheaf(f.target(), {x.card(f.at())}, {});
    case K::Compose: {
        Copresheaf y = x;
        for (auto it = f.parts().rbegin(); it != f.parts().rend(); ++it) y = lex_apply(*it, y);
        return y;
    }
    }
    return x;
}

NatMap lex_apply(const LexFunctor& f, const NatMap& m) {
    require_same_base(m.source().base(), f.source());
    using K = LexFunctor::Kind;
    switch (f.kind()) {
    case K::Identity: return m;
    case K::Precompose: {
        std::vector<Table> c(f.target().size());
        for (std::size_t t = 0; t < c.size(); ++t) c[t] = m.at(f.map()[t]);
        return NatMap(lex_apply(f, m.source()), lex_apply(f, m.target()), c);
    }
    case K::GlobalSections: {
        Budget budget;
        auto full = m.source().base().full();
        auto src = limit_tuples(m.source(), full, budget);
        auto tgt = limit_tuples(m.target(), full, budget);
        Table t(src.size());
        for (std::size_t k = 0; k < src.size(); ++k) {
            auto image = src[k];
            for (std::size_t i = 0; i < image.size(); ++i) image[i] = m.at(i)[image[i]];
            t[k] = find_tuple(tgt, image);
        }
        return NatMap(Copresheaf(f.target(), {src.size()}, {}), Copresheaf(f.target(), {tgt.size()}, {}), {t});
    }
    case K::Evaluation: return NatMap(lex_apply(f, m.source()), lex_apply(f, m.target()), {m.at(f.at())});
    case K::Compose: {
        NatMap y = m;
        for (auto it = f.parts().rbegin(); it != f.parts().rend(); ++it) y = lex_apply(*it, y);
        return y;
    }
    }
    return m;
}

// ---- limits of diagrams ----

namespace {

struct PointwiseLimit {
    std::vector<std::vector<std::vector<std::size_t>>> tuples;  // per base element
};

PointwiseLimit pointwise(const Poset& base, const std::vector<Copresheaf>& objects,
                         const std::vector<DiagramArrow>& arrows) {
    PointwiseLimit out;
    Budget budget;
    for (std::size_t s = 0; s < base.size(); ++s) {
        SlotProblem prob;
        for (auto& o : objects) prob.add_slot(iota(o.card(s)));
        for (auto& a : arrows) prob.link(a.from, a.to, a.map.at(s));
        out.tuples.push_back(solve_all(prob, budget));
    }
    return out;
}

} // namespace

DiagramLimit diagram_limit(const Poset& base, const std::vector<Copresheaf>& objects,
                           const std::vector<DiagramArrow>& arrows) {
    for (auto& o : objects) require_same_base(o.base(), base);
    for (auto& a : arrows)
        if (a.from >= objects.size() || a.to >= objects.size()) throw PreconditionFailed("arrow outside the diagram");
    auto pl = pointwise(base, objects, arrows);
    std::vector<std::size_t> card(base.size());
    for (std::size_t s = 0; s < base.size(); ++s) card[s] = pl.tuples[s].size();
    std::map<Edge, Table> edges;
    for (auto& [s, t] : base.covers()) {
        Table e(card[s]);
        for (std::size_t p = 0; p < card[s]; ++p) {
            auto image = pl.tuples[s][p];
            for (std::size_t k = 0; k < objects.size(); ++k) image[k] = objects[k].edge(s, t)[image[k]];
            e[p] = find_tuple(pl.tuples[t], image);
        }
        edges[{s, t}] = e;
    }
    DiagramLimit out{Copresheaf(base, card, edges), {}};
    for (std::size_t k = 0; k < objects.size(); ++k) {
        std::vector<Table> c(base.size());
        for (std::size_t s = 0; s < base.size(); ++s)
            for (auto& tup : pl.tuples[s]) c[s].push_back(tup[k]);
        out.legs.emplace_back(out.object, objects[k], c);
    }
    return out;
}

namespace {

// the map into the limit with the given legs
NatMap into_limit(const DiagramLimit& lim, const Copresheaf& source, const std::vector<NatMap>& maps) {
    const auto& base = lim.object.base();
    std::vector<Table> c(base.size());
    for (std::size_t s = 0; s < base.size(); ++s) {
        std::vector<std::vector<std::size_t>> tuples(lim.object.card(s), std::vector<std::size_t>(lim.legs.size()));
        for (std::size_t k = 0; k < lim.legs.size(); ++k)
            for (std::size_t p = 0; p < tuples.size(); ++p) tuples[p][k] = lim.legs[k].at(s)[p];
        for (std::size_t a = 0; a < source.card(s); ++a) {
            std::vector<std::size_t> t(maps.size());
            for (std::size_t k = 0; k < maps.size(); ++k) t[k] = maps[k].at(s)[a];
            c[s].push_back(find_tuple(tuples, t));
        }
    }
    return NatMap(source, lim.object, c);
}

bool is_terminal_object(const Copresheaf& x) {
    for (auto c : x.cards())
        if (c != 1) return false;
    return true;
}

NatMap unique_to(const Copresheaf& x, const Copresheaf& one) {
    std::vector<Table> c(x.base().size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = constant_table(x.card(i), 0);
    return NatMap(x, one, c);
}

} // namespace

// ---- Artin gluing ----

GlueObject Glue::make_object(const Copresheaf& a, const Copresheaf& b, const NatMap& m) const {
    require_same_base(a.base(), f_.target());
    require_same_base(b.base(), f_.source());
    if (!(m.source() == a) || !(m.target() == lex_apply(f_, b)))
        throw PreconditionFailed("glue map must go from a to F(b)");
    return GlueObject{a, b, m};
}

GlueMap Glue::make_map(const GlueObject& x, const GlueObject& y, const NatMap& fa, const NatMap& fb) const {
    if (!(fa.source() == x.a) || !(fa.target() == y.a) || !(fb.source() == x.b) || !(fb.target() == y.b))
        throw PreconditionFailed("glue morphism components have the wrong ends");
    if (compose(lex_apply(f_, fb), x.m).comps() != compose(y.m, fa).comps())
        throw PreconditionFailed("glue morphism square does not commute");
    return GlueMap{x, y, fa, fb};
}

std::vector<GlueMap> Glue::hom(const GlueObject& x, const GlueObject& y) const {
    std::vector<GlueMap> out;
    auto as = hom_set(x.a, y.a);
    for (auto& fb : hom_set(x.b, y.b)) {
        auto lhs = compose(lex_apply(f_, fb), x.m).comps();
        for (auto& fa : as)
            if (lhs == compose(y.m, fa).comps()) out.push_back(GlueMap{x, y, fa, fb});
    }
    return out;
}

GlueObject Glue::terminal() const {
    auto a = msk::terminal(f_.target());
    auto b = msk::terminal(f_.source());
    auto fb = lex_apply(f_, b);
    if (!is_terminal_object(fb)) throw NotLex("F does not preserve the terminal object");
    return GlueObject{a, b, unique_to(a, fb)};
}

GlueCone Glue::product(const GlueObject& x, const GlueObject& y) const {
    auto pa = msk::product(x.a, y.a);
    auto pb = msk::product(x.b, y.b);
    auto fx = lex_apply(f_, x.b), fy = lex_apply(f_, y.b);
    auto fprod = msk::product(fx, fy);
    auto cmp = pair_map(fprod, lex_apply(f_, pb.legs[0]), lex_apply(f_, pb.legs[1]));
    if (!msk::is_iso(cmp)) throw NotLex("F does not preserve this product");
    auto m = compose(inverse(cmp), product_map(x.m, y.m));
    GlueObject o{pa.object, pb.object, m};
    return GlueCone{o, {GlueMap{o, x, pa.legs[0], pb.legs[0]}, GlueMap{o, y, pa.legs[1], pb.legs[1]}}};
}

GlueCone Glue::pullback(const GlueMap& f, const GlueMap& g) const {
    if (!(f.target == g.target)) throw PreconditionFailed("pullback of maps with different targets");
    const auto& x = f.source;
    const auto& y = g.source;
    auto pa = msk::pullback(f.fa, g.fa);
    auto pb = msk::pullback(f.fb, g.fb);
    auto fp = msk::pullback(lex_apply(f_, f.fb), lex_apply(f_, g.fb));
    auto cmp = pullback_pair(fp, lex_apply(f_, pb.legs[0]), lex_apply(f_, pb.legs[1]));
    if (!msk::is_iso(cmp)) throw NotLex("F does not preserve this pullback");
    auto into = pullback_pair(fp, compose(x.m, pa.legs[0]), compose(y.m, pa.legs[1]));
    GlueObject o{pa.object, pb.object, compose(inverse(cmp), into)};
    return GlueCone{o, {GlueMap{o, x, pa.legs[0], pb.legs[0]}, GlueMap{o, y, pa.legs[1], pb.legs[1]}}};
}

bool Glue::is_iso(const GlueMap& f) const { return msk::is_iso(f.fa) && msk::is_iso(f.fb); }

// ---- diagrams ----

const LexFunctor& SketchDiagram::at(std::size_t i, std::size_t j) const {
    auto it = functors.find({i, j});
    if (it == functors.end()) throw PreconditionFailed("no functor for " + std::to_string(i) + "<" + std::to_string(j));
    return it->second;
}

SketchDiagram constant_diagram(const ModeSketch& t, const Poset& model) {
    SketchDiagram d{t, std::vector<Poset>(t.base().size(), model), {}};
    const auto& p = t.base();
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = 0; j < p.size(); ++j)
            if (p.lt(i, j)) d.functors.emplace(Edge{i, j}, LexFunctor::identity(model));
    return d;
}

ValidationReport validate_diagram(const SketchDiagram& d, std::size_t corpus_card) {
    ValidationReport r;
    auto fail = [&](std::string msg) {
        r.ok = false;
        r.violations.push_back(std::move(msg));
    };
    const auto& p = d.sketch.base();
    if (d.models.size() != p.size()) {
        fail("expected one model per sketch element");
        return r;
    }
    auto label = [&](std::size_t i, std::size_t j) { return p.name(i) + "<" + p.name(j); };
    for (auto& [e, f] : d.functors)
        if (e.first >= p.size() || e.second >= p.size() || !p.lt(e.first, e.second))
            fail("functor on a non-strict pair");
    bool complete = true;
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = 0; j < p.size(); ++j) {
            if (!p.lt(i, j)) continue;
            auto it = d.functors.find({i, j});
            if (it == d.functors.end()) {
                fail(label(i, j) + ": missing functor");
                complete = false;
            } else if (!(it->second.source() == d.models[j]) || !(it->second.target() == d.models[i])) {
                fail(label(i, j) + ": functor must go from the " + p.name(j) + "-model to the " + p.name(i) + "-model");
                complete = false;
            }
        }
    if (!complete) return r;
    for (auto& [i, k, j] : d.sketch.triangles()) {
        const auto& dij = d.at(i, j);
        auto comp = LexFunctor::compose({d.at(i, k), d.at(k, j)});
        if (structurally_equal(dij, comp)) continue;
        auto corpus = enumerate_copresheaves(d.models[j], corpus_card);
        bool same = true;
        for (std::size_t n = 0; n < corpus.size() && same; ++n) {
            same = lex_apply(dij, corpus[n]) == lex_apply(comp, corpus[n]);
            if (same && n + 1 < corpus.size())
                for (auto& m : hom_set(corpus[n], corpus[n + 1]))
                    if (lex_apply(dij, m).comps() != lex_apply(comp, m).comps()) same = false;
        }
        if (!same)
            fail("(" + p.name(i) + "," + p.name(k) + "," + p.name(j) + "): D_" + label(i, j) + " differs from the composite");
    }
    return r;
}

namespace {

void require_coherent(const SketchDiagram& d) {
    auto r = validate_diagram(d);
    if (!r.ok) throw AxiomViolation("incoherent diagram: " + r.violations.front());
}

} // namespace

// ---- oplax objects ----

ValidationReport oplax_validate(const SketchDiagram& d, const OplaxObject& x) {
    ValidationReport r;
    auto fail = [&](std::string msg) {
        r.ok = false;
        r.violations.push_back(std::move(msg));
    };
    const auto& p = d.sketch.base();
    if (x.comps.size() != p.size()) {
        fail("expected one component per sketch element");
        return r;
    }
    for (std::size_t i = 0; i < p.size(); ++i)
        if (!(x.comps[i].base() == d.models[i])) fail(p.name(i) + ": component over the wrong base");
    if (!r.ok) return r;
    for (auto& [e, m] : x.maps)
        if (!d.functors.count(e)) fail("structure map on a non-strict pair");
    for (auto& [e, f] : d.functors) {
        auto it = x.maps.find(e);
        auto lbl = p.name(e.first) + "<" + p.name(e.second);
        if (it == x.maps.end()) {
            fail(lbl + ": missing structure map");
            continue;
        }
        if (!(it->second.source() == x.comps[e.first]) || !(it->second.target() == lex_apply(f, x.comps[e.second])))
            fail(lbl + ": structure map must go from x_" + p.name(e.first) + " to D(x_" + p.name(e.second) + ")");
    }
    if (!r.ok) return r;
    for (auto& [i, k, j] : d.sketch.triangles()) {
        auto via = compose(lex_apply(d.at(i, k), x.maps.at({k, j})), x.maps.at({i, k}));
        if (via.comps() != x.maps.at({i, j}).comps())
            fail("(" + p.name(i) + "," + p.name(k) + "," + p.name(j) + ")" + (d.sketch.is_thin(i, k, j) ? " thin" : "") +
                 ": structure maps do not compose");
    }
    return r;
}

bool is_oplax_map(const SketchDiagram& d, const OplaxObject& x, const OplaxObject& y, const std::vector<NatMap>& g) {
    if (g.size() != x.comps.size()) return false;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (!(g[i].source() == x.comps[i]) || !(g[i].target() == y.comps[i])) return false;
    for (auto& [e, f] : d.functors)
        if (compose(lex_apply(f, g[e.second]), x.maps.at(e)).comps() != compose(y.maps.at(e), g[e.first]).comps())
            return false;
    return true;
}

namespace {

// top elements first
std::vector<std::size_t> top_down(const Poset& p) {
    auto order = linear_extension(p);
    std::reverse(order.begin(), order.end());
    return order;
}

} // namespace

std::vector<OplaxMap> oplax_hom(const SketchDiagram& d, const OplaxObject& x, const OplaxObject& y,
                                std::size_t budget) {
    const auto& p = d.sketch.base();
    auto order = top_down(p);
    Budget b(budget);
    std::vector<std::vector<NatMap>> cands(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) cands[i] = hom_set(x.comps[i], y.comps[i], budget);
    std::vector<NatMap> g(p.size());
    std::vector<OplaxMap> out;
    std::function<void(std::size_t)> go = [&](std::size_t pos) {
        if (pos == order.size()) {
            out.push_back(OplaxMap{x, y, g});
            return;
        }
        auto i = order[pos];
        for (auto& c : cands[i]) {
            b.charge(1);
            bool ok = true;
            for (std::size_t j = 0; j < p.size() && ok; ++j) {
                if (!p.lt(i, j)) continue;
                const auto& f = d.at(i, j);
                ok = compose(lex_apply(f, g[j]), x.maps.at({i, j})).comps() == compose(y.maps.at({i, j}), c).comps();
            }
            if (!ok) continue;
            g[i] = c;
            go(pos + 1);
        }
    };
    go(0);
    return out;
}

DiagramLimit structure_target(const SketchDiagram& d, const OplaxObject& x, std::size_t i) {
    const auto& p = d.sketch.base();
    std::vector<std::size_t> above;
    for (std::size_t j = 0; j < p.size(); ++j)
        if (p.lt(i, j)) above.push_back(j);
    std::vector<Copresheaf> objs;
    for (auto j : above) objs.push_back(lex_apply(d.at(i, j), x.comps[j]));
    std::vector<DiagramArrow> arrows;
    for (std::size_t a = 0; a < above.size(); ++a)
        for (std::size_t b = 0; b < above.size(); ++b)
            if (p.lt(above[a], above[b]))
                arrows.push_back({a, b, lex_apply(d.at(i, above[a]), x.maps.at({above[a], above[b]}))});
    return diagram_limit(d.models[i], objs, arrows);
}

namespace {

void set_maps_from(const SketchDiagram& d, OplaxObject& x, std::size_t i, const DiagramLimit& lim, const NatMap& h) {
    const auto& p = d.sketch.base();
    std::size_t k = 0;
    for (std::size_t j = 0; j < p.size(); ++j)
        if (p.lt(i, j)) x.maps[{i, j}] = compose(lim.legs[k++], h);
}

} // namespace

std::vector<OplaxObject> enumerate_oplax(const SketchDiagram& d, std::size_t max_card, std::size_t budget) {
    require_coherent(d);
    const auto& p = d.sketch.base();
    auto order = top_down(p);
    Budget b(budget);
    std::vector<std::vector<Copresheaf>> corpus(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) corpus[i] = enumerate_copresheaves(d.models[i], max_card, false, budget);
    std::vector<OplaxObject> out;
    OplaxObject x;
    x.comps.resize(p.size());
    std::function<void(std::size_t)> go = [&](std::size_t pos) {
        if (pos == order.size()) {
            b.charge(1);
            out.push_back(x);
            return;
        }
        auto i = order[pos];
        for (auto& c : corpus[i]) {
            x.comps[i] = c;
            auto lim = structure_target(d, x, i);
            for (auto& h : hom_set(c, lim.object, budget)) {
                set_maps_from(d, x, i, lim, h);
                go(pos + 1);
            }
        }
    };
    go(0);
    return out;
}

OplaxObject random_oplax(const SketchDiagram& d, std::size_t max_card, std::mt19937& rng) {
    const auto& p = d.sketch.base();
    OplaxObject x;
    x.comps.resize(p.size());
    for (auto i : top_down(p)) {
        auto corpus = enumerate_copresheaves(d.models[i], max_card);
        for (int attempt = 0;; ++attempt) {
            x.comps[i] = attempt < 64 ? corpus[std::uniform_int_distribution<std::size_t>(0, corpus.size() - 1)(rng)]
                                      : initial(d.models[i]);
            auto lim = structure_target(d, x, i);
            auto hs = hom_set(x.comps[i], lim.object);
            if (hs.empty()) continue;
            set_maps_from(d, x, i, lim, hs[std::uniform_int_distribution<std::size_t>(0, hs.size() - 1)(rng)]);
            break;
        }
    }
    return x;
}

bool operator==(const NestedGlue& a, const NestedGlue& b) {
    if (a.element != b.element || !(a.head == b.head) || !(a.target == b.target) || !(a.m == b.m)) return false;
    if (!a.rest || !b.rest) return !a.rest && !b.rest;
    return *a.rest == *b.rest;
}

GlueEquivalence iterate_glue_equivalence(const SketchDiagram& d) {
    require_coherent(d);
    auto order = linear_extension(d.sketch.base());
    GlueEquivalence e;
    e.to_glued = [d, order](const OplaxObject& x) {
        auto r = oplax_validate(d, x);
        if (!r.ok) throw PreconditionFailed("not an oplax object: " + r.violations.front());
        std::shared_ptr<const NestedGlue> rest;
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            auto i = *it;
            auto lim = structure_target(d, x, i);
            std::vector<NatMap> maps;
            for (std::size_t j = 0; j < d.sketch.base().size(); ++j)
                if (d.sketch.base().lt(i, j)) maps.push_back(x.maps.at({i, j}));
            auto node = std::make_shared<NestedGlue>();
            node->element = i;
            node->head = x.comps[i];
            node->target = lim.object;
            node->m = into_limit(lim, x.comps[i], maps);
            node->rest = rest;
            rest = node;
        }
        return *rest;
    };
    e.from_glued = [d, order](const NestedGlue& g) {
        std::vector<const NestedGlue*> nodes;
        for (const NestedGlue* n = &g; n; n = n->rest.get()) nodes.push_back(n);
        if (nodes.size() != order.size()) throw PreconditionFailed("nested gluing has the wrong depth");
        OplaxObject x;
        x.comps.resize(order.size());
        for (std::size_t k = nodes.size(); k-- > 0;) {
            const auto& n = *nodes[k];
            if (n.element != order[k]) throw PreconditionFailed("nested gluing out of order");
            x.comps[n.element] = n.head;
            auto lim = structure_target(d, x, n.element);
            if (!(lim.object == n.target) || !(n.m.source() == n.head) || !(n.m.target() == n.target))
                throw PreconditionFailed("glue map does not land in the limit of the rest");
            set_maps_from(d, x, n.element, lim, n.m);
        }
        return x;
    };
    return e;
}

OplaxObject prop_canonical_oplax(const SketchDiagram& d, Cosieve sigma) {
    const auto& p = d.sketch.base();
    if (!is_cosieve(p, sigma.bits)) throw PreconditionFailed("not a cosieve of the sketch");
    OplaxObject x;
    for (std::size_t i = 0; i < p.size(); ++i)
        x.comps.push_back(sigma.contains(i) ? terminal(d.models[i]) : initial(d.models[i]));
    for (auto& [e, f] : d.functors) {
        auto target = lex_apply(f, x.comps[e.second]);
        if (sigma.contains(e.first)) {
            if (!is_terminal_object(target)) throw NotLex("functor does not preserve the terminal object");
            x.maps[e] = unique_to(x.comps[e.first], target);
        } else {
            x.maps[e] = from_initial(target);
        }
    }
    return x;
}

bool is_oplax_subterminal(const SketchDiagram&, const OplaxObject& x) {
    for (auto& c : x.comps)
        if (!is_subterminal(c)) return false;
    return true;
}

OplaxObject oplax_meet(const SketchDiagram& d, const OplaxObject& x, const OplaxObject& y) {
    OplaxObject z;
    for (std::size_t i = 0; i < x.comps.size(); ++i) z.comps.push_back(product(x.comps[i], y.comps[i]).object);
    for (auto& [e, f] : d.functors) {
        auto pj = product(x.comps[e.second], y.comps[e.second]);
        auto fprod = product(lex_apply(f, x.comps[e.second]), lex_apply(f, y.comps[e.second]));
        auto cmp = pair_map(fprod, lex_apply(f, pj.legs[0]), lex_apply(f, pj.legs[1]));
        if (!is_iso(cmp)) throw NotLex("functor does not preserve this product");
        z.maps[e] = compose(inverse(cmp), product_map(x.maps.at(e), y.maps.at(e)));
    }
    return z;
}

OplaxObject oplax_union(const SketchDiagram& d, const OplaxObject& x, const OplaxObject& y) {
    if (!is_oplax_subterminal(d, x) || !is_oplax_subterminal(d, y)) throw NotSubterminal("union of non-subterminals");
    OplaxObject z;
    for (std::size_t i = 0; i < x.comps.size(); ++i) {
        auto co = coproduct(x.comps[i], y.comps[i]);
        z.comps.push_back(image(copair_map(co, to_terminal(x.comps[i]), to_terminal(y.comps[i]))).object);
    }
    for (auto& [e, f] : d.functors) {
        auto hs = hom_set(z.comps[e.first], lex_apply(f, z.comps[e.second]));
        if (hs.size() != 1) throw NotSubterminal("union is not subterminal");
        z.maps[e] = hs.front();
    }
    return z;
}

// ---- localization at one element ----

Localization projection_and_right_adjoint(const SketchDiagram& d, std::size_t i) {
    require_coherent(d);
    const auto& p = d.sketch.base();
    if (i >= p.size()) throw UnknownElement("element outside the sketch");
    Localization l;
    l.element = i;
    l.proj = [i](const OplaxObject& x) { return x.comps.at(i); };
    l.radj = [d, i](const Copresheaf& y) {
        const auto& p = d.sketch.base();
        require_same_base(y.base(), d.models[i]);
        OplaxObject x;
        for (std::size_t j = 0; j < p.size(); ++j) {
            if (j == i)
                x.comps.push_back(y);
            else if (p.lt(j, i))
                x.comps.push_back(lex_apply(d.at(j, i), y));
            else
                x.comps.push_back(terminal(d.models[j]));
        }
        for (auto& [e, f] : d.functors) {
            auto target = lex_apply(f, x.comps[e.second]);
            if (p.leq(e.second, i)) {
                std::vector<Table> c;
                for (std::size_t s = 0; s < d.models[e.first].size(); ++s)
                    c.push_back(identity_table(x.comps[e.first].card(s)));
                x.maps[e] = NatMap(x.comps[e.first], target, c);
            } else {
                x.maps[e] = unique_to(x.comps[e.first], target);
            }
        }
        return x;
    };
    l.unit = [d, i, radj = l.radj](const OplaxObject& x) {
        const auto& p = d.sketch.base();
        auto y = radj(x.comps.at(i));
        std::vector<NatMap> g;
        for (std::size_t j = 0; j < p.size(); ++j) {
            if (j == i)
                g.push_back(NatMap::identity(x.comps[j]));
            else if (p.lt(j, i))
                g.push_back(x.maps.at({j, i}));
            else
                g.push_back(unique_to(x.comps[j], y.comps[j]));
        }
        return OplaxMap{x, y, g};
    };
    return l;
}

AdjunctionReport check_adjunction(const SketchDiagram& d, std::size_t i, const std::vector<OplaxObject>& xs,
                                  const std::vector<Copresheaf>& ys) {
    auto l = projection_and_right_adjoint(d, i);
    AdjunctionReport r;
    for (std::size_t n = 0; n < ys.size(); ++n) {
        auto ry = l.radj(ys[n]);
        if (!(l.proj(ry) == ys[n])) {
            r.counit_identity = false;
            r.failures.push_back("counit at y" + std::to_string(n));
        }
        for (auto& c : l.unit(ry).comps)
            if (!is_iso(c)) {
                r.radj_fixed = false;
                r.failures.push_back("unit not iso at radj(y" + std::to_string(n) + ")");
                break;
            }
    }
    for (std::size_t n = 0; n < xs.size(); ++n) {
        auto u = l.unit(xs[n]);
        if (!is_oplax_map(d, u.source, u.target, u.comps) || !(u.comps[i] == NatMap::identity(xs[n].comps[i]))) {
            r.unit_natural = false;
            r.failures.push_back("unit at x" + std::to_string(n));
        }
        for (std::size_t k = 0; k < ys.size(); ++k) {
            auto homs = oplax_hom(d, xs[n], l.radj(ys[k]));
            std::vector<std::vector<Table>> seen;
            for (auto& g : homs) seen.push_back(g.comps[i].comps());
            std::sort(seen.begin(), seen.end());
            bool injective = std::adjacent_find(seen.begin(), seen.end()) == seen.end();
            if (!injective || homs.size() != hom_count(xs[n].comps[i], ys[k])) {
                r.bijection = false;
                r.failures.push_back("hom(x" + std::to_string(n) + ", radj y" + std::to_string(k) + ") has " +
                                     std::to_string(homs.size()) + " elements, expected " +
                                     std::to_string(hom_count(xs[n].comps[i], ys[k])));
            }
        }
    }
    return r;
}

// ---- constant one-point model ----

ConstantModel constant_model_equivalence(const ModeSketch& t) {
    const auto& p = t.base();
    for (auto& [a, b, c] : t.triangles())
        if (!t.is_thin(a, b, c))
            throw PreconditionFailed("triangle (" + p.name(a) + "," + p.name(b) + "," + p.name(c) + ") is not thin");
    ConstantModel cm;
    cm.diagram = constant_diagram(t, Poset::point());
    cm.to_copresheaf = [d = cm.diagram](const OplaxObject& x) {
        auto r = oplax_validate(d, x);
        if (!r.ok) throw PreconditionFailed("not an oplax object: " + r.violations.front());
        const auto& p = d.sketch.base();
        std::vector<std::size_t> card;
        for (auto& c : x.comps) card.push_back(c.card(0));
        std::map<Edge, Table> edges;
        for (auto& e : p.covers()) edges[e] = x.maps.at(e).at(0);
        return Copresheaf(p, card, edges);
    };
    cm.from_copresheaf = [d = cm.diagram](const Copresheaf& c) {
        const auto& p = d.sketch.base();
        require_same_base(c.base(), p);
        auto pt = Poset::point();
        OplaxObject x;
        for (std::size_t i = 0; i < p.size(); ++i) x.comps.push_back(Copresheaf(pt, {c.card(i)}, {}));
        for (auto& [e, f] : d.functors) x.maps[e] = NatMap(x.comps[e.first], x.comps[e.second], {c.transition(e.first, e.second)});
        return x;
    };
    return cm;
}

} // namespace msk
