#include "doctest.h"

#include <algorithm>
#include <set>

#include "msk/errors.hpp"
#include "msk/modality.hpp"

using namespace msk;

namespace {

Poset span_poset() { return Poset::build({"0", "1", "01"}, {{"01", "0"}, {"01", "1"}}); }

std::vector<Poset> small_bases() {
    std::vector<Poset> out;
    for (std::size_t n = 1; n <= 3; ++n)
        for (auto& p : all_posets(n)) out.push_back(p);
    return out;
}

Copresheaf two(std::size_t c0, std::size_t c1, Table e) {
    return Copresheaf(Poset::chain(2), {c0, c1}, {{{0, 1}, std::move(e)}});
}

// Compatible families over M, by scanning the whole product of the sets.
std::vector<std::vector<std::size_t>> naive_limit(const Copresheaf& x, Mask m) {
    const auto& p = x.base();
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (has(m, i)) members.push_back(i);
    std::vector<std::vector<std::size_t>> out;
    std::size_t total = 1;
    for (auto i : members) total *= x.card(i);
    for (std::size_t code = 0; code < total; ++code) {
        std::vector<std::size_t> t(members.size());
        std::size_t c = code;
        for (std::size_t k = members.size(); k-- > 0;) {
            t[k] = c % x.card(members[k]);
            c /= x.card(members[k]);
        }
        bool ok = true;
        for (std::size_t a = 0; a < members.size(); ++a)
            for (std::size_t b = 0; b < members.size(); ++b)
                if (p.leq(members[a], members[b]) && x.transition(members[a], members[b])[t[a]] != t[b]) ok = false;
        if (ok) out.push_back(t);
    }
    return out;
}

// X is a right Kan extension from L: outside L, X(i) maps bijectively to
// the limit over up(i) meet L.
bool modal_oracle(Mask l, const Copresheaf& x) {
    const auto& p = x.base();
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (has(l, i)) continue;
        Mask m = p.up(i) & l;
        auto lim = naive_limit(x, m);
        if (lim.size() != x.card(i)) return false;
        std::vector<std::vector<std::size_t>> images;
        for (std::size_t e = 0; e < x.card(i); ++e) {
            std::vector<std::size_t> t;
            for (std::size_t j = 0; j < p.size(); ++j)
                if (has(m, j)) t.push_back(x.transition(i, j)[e]);
            images.push_back(t);
        }
        std::sort(images.begin(), images.end());
        if (std::adjacent_find(images.begin(), images.end()) != images.end()) return false;
    }
    return true;
}

bool connected_oracle(Mask l, const Copresheaf& x) {
    for (std::size_t i = 0; i < x.base().size(); ++i)
        if (naive_limit(x, x.base().up(i) & l).size() != 1) return false;
    return true;
}

} // namespace

TEST_SUITE("modality") {

TEST_CASE("open reflection") {
    auto p = Poset::chain(2);
    auto x = two(2, 3, {2, 0});
    auto full = open_reflect(Cosieve{0b11}, x);
    CHECK(full.object == x);
    CHECK(full.unit == NatMap::identity(x));
    CHECK(open_reflect(Cosieve{0}, x).object == terminal(p));
    auto o = open_reflect(Cosieve{0b10}, x);
    CHECK(o.object.cards() == std::vector<std::size_t>{3, 3});
    CHECK(o.unit.at(0) == x.edge(0, 1));

    for (auto& b : small_bases()) {
        CosieveLattice l(b);
        for (auto& y : enumerate_copresheaves(b, 2))
            for (auto u : l.elements()) {
                auto r = open_reflect(u, y);
                CHECK(r.object == exponential(subterminal_from_cosieve(b, u), y).object);
                for (std::size_t i = 0; i < b.size(); ++i)
                    CHECK(r.object.card(i) == naive_limit(y, u.bits & b.up(i)).size());
            }
    }
}

TEST_CASE("closed reflection") {
    auto p = Poset::chain(2);
    auto x = two(2, 3, {2, 0});
    CHECK(closed_reflect(Cosieve{0}, x).object == x);
    CHECK(closed_reflect(Cosieve{0b11}, x).object == terminal(p));
    CHECK(closed_reflect(Cosieve{0b10}, x).object.cards() == std::vector<std::size_t>{2, 1});

    for (auto& b : small_bases()) {
        CosieveLattice l(b);
        for (auto& y : enumerate_copresheaves(b, 2))
            for (auto v : l.elements()) {
                auto pv = subterminal_from_cosieve(b, v);
                auto xp = product(y, pv);
                auto po = pushout(xp.legs[0], xp.legs[1]);
                auto c = closed_reflect(v, y);
                CHECK(c.object == po.object);
                CHECK(c.unit == po.legs[0]);
            }
    }
}

TEST_CASE("composite reflector") {
    auto p = Poset::chain(2);
    auto x = two(2, 3, {2, 0});
    CHECK(reflect(Modality::top(p), x).object == x);
    CHECK(reflect(Modality::bottom(p), x).object == terminal(p));
    CHECK(reflect(Modality(p, Cosieve{0b11}, Cosieve{0b10}), x).object.cards() == std::vector<std::size_t>{2, 1});
    for (auto& y : enumerate_copresheaves(p, 2)) {
        CHECK(is_modal(Modality::top(p), y));
        for (auto& m : all_modalities(p)) {
            CHECK(is_modal(m, terminal(p)));
            CHECK(is_connected(m, terminal(p)));
        }
    }
    for (auto& b : small_bases()) {
        CosieveLattice l(b);
        for (auto u : l.elements())
            CHECK(is_connected(Modality::open_at(b, u), subterminal_from_cosieve(b, u)));
    }
}

TEST_CASE("modal and connected objects match the Kan extension description") {
    for (auto& b : small_bases()) {
        auto corpus = enumerate_copresheaves(b, 2);
        for (auto& m : all_modalities(b))
            for (auto& x : corpus) {
                CHECK(is_modal(m, x) == modal_oracle(m.local(), x));
                CHECK(is_connected(m, x) == connected_oracle(m.local(), x));
            }
    }
}

TEST_CASE("reflections are idempotent and universal") {
    for (auto& b : {Poset::chain(2), span_poset(), Poset::antichain(2)}) {
        auto corpus = enumerate_copresheaves(b, 2);
        for (auto& m : all_modalities(b)) {
            std::vector<Copresheaf> modal;
            for (auto& y : corpus)
                if (is_modal(m, y)) modal.push_back(y);
            for (std::size_t k = 0; k < corpus.size(); k += 3) {
                const auto& x = corpus[k];
                auto r = reflect(m, x);
                CHECK(is_modal(m, r.object));
                CHECK(is_iso(reflect(m, r.object).unit));
                for (std::size_t l = 0; l < modal.size(); l += 4) {
                    auto rx = hom_set(r.object, modal[l]);
                    auto hx = hom_set(x, modal[l]);
                    REQUIRE(rx.size() == hx.size());
                    std::set<std::vector<Table>> seen;
                    for (auto& g : rx) seen.insert(compose(g, r.unit).comps());
                    CHECK(seen.size() == hx.size());
                }
            }
        }
    }
}

TEST_CASE("reflect_map is the functorial action") {
    auto b = Poset::chain(3);
    auto corpus = enumerate_copresheaves(b, 2);
    for (auto& m : all_modalities(b))
        for (std::size_t k = 0; k < corpus.size(); k += 9)
            for (std::size_t l = 1; l < corpus.size(); l += 11)
                for (auto& f : hom_set(corpus[k], corpus[l])) {
                    auto rf = reflect_map(m, f);
                    CHECK(compose(rf, reflect(m, corpus[k]).unit) == compose(reflect(m, corpus[l]).unit, f));
                }
}

TEST_CASE("equivalence of pairs is equality of modal classes") {
    for (auto& b : small_bases()) {
        CorpusIndex idx(enumerate_copresheaves(b, 2));
        auto ms = all_modalities(b);
        for (auto& a : ms) {
            CHECK(equivalent(a, a.canonical()));
            for (auto& c : ms) CHECK(equivalent(a, c) == (idx.modal(a) == idx.modal(c)));
        }
    }
}

TEST_CASE("strong disjointness criterion agrees with the corpus") {
    for (auto& b : small_bases()) {
        CorpusIndex idx(enumerate_copresheaves(b, 1));
        auto ms = all_modalities(b);
        for (auto& a : ms)
            for (auto& c : ms) CHECK(strongly_disjoint(a, c) == idx.disjoint_on_corpus(a, c));
    }
}

TEST_CASE("meets") {
    for (auto& b : small_bases()) {
        CorpusIndex idx(enumerate_copresheaves(b, 2));
        auto ms = all_modalities(b);
        for (auto& a : ms)
            for (auto& c : ms) {
                auto mc = meet(a, c);
                const auto& ma = idx.modal(a);
                const auto& mcc = idx.modal(c);
                const auto& mm = idx.modal(mc);
                for (std::size_t k = 0; k < ma.size(); ++k) CHECK(mm[k] == (ma[k] && mcc[k]));
            }
    }
}

TEST_CASE("relative reflection") {
    auto b = Poset::chain(2);
    auto corpus = enumerate_copresheaves(b, 2);
    for (auto& m : all_modalities(b))
        for (auto& x : corpus) {
            auto r = reflect_rel(m, to_terminal(x));
            CHECK(r.object == reflect(m, x).object);
            CHECK(r.unit == reflect(m, x).unit);
            auto id = reflect_rel(m, NatMap::identity(x));
            CHECK(is_iso(id.unit));
        }
    // ({1},{1}) over Y: fibre data at 1 replaced by Y(1)
    Modality m(b, Cosieve{0b10}, Cosieve{0b10});
    auto x = two(2, 2, {0, 1});
    auto y = two(1, 1, {0});
    auto r = reflect_rel(m, to_terminal(x));
    CHECK(r.object.cards() == std::vector<std::size_t>{1, 1});

    for (auto& base : {Poset::chain(2), span_poset()}) {
        auto cs = enumerate_copresheaves(base, 2);
        for (auto& mm : all_modalities(base))
            for (std::size_t k = 0; k < cs.size(); k += 5)
                for (std::size_t l = 0; l < cs.size(); l += 7)
                    for (auto& f : hom_set(cs[k], cs[l])) {
                        auto rr = reflect_rel(mm, f);
                        CHECK(compose(rr.proj, rr.unit) == f);
                        CHECK(is_modal_rel(mm, rr.proj));
                        // the first leg is connected relative to the second
                        auto again = reflect_rel(mm, rr.unit);
                        CHECK(is_iso(again.proj));
                    }
    }
}

TEST_CASE("join reflector") {
    auto t = sketch_catalog("functor");
    auto p = t.base();
    LatticeMorphism id(p, p, CosieveLattice(p).elements());
    auto f = mode_from_prop(t, id);
    for (auto& x : enumerate_copresheaves(p, 2)) {
        auto r = reflect_join_family(f, p.full(), x);
        CHECK(is_iso(r.unit));
        CHECK(reflect_join({f.modes[1]}, x).object == reflect(f.modes[1], x).object);
    }
    auto e = reflect_join({f.modes[1]}, initial(p)).object;
    for (std::size_t i = 0; i < p.size(); ++i)
        CHECK(e.card(i) == naive_limit(initial(p), f.modes[1].local() & p.up(i)).size());
    CHECK(reflect_join({}, two(2, 2, {0, 1})).object == terminal(p));
    CHECK_THROWS_AS(reflect_join({Modality::top(p), Modality::top(p)}, terminal(p)), AxiomViolation);
}

TEST_CASE("mode_from_prop") {
    auto t = sketch_catalog("functor");
    auto p = t.base();
    auto f = mode_from_prop(t, LatticeMorphism(p, p, CosieveLattice(p).elements()));
    CHECK(f.modes[0] == Modality(p, Cosieve{0b11}, Cosieve{0b10}));
    CHECK(f.modes[1] == Modality(p, Cosieve{0b10}, Cosieve{0}));

    auto top = mode_from_prop(t, LatticeMorphism(p, p, std::vector<Cosieve>(3, Cosieve{0b11})));
    for (auto& m : top.modes) CHECK(m == Modality(p, Cosieve{0b11}, Cosieve{0b11}));

    auto s = sketch_catalog("span");
    auto fs = mode_from_prop(s, LatticeMorphism(s.base(), s.base(), CosieveLattice(s.base()).elements()));
    auto zo = s.base().index_of("01");
    CHECK(fs.modes[zo].open().bits == s.base().full());
    CHECK(names_of(s.base(), fs.modes[zo].closed().bits) == std::vector<std::string>{"0", "1"});

    // non-monotone tables are rejected
    std::vector<Cosieve> bad{Cosieve{0}, Cosieve{0b11}, Cosieve{0b10}};
    CHECK_THROWS_AS(mode_from_prop(t, LatticeMorphism(p, p, bad)), InvalidLatticeMorphism);
}

TEST_CASE("lattice morphism enumeration matches a filtered scan") {
    for (auto& a : small_bases())
        for (auto& b : small_bases()) {
            CosieveLattice la(a), lb(b);
            std::size_t n = la.size(), expect = 0;
            std::vector<Cosieve> table(n);
            std::size_t total = 1;
            for (std::size_t k = 0; k < n; ++k) total *= lb.size();
            if (total > 20000) continue;
            for (std::size_t code = 0; code < total; ++code) {
                std::size_t c = code;
                for (auto& v : table) {
                    v = lb.elements()[c % lb.size()];
                    c /= lb.size();
                }
                expect += LatticeMorphism(a, b, table).violations().empty();
            }
            auto got = all_lattice_morphisms(a, b);
            CHECK(got.size() == expect);
            for (auto& g : got) CHECK(g.violations().empty());
        }
}

TEST_CASE("prop_canonical") {
    auto t = sketch_catalog("functor");
    auto p = t.base();
    LatticeMorphism id(p, p, CosieveLattice(p).elements());
    auto f = mode_from_prop(t, id);
    auto back = prop_canonical(f);
    CHECK(back == id);
    CHECK(back(Cosieve{0b11}) == Cosieve{0b11});
    CHECK(back(Cosieve{0}) == Cosieve{0});

    ModeFamily tops{t, p, {Modality::top(p), Modality::top(p)}};
    CHECK_THROWS_AS(prop_canonical(tops), AxiomViolation);
}

TEST_CASE("axiom checks") {
    for (auto name : {"functor", "triangle"}) {
        auto t = sketch_catalog(name);
        auto p = t.base();
        auto f = mode_from_prop(t, LatticeMorphism(p, p, CosieveLattice(p).elements()));
        auto r = check_axioms(f, enumerate_copresheaves(p, 2));
        CHECK(r.a1);
        CHECK(r.a2);
        CHECK(r.a3);
        CHECK(r.witnesses.empty());
    }
    auto t = sketch_catalog("functor");
    ModeFamily tops{t, t.base(), {Modality::top(t.base()), Modality::top(t.base())}};
    auto r = check_axioms(tops, enumerate_copresheaves(t.base(), 2));
    CHECK_FALSE(r.a1);
    REQUIRE_FALSE(r.witnesses.empty());
    CHECK(r.witnesses[0].axiom == "A1");

    // a triangle whose middle modality does not invert
    auto tri = sketch_catalog("triangle");
    auto p = tri.base();
    ModeFamily g{tri, p, {Modality::top(p), Modality::top(p), Modality::top(p)}};
    auto r2 = check_axioms(g, enumerate_copresheaves(p, 1));
    CHECK_FALSE(r2.a1);
}

TEST_CASE("fracture squares") {
    auto p = Poset::chain(2);
    auto x = two(3, 2, {0, 1, 1});
    for (Mask u : {Mask{0}, Mask{0b10}, Mask{0b11}}) {
        auto s = fracture_square(Cosieve{u}, x);
        CHECK(s.commutes);
        CHECK(s.is_pullback);
        REQUIRE(s.iso);
        CHECK(is_iso(*s.iso));
    }
    for (auto& b : small_bases()) {
        CosieveLattice l(b);
        for (auto u : l.elements())
            for (auto& y : enumerate_copresheaves(b, 1)) {
                auto s = fracture_square(u, y);
                CHECK(s.is_pullback);
                CHECK(isomorphic(s.reassembled, y));
            }
    }
}

}
