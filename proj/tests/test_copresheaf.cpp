#include "doctest.h"

#include <cmath>

#include "msk/copresheaf.hpp"
#include "msk/errors.hpp"
#include "msk/sketch.hpp"

using namespace msk;

namespace {

Copresheaf two(std::size_t c0, std::size_t c1, Table e) {
    return Copresheaf(Poset::chain(2), {c0, c1}, {{{0, 1}, std::move(e)}});
}

Poset diamond() {
    return Poset::build({"0", "1", "2", "3"}, {{"0", "1"}, {"0", "2"}, {"1", "3"}, {"2", "3"}});
}

std::size_t ipow(std::size_t b, std::size_t e) {
    std::size_t r = 1;
    while (e--) r *= b;
    return r;
}

// Number of copresheaves on {0<1} with cards <= n: every pair of cards with
// every function between them.
std::size_t two_count_oracle(std::size_t n) {
    std::size_t t = 0;
    for (std::size_t a = 0; a <= n; ++a)
        for (std::size_t b = 0; b <= n; ++b) t += ipow(b, a);
    return t;
}

// Brute-force natural maps: every tuple of functions, filtered by naturality.
std::size_t hom_oracle(const Copresheaf& x, const Copresheaf& y) {
    const auto& p = x.base();
    std::vector<Table> f(p.size());
    std::size_t total = 1;
    for (std::size_t i = 0; i < p.size(); ++i) total *= ipow(y.card(i), x.card(i));
    std::size_t count = 0;
    for (std::size_t code = 0; code < total; ++code) {
        std::size_t c = code;
        for (std::size_t i = 0; i < p.size(); ++i) {
            f[i].assign(x.card(i), 0);
            for (auto& v : f[i]) {
                v = c % y.card(i);
                c /= y.card(i);
            }
        }
        bool ok = true;
        for (std::size_t a = 0; a < p.size() && ok; ++a)
            for (std::size_t b = 0; b < p.size() && ok; ++b) {
                if (!p.leq(a, b)) continue;
                for (std::size_t e = 0; e < x.card(a); ++e)
                    if (y.transition(a, b)[f[a][e]] != f[b][x.transition(a, b)[e]]) ok = false;
            }
        count += ok;
    }
    return count;
}

std::vector<Copresheaf> small_corpus() {
    std::vector<Copresheaf> out;
    for (auto p : {Poset::chain(2), Poset::antichain(2), Poset::build({"0", "1", "01"}, {{"01", "0"}, {"01", "1"}})})
        for (auto& c : enumerate_copresheaves(p, 2)) out.push_back(c);
    return out;
}

} // namespace

TEST_SUITE("copresheaf") {

TEST_CASE("transitions") {
    auto x = two(2, 1, {0, 0});
    CHECK(x.transition(0, 1) == Table{0, 0});
    CHECK(x.transition(0, 0) == Table{0, 1});
    CHECK_THROWS_AS(x.transition(1, 0), NotComparable);

    auto c3 = Copresheaf(Poset::chain(3), {3, 2, 2}, {{{0, 1}, {1, 0, 1}}, {{1, 2}, {1, 0}}});
    CHECK(c3.transition(0, 2) == compose(c3.transition(1, 2), c3.transition(0, 1)));
    CHECK(c3.transition(0, 2) == Table{0, 1, 0});

    std::map<Edge, Table> good{{{0, 1}, {0, 1}}, {{0, 2}, {1, 0}}, {{1, 3}, {1, 0}}, {{2, 3}, {0, 1}}};
    auto d = Copresheaf(diamond(), {2, 2, 2, 2}, good);
    CHECK(d.transition(0, 3) == Table{1, 0});
    auto bad = good;
    bad[{2, 3}] = {1, 0};
    CHECK_THROWS_AS(Copresheaf(diamond(), {2, 2, 2, 2}, bad), NotFunctorial);
    CHECK_THROWS_AS(Copresheaf(Poset::chain(2), {1, 0}, {{{0, 1}, {0}}}), SchemaError);
}

TEST_CASE("enumeration counts") {
    CHECK(enumerate_copresheaves(Poset::point(), 1).size() == 2);
    CHECK(enumerate_copresheaves(Poset::chain(2), 1).size() == two_count_oracle(1));
    CHECK(enumerate_copresheaves(Poset::chain(2), 1).size() == 3);
    CHECK(enumerate_copresheaves(Poset::chain(2), 2).size() == two_count_oracle(2));
    CHECK(enumerate_copresheaves(Poset::antichain(2), 1).size() == 4);
    CHECK(enumerate_copresheaves(Poset(), 3).size() == 1);
    // chain3: cards (a,b,c) with a function a->b and b->c
    std::size_t c3 = 0;
    for (std::size_t a = 0; a <= 2; ++a)
        for (std::size_t b = 0; b <= 2; ++b)
            for (std::size_t c = 0; c <= 2; ++c) c3 += ipow(b, a) * ipow(c, b);
    CHECK(enumerate_copresheaves(Poset::chain(3), 2).size() == c3);
    // diamond: only commuting squares survive
    auto d = enumerate_copresheaves(diamond(), 1);
    CHECK(d.size() == 6);  // the cosieves of the diamond

    auto iso = enumerate_copresheaves(Poset::chain(2), 2, true);
    // up to iso: one class per pair of cards, except bijection vs constant on (2,2)
    CHECK(iso.size() == 8);
    CHECK_THROWS_AS(enumerate_copresheaves(Poset::chain(3), 3, false, 50), EnumerationBudgetExceeded);
}

TEST_CASE("limits") {
    auto p = Poset::chain(2);
    CHECK(terminal(p).cards() == std::vector<std::size_t>{1, 1});
    auto x = two(2, 1, {0, 0}), y = two(3, 1, {0, 0, 0});
    CHECK(product(x, y).object.cards() == std::vector<std::size_t>{6, 1});
    auto f = NatMap::identity(x);
    CHECK(isomorphic(equalizer(f, f).object, x));
    CHECK(initial(p).cards() == std::vector<std::size_t>{0, 0});
    CHECK(coproduct(two(1, 1, {0}), two(1, 1, {0})).object.cards() == std::vector<std::size_t>{2, 2});
    CHECK_THROWS_AS(product(x, terminal(Poset::antichain(2))), BaseMismatch);
}

TEST_CASE("hom sets") {
    auto pt = Poset::point();
    auto a = Copresheaf(pt, {2}, {}), b = Copresheaf(pt, {3}, {});
    CHECK(hom_set(a, b).size() == 9);
    auto corpus = small_corpus();
    for (auto& x : corpus) {
        CHECK(hom_set(x, terminal(x.base())).size() == 1);
        // maps from the terminal are global sections
        Budget b;
        auto s = hom_set(terminal(x.base()), x).size();
        CHECK(s == limit_tuples(x, x.base().full(), b).size());
    }
    auto p2 = Poset::chain(2);
    CHECK(hom_set(terminal(p2), subterminal_from_cosieve(p2, Cosieve{0b10})).empty());
    for (std::size_t k = 0; k < corpus.size(); k += 3)
        for (std::size_t l = 0; l < corpus.size(); l += 5)
            if (corpus[k].base() == corpus[l].base()) CHECK(hom_count(corpus[k], corpus[l]) == hom_oracle(corpus[k], corpus[l]));
    CHECK_THROWS_AS(hom_set(Copresheaf(pt, {6}, {}), Copresheaf(pt, {6}, {}), 1000), EnumerationBudgetExceeded);
}

TEST_CASE("universal properties of limits and colimits") {
    auto corpus = small_corpus();
    std::vector<Copresheaf> probes;
    for (std::size_t k = 0; k < corpus.size(); k += 7) probes.push_back(corpus[k]);
    for (std::size_t k = 0; k < corpus.size(); k += 11)
        for (std::size_t l = 1; l < corpus.size(); l += 13) {
            const auto& x = corpus[k];
            const auto& y = corpus[l];
            if (!(x.base() == y.base())) continue;
            auto prod = product(x, y);
            auto co = coproduct(x, y);
            for (auto& w : probes) {
                if (!(w.base() == x.base())) continue;
                CHECK(hom_count(w, prod.object) == hom_count(w, x) * hom_count(w, y));
                CHECK(hom_count(co.object, w) == hom_count(x, w) * hom_count(y, w));
                for (auto& f : hom_set(w, x))
                    for (auto& g : hom_set(w, y)) {
                        auto h = pair_map(prod, f, g);
                        CHECK(compose(prod.legs[0], h) == f);
                        CHECK(compose(prod.legs[1], h) == g);
                    }
            }
            // pullbacks and pushouts of every pair of maps through a common object
            for (auto& z : probes) {
                if (!(z.base() == x.base())) continue;
                auto fs = hom_set(x, z);
                auto gs = hom_set(y, z);
                for (std::size_t a = 0; a < fs.size() && a < 3; ++a)
                    for (std::size_t b = 0; b < gs.size() && b < 3; ++b) {
                        auto pb = pullback(fs[a], gs[b]);
                        CHECK(compose(fs[a], pb.legs[0]) == compose(gs[b], pb.legs[1]));
                        for (auto& w : probes) {
                            if (!(w.base() == x.base())) continue;
                            std::size_t cones = 0;
                            for (auto& u : hom_set(w, x))
                                for (auto& v : hom_set(w, y)) cones += compose(fs[a], u) == compose(gs[b], v);
                            CHECK(hom_count(w, pb.object) == cones);
                        }
                    }
                auto us = hom_set(z, x);
                auto vs = hom_set(z, y);
                for (std::size_t a = 0; a < us.size() && a < 3; ++a)
                    for (std::size_t b = 0; b < vs.size() && b < 3; ++b) {
                        auto po = pushout(us[a], vs[b]);
                        CHECK(compose(po.legs[0], us[a]) == compose(po.legs[1], vs[b]));
                        for (auto& w : probes) {
                            if (!(w.base() == x.base())) continue;
                            std::size_t cocones = 0;
                            for (auto& u : hom_set(x, w))
                                for (auto& v : hom_set(y, w)) cocones += compose(u, us[a]) == compose(v, vs[b]);
                            CHECK(hom_count(po.object, w) == cocones);
                        }
                    }
            }
        }
}

TEST_CASE("equalizer universal property") {
    auto corpus = small_corpus();
    for (std::size_t k = 0; k < corpus.size(); k += 9) {
        const auto& x = corpus[k];
        for (std::size_t l = 0; l < corpus.size(); l += 10) {
            const auto& y = corpus[l];
            if (!(x.base() == y.base())) continue;
            auto hs = hom_set(x, y);
            for (std::size_t a = 0; a < hs.size() && a < 4; ++a)
                for (std::size_t b = 0; b < hs.size() && b < 4; ++b) {
                    auto eq = equalizer(hs[a], hs[b]);
                    CHECK(is_mono(eq.legs[0]));
                    for (std::size_t w = 0; w < corpus.size(); w += 17) {
                        if (!(corpus[w].base() == x.base())) continue;
                        std::size_t n = 0;
                        for (auto& u : hom_set(corpus[w], x)) n += compose(hs[a], u) == compose(hs[b], u);
                        CHECK(hom_count(corpus[w], eq.object) == n);
                    }
                }
        }
    }
}

TEST_CASE("exponentials") {
    auto p = Poset::chain(2);
    auto y = two(2, 3, {2, 0});
    CHECK(isomorphic(exponential(terminal(p), y).object, y));
    CHECK(exponential(terminal(p), y).object == y);
    auto u1 = subterminal_from_cosieve(p, Cosieve{0b10});
    auto e = exponential(u1, y).object;
    CHECK(e.cards() == std::vector<std::size_t>{3, 3});
    CHECK(e.transition(0, 1) == Table{0, 1, 2});
    for (auto& x : small_corpus()) CHECK(exponential(x, terminal(x.base())).object == terminal(x.base()));

    // adjunction: hom(Z x X, Y) ~ hom(Z, Y^X), with curry inverse to eval
    auto corpus = enumerate_copresheaves(p, 2);
    for (std::size_t a = 0; a < corpus.size(); a += 2)
        for (std::size_t b = 1; b < corpus.size(); b += 3)
            for (std::size_t c = 0; c < corpus.size(); c += 4) {
                const auto& z = corpus[a];
                const auto& x = corpus[b];
                const auto& yy = corpus[c];
                auto ex = exponential(x, yy);
                auto zx = product(z, x);
                auto lhs = hom_set(zx.object, yy);
                CHECK(lhs.size() == hom_count(z, ex.object));
                for (auto& f : lhs) {
                    auto g = curry(ex, z, x, f);
                    auto back = compose(ex.eval, product_map(g, NatMap::identity(x)));
                    CHECK(back == f);
                }
            }
}

TEST_CASE("dependent products") {
    auto pt = Poset::point();
    // Gamma terminal on a point: functions choosing an element of each fibre
    auto a = Copresheaf(pt, {3}, {});
    auto zz = Copresheaf(pt, {6}, {});
    auto z = NatMap(zz, a, {{0, 0, 1, 1, 1, 2}});
    auto dp = dependent_product(to_terminal(a), z);
    CHECK(dp.proj.source().card(0) == 2 * 3 * 1);

    auto corpus = small_corpus();
    for (std::size_t k = 0; k < corpus.size(); k += 3) {
        const auto& x = corpus[k];
        auto id = NatMap::identity(x);
        // along the identity, sections are the elements of the family's domain
        for (std::size_t l = 0; l < corpus.size(); l += 7) {
            if (!(corpus[l].base() == x.base())) continue;
            for (auto& zm : hom_set(corpus[l], x)) {
                auto d = dependent_product(id, zm);
                CHECK(isomorphic(d.proj.source(), corpus[l]));
            }
        }
        // with the identity family, Pi is Gamma
        for (std::size_t l = 0; l < corpus.size(); l += 5) {
            if (!(corpus[l].base() == x.base())) continue;
            for (auto& f : hom_set(x, corpus[l])) {
                auto d = dependent_product(f, id);
                CHECK(is_iso(d.proj));
            }
        }
    }
    // global sections of Pi over the terminal are sections of the family
    for (std::size_t k = 0; k < corpus.size(); k += 4)
        for (std::size_t l = 0; l < corpus.size(); l += 6) {
            const auto& ab = corpus[k];
            const auto& zz2 = corpus[l];
            if (!(ab.base() == zz2.base())) continue;
            for (auto& zm : hom_set(zz2, ab)) {
                auto d = dependent_product(to_terminal(ab), zm);
                std::size_t sections = 0;
                for (auto& s : hom_set(ab, zz2)) sections += compose(zm, s) == NatMap::identity(ab);
                CHECK(hom_count(terminal(ab.base()), d.proj.source()) == sections);
            }
        }
}

TEST_CASE("subterminals form the cosieve lattice") {
    for (std::size_t n = 0; n <= 4; ++n)
        for (auto& p : all_posets(n)) {
            CosieveLattice l(p);
            for (auto s : l.elements()) {
                auto x = subterminal_from_cosieve(p, s);
                CHECK(cosieve_from_subterminal(x) == s);
                CHECK(is_mono(to_terminal(x)));
            }
            CHECK(subterminal_from_cosieve(p, l.top()) == terminal(p));
            CHECK(subterminal_from_cosieve(p, l.bottom()) == initial(p));
            for (auto s : l.elements())
                for (auto t : l.elements()) {
                    auto xs = subterminal_from_cosieve(p, s), xt = subterminal_from_cosieve(p, t);
                    auto pb = pullback(to_terminal(xs), to_terminal(xt));
                    CHECK(cosieve_from_subterminal(pb.object) == CosieveLattice::meet(s, t));
                    auto co = coproduct(xs, xt);
                    auto un = image(copair_map(co, to_terminal(xs), to_terminal(xt)));
                    CHECK(cosieve_from_subterminal(un.object) == CosieveLattice::join(s, t));
                }
        }
    auto p = Poset::chain(2);
    auto one = subterminal_from_cosieve(p, Cosieve{0b10});
    CHECK(one.cards() == std::vector<std::size_t>{0, 1});
    CHECK_THROWS_AS(cosieve_from_subterminal(two(2, 1, {0, 0})), NotSubterminal);
}

TEST_CASE("isomorphism search") {
    auto x = two(2, 2, {0, 1}), y = two(2, 2, {1, 0});
    auto iso = find_iso(x, y);
    REQUIRE(iso);
    CHECK(is_iso(*iso));
    CHECK_FALSE(find_iso(two(2, 2, {0, 0}), x));
    CHECK(compose(inverse(*iso), *iso) == NatMap::identity(x));
}

}
