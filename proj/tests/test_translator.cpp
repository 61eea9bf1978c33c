#include "doctest.h"

#include <functional>
#include <sstream>

#include "msk/acceptance.hpp"
#include "msk/errors.hpp"
#include "msk/translate.hpp"

using namespace msk;

namespace {

std::vector<GoldenCase> load_golden(const std::string& shape) {
    return load_golden_file(std::string(MSK_GOLDEN_DIR) + "/" + shape + ".txt");
}

TypeContext source_ctx(const std::vector<std::string>& bases) {
    TypeContext c;
    for (const auto& b : bases) c.bases[b] = mk::u();
    return c;
}

// base X becomes the outermost free variable
E abstract_base(const E& e, const std::string& name, std::size_t depth = 0) {
    if (e->tag == Tag::Base && e->name == name) return mk::var(depth);
    auto n = std::make_shared<Expr>(*e);
    for (std::size_t i = 0; i < n->kids.size(); ++i) {
        bool under = (e->tag == Tag::Pi || e->tag == Tag::Sigma) ? i == 1 : e->tag == Tag::Lam;
        n->kids[i] = abstract_base(e->kids[i], name, depth + (under ? 1 : 0));
    }
    return n;
}

Copresheaf two(std::size_t c0, std::size_t c1, Table e) {
    return Copresheaf(Poset::chain(2), {c0, c1}, {{{0, 1}, std::move(e)}});
}

} // namespace

TEST_SUITE("translator") {

TEST_CASE("parser examples and errors") {
    CHECK(alpha_eq(parse_expr("Unit", {}), mk::unit()));
    CHECK(alpha_eq(parse_expr("Pi x:Unit. Unit", {}), mk::pi("x", mk::unit(), mk::unit())));
    E sig = parse_expr("Sig y:B. Id B y y", {"B"});
    CHECK(alpha_eq(sig, mk::sigma("y", mk::base("B"), mk::id(mk::base("B"), mk::var(0), mk::var(0)))));
    CHECK(alpha_eq(parse_expr("Σ y:B. Id B y y", {"B"}), sig));
    CHECK(alpha_eq(parse_expr("B -> B -> Unit", {"B"}),
                   mk::arrow(mk::base("B"), mk::arrow(mk::base("B"), mk::unit()))));
    CHECK(alpha_eq(parse_expr("\\x y. (x, fst y)", {}), mk::lam("x", mk::lam("y", mk::pair(mk::var(1), mk::fst(mk::var(0)))))));
    CHECK(alpha_eq(parse_expr("λf. f tt tt", {}), mk::lam("f", mk::app(mk::app(mk::var(0), mk::tt()), mk::tt()))));

    auto position = [](const std::string& text) -> std::pair<std::size_t, std::size_t> {
        try {
            parse_expr(text, {"B"});
        } catch (const ParseError& e) {
            return {e.line(), e.column()};
        }
        return {0, 0};
    };
    CHECK(position("Pi x:Unit") == std::pair<std::size_t, std::size_t>{1, 10});
    CHECK(position("Unit ->\n  Foo") == std::pair<std::size_t, std::size_t>{2, 3});
    CHECK(position("Sig x B. B") == std::pair<std::size_t, std::size_t>{1, 7});
    CHECK(position("(Unit") == std::pair<std::size_t, std::size_t>{1, 6});
    CHECK_THROWS_AS(parse_expr("Unit $", {}), ParseError);

    auto f = parse_file("-- decls\nbase B\nbase C\nPi x:B. C\n");
    CHECK(f.bases == std::vector<std::string>{"B", "C"});
    CHECK(alpha_eq(f.expr, mk::arrow(mk::base("B"), mk::base("C"))));
    CHECK_THROWS_AS(parse_file("base B\nbase B\nB"), ParseError);
}

TEST_CASE("printer output parses back") {
    for (const auto& t : type_corpus({"B", "C"}, 3, 400)) {
        std::string s = show(t);
        CHECK_MESSAGE(alpha_eq(parse_expr(s, {"B", "C"}), t), s);
    }
    for (const char* shape : {"two", "span", "chain3"}) {
        Shape sh = shape_named(shape);
        std::vector<std::string> decls;
        for (const auto& [n, ty] : target_context({"B", "C"}, sh).bases) decls.push_back(n);
        for (const auto& t : type_corpus({"B", "C"}, 2, 60))
            for (const auto& c : translate_sketch(t, sh)) CHECK_MESSAGE(alpha_eq(parse_expr(show(c), decls), c), show(c));
    }
}

TEST_CASE("typechecker") {
    TypeContext empty;
    CHECK(check(empty, mk::tt(), mk::unit()) != nullptr);
    TypeContext xu;
    xu.vars.emplace_back("x", mk::unit());
    CHECK(check(xu, mk::var(0), mk::unit()) != nullptr);
    CHECK_THROWS_AS(infer(xu, mk::app(mk::var(0), mk::tt())), TypeError);
    CHECK_THROWS_AS(check(empty, mk::tt(), mk::u()), TypeError);
    CHECK_THROWS_AS(infer(empty, mk::var(0)), TypeError);

    // eta for Unit: x = tt holds by refl
    CHECK(check(xu, mk::refl(), mk::id(mk::unit(), mk::var(0), mk::tt())) != nullptr);
    TypeContext b = source_ctx({"B"});
    b.vars.emplace_back("x", mk::base("B"));
    b.vars.emplace_back("y", mk::base("B"));
    CHECK_THROWS_AS(check(b, mk::refl(), mk::id(mk::base("B"), mk::var(0), mk::var(1))), TypeError);
    CHECK(check(b, mk::refl(), mk::id(mk::base("B"), mk::var(1), mk::var(1))) != nullptr);

    // beta in conversion
    E idf = parse_expr("\\x. x", {});
    E ann = check(source_ctx({"B"}), idf, parse_expr("B -> B", {"B"}));
    CHECK(ann->annot != nullptr);
    TypeContext bx = source_ctx({"B"});
    bx.vars.emplace_back("x", mk::base("B"));
    E lam_ann = check(bx, mk::lam("z", mk::var(0)), mk::arrow(mk::base("B"), mk::base("B")));
    CHECK(check(bx, mk::refl(), mk::id(mk::base("B"), mk::app(lam_ann, mk::var(0)), mk::var(0))) != nullptr);

    // pairs and projections
    E sig = parse_expr("Sig x:B. Id B x x", {"B"});
    TypeContext ps = source_ctx({"B"});
    ps.vars.emplace_back("p", sig);
    CHECK(conv(infer(ps, mk::snd(mk::var(0))).type, mk::id(mk::base("B"), mk::fst(mk::var(0)), mk::fst(mk::var(0)))));
    CHECK_THROWS_AS(infer(ps, mk::fst(mk::fst(mk::var(0)))), TypeError);
    CHECK_THROWS_AS(check_type(source_ctx({}), parse_expr("Pi x:B. x", {"B"})), TypeError);
}

TEST_CASE("golden translations") {
    for (const char* shape : {"two", "span", "chain3"}) {
        Shape sh = shape_named(shape);
        auto cases = load_golden(shape);
        CHECK(cases.size() >= 3);
        TypeContext tgt = target_context({"A"}, sh);
        for (const auto& gc : cases) {
            E ty = check_type(source_ctx({"A"}), parse_expr(gc.source, {"A"}));
            auto comps = translate_sketch(ty, sh);
            REQUIRE(comps.size() == gc.expected.size());
            for (std::size_t i = 0; i < comps.size(); ++i) CHECK_MESSAGE(show(comps[i]) == gc.expected[i], shape << ": " << gc.source);
            auto types = component_types(comps, sh);
            for (std::size_t i = 0; i < comps.size(); ++i) CHECK_NOTHROW(check(tgt, comps[i], types[i]));
        }
    }
    auto g = translate_two(mk::unit());
    CHECK(show(g.stat) == "Unit");
    CHECK(show(g.relation) == "λ_. Unit");
}

TEST_CASE("shape arities and orders") {
    CHECK(shape_named("two").levels == std::vector<std::size_t>{1, 0});
    CHECK(shape_named("span").levels == std::vector<std::size_t>{0, 1, 2});
    CHECK(shape_named("chain3").levels == std::vector<std::size_t>{2, 1, 0});
    CHECK(translate_sketch(mk::u(), shape_named("two")).size() == 2);
    CHECK(translate_sketch(mk::u(), shape_named("span")).size() == 3);
    CHECK(translate_sketch(mk::u(), shape_named("chain3")).size() == 3);
    CHECK_THROWS_AS(shape_named("square"), UnknownName);

    auto ctx = target_context({"B"}, shape_named("chain3"));
    CHECK(show(ctx.bases.at("B_2")) == "U");
    CHECK(show(ctx.bases.at("B_1")) == "B_2 → U");
    CHECK(show(ctx.bases.at("B_0")) == "Π x2:B_2. B_1 x2 → U");
    auto sp = target_context({"B"}, shape_named("span"));
    CHECK(show(sp.bases.at("B_01")) == "B_0 → B_1 → U");
}

TEST_CASE("translation preserves typing") {
    auto corpus = type_corpus({"B", "C"}, 3, 400);
    CHECK(corpus.size() >= 200);
    for (const char* shape : {"two", "span", "chain3"}) {
        Shape sh = shape_named(shape);
        TypeContext tgt = target_context({"B", "C"}, sh);
        for (const auto& t : corpus) {
            E ty = check_type(source_ctx({"B", "C"}), t);
            auto comps = translate_sketch(ty, sh);
            auto types = component_types(comps, sh);
            for (std::size_t i = 0; i < comps.size(); ++i) {
                bool ok = true;
                try {
                    check(tgt, comps[i], types[i]);
                } catch (const TypeError& e) {
                    ok = false;
                    MESSAGE(shape << " " << show(t) << ": " << e.what());
                }
                CHECK(ok);
            }
        }
    }
    // terms too: a lambda and an application
    TypeContext src = source_ctx({"B"});
    E ty = parse_expr("Pi f:B -> B. Pi x:B. Id (B -> B) f (\\y. f y)", {"B"});
    E checked = check_type(src, ty);
    auto comps = translate_sketch(checked, shape_named("two"));
    CHECK_NOTHROW(check(target_context({"B"}, shape_named("two")), comps[1], component_types(comps, shape_named("two"))[1]));
}

TEST_CASE("substitution commutes with translation") {
    // C over a type variable X, instantiated at closed types
    auto corpus = type_corpus({"B", "X"}, 2, 150);
    std::vector<E> subs = {mk::unit(), mk::base("B"), mk::u(), parse_expr("B -> B", {"B"}),
                           parse_expr("Sig y:B. Id B y y", {"B"}), parse_expr("Pi y:B. Unit", {"B"})};
    std::size_t checked = 0;
    for (const char* shape : {"two", "span", "chain3"}) {
        Shape sh = shape_named(shape);
        for (const auto& t : corpus) {
            E open = abstract_base(t, "X");
            auto tr = translate_open(open, sh, 1);
            for (const auto& a : subs) {
                auto direct = translate_sketch(instantiate(open, a), sh);
                auto comps = translate_sketch(a, sh);
                for (std::size_t i = 0; i < tr.size(); ++i) {
                    E via = normalize(close_levels(replace_levels(tr[i], comps), 0));
                    CHECK_MESSAGE(alpha_eq(via, direct[i]), shape << " " << show(t) << " at " << show(a));
                    ++checked;
                }
            }
        }
    }
    CHECK(checked > 1000);
}

TEST_CASE("interpretation agrees with the copresheaf constructions") {
    std::vector<Poset> bases = {Poset::chain(2), Poset::build({"0", "1", "01"}, {{"01", "0"}, {"01", "1"}}),
                                Poset::chain(3)};
    for (const auto& p : bases) {
        auto corpus = enumerate_copresheaves(p, 2, true);
        std::size_t step = std::max<std::size_t>(1, corpus.size() / 6);
        for (std::size_t i = 0; i < corpus.size(); i += step) {
            const auto& b = corpus[i];
            Model m = copresheaf_model(p, {{"B", b}});
            auto interp = [&](const char* text) {
                return interpret_model(check_type(source_ctx({"B"}), parse_expr(text, {"B"})), m);
            };
            CHECK(interp("Unit") == terminal(p));
            CHECK(isomorphic(interp("Sig y:B. Unit"), b));
            CHECK(isomorphic(interp("Pi x:B. Unit"), terminal(p)));
            CHECK(isomorphic(interp("Pi x:B. B"), exponential(b, b).object));
            CHECK(isomorphic(interp("Sig x:B. B"), product(b, b).object));
            CHECK(isomorphic(interp("Sig x:B. Sig y:B. Id B x y"), b));
            CHECK(isomorphic(interp("Pi x:B. Id B x x"), terminal(p)));
            CHECK(isomorphic(interp("B -> Unit -> B"), exponential(b, b).object));
        }
    }
}

TEST_CASE("oracle refuses the universe") {
    Model m = copresheaf_model(Poset::chain(2), {});
    CHECK_THROWS_AS(interpret_model(mk::u(), m), OracleUnsupported);
    CHECK_THROWS_AS(interpret_model(mk::arrow(mk::unit(), mk::u()), m), OracleUnsupported);
}

TEST_CASE("check_translation examples") {
    auto unit = check_translation(mk::unit(), {});
    CHECK(unit.iso);
    CHECK(unit.direct == terminal(Poset::chain(2)));

    std::vector<GluedDecl> env = {{"B", 2, {1, 3}}};
    auto b = check_translation(mk::base("B"), env);
    CHECK(b.direct.cards() == std::vector<std::size_t>{4, 2});
    CHECK(b.reassembled.cards() == std::vector<std::size_t>{4, 2});
    CHECK(b.iso);
    REQUIRE(b.witness);
    CHECK(is_iso(*b.witness));

    auto pi = check_translation(parse_expr("Pi x:B. Id B x x", {"B"}), env);
    CHECK(pi.iso);
    auto fn = check_translation(parse_expr("B -> B", {"B"}), env);
    CHECK(fn.iso);
    CHECK(fn.direct.card(1) == 4);
    CHECK(fn.witness.has_value());
    CHECK_THROWS_AS(check_translation(mk::u(), env), OracleUnsupported);
    CHECK_THROWS_AS(check_translation(mk::base("B"), {{"B", 2, {1}}}), SchemaError);
}

TEST_CASE("check_translation over a corpus") {
    auto corpus = type_corpus({"B", "C"}, 2, 120);
    std::vector<GluedDecl> env = {{"B", 1, {2}}, {"C", 2, {0, 3}}};
    for (const auto& t : corpus) {
        auto v = check_translation(t, env);
        CHECK_MESSAGE(v.iso, show(t) << ": " << v.detail);
    }
}

}
