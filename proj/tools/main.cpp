#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "json_io.hpp"
#include "msk/acceptance.hpp"
#include "msk/errors.hpp"

using namespace msk;
using io::json;

namespace {

// exit 1 is "checks ran and failed"
struct Report {
    json body;
    bool ok = true;
};

int emit(Report r) {
    r.body["schema_version"] = io::kSchemaVersion;
    std::cout << r.body.dump() << "\n";
    return r.ok ? 0 : 1;
}

Report validate_cmd(const std::string& path) {
    auto s = io::sketch_from(io::read_file(path));
    auto v = validate_sketch(s);
    return {{{"ok", v.ok}, {"violations", v.violations}}, v.ok};
}

Report cosieves_cmd(const std::string& path) {
    auto s = io::sketch_or_poset(io::read_file(path));
    CosieveLattice l(s.base());
    json list = json::array();
    for (auto c : l.elements()) list.push_back(io::to_json(s.base(), c));
    return {{{"count", l.size()}, {"cosieves", list}}};
}

Report realize_cmd(const std::string& path) {
    auto s = io::sketch_from(io::read_file(path));
    const auto& p = s.base();
    auto chain = [&](const Chain& c) {
        json out = json::array();
        for (auto k : c) out.push_back(p.name(k));
        return out;
    };
    json homs = json::array();
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = 0; j < p.size(); ++j) {
            if (!p.leq(i, j)) continue;
            auto h = realize_hom(s, i, j);
            json classes = json::array();
            for (std::size_t c = 0; c < h.classes(); ++c) {
                json members = json::array();
                for (std::size_t k = 0; k < h.chains.size(); ++k)
                    if (h.class_of[k] == c) members.push_back(chain(h.chains[k]));
                json above = json::array();
                for (std::size_t d = 0; d < h.classes(); ++d)
                    if (h.leq[c][d]) above.push_back(d);
                classes.push_back({{"name", chain(h.class_names[c])}, {"chains", members}, {"leq", above}});
            }
            homs.push_back({{"from", p.name(i)}, {"to", p.name(j)}, {"classes", classes}});
        }
    return {{{"homs", homs}}};
}

Report mode_from_prop_cmd(const std::string& path) {
    auto j = io::read_file(path);
    auto t = io::sketch_from(j.at("sketch"));
    auto f = mode_from_prop(t, io::morphism_from(t, j));
    return {{{"family", io::to_json(f)}}};
}

Report prop_canonical_cmd(const std::string& path) {
    auto f = io::family_from(io::read_file(path));
    try {
        auto p = prop_canonical(f);
        json m = io::to_json(p);
        m["sketch"] = io::to_json(f.sketch);
        return {{{"ok", true}, {"morphism", m}}};
    } catch (const AxiomViolation& e) {
        return {{{"ok", false}, {"violation", e.what()}}, false};
    }
}

Report check_axioms_cmd(const std::string& path, std::size_t corpus_max) {
    auto f = io::family_from(io::read_file(path));
    CorpusIndex idx(enumerate_copresheaves(f.base, corpus_max));
    auto r = check_axioms(f, idx);
    return {io::to_json(r, idx.corpus()), r.ok()};
}

Report fracture_cmd(const std::string& path, const std::string& open) {
    auto x = io::copresheaf_from(io::read_file(path));
    auto sq = fracture_square(io::cosieve_arg(x.base(), open), x);
    bool ok = sq.commutes && sq.is_pullback && sq.iso.has_value();
    auto body = io::to_json(sq);
    body["ok"] = ok;
    return {body, ok};
}

std::size_t element_arg(const SketchDiagram& d, const std::string& name) { return d.sketch.base().index_of(name); }

Report translate_cmd(const std::string& path, const std::string& shape, const std::string& emit_as, bool check,
                     const std::string& env_path) {
    auto file = parse_file(io::read_text(path));
    TypeContext ctx;
    for (const auto& b : file.bases) ctx.bases[b] = mk::u();
    E ty = check_type(ctx, file.expr);
    auto sh = shape_named(shape);
    auto comps = translate_sketch(ty, sh);

    Report r;
    if (emit_as == "pretty") {
        for (std::size_t p = 0; p < comps.size(); ++p)
            std::cout << sh.poset.name(sh.levels[p]) << ": " << show(comps[p]) << "\n";
    } else if (shape == "two") {
        r.body["static"] = show(comps[0]);
        r.body["relation"] = show(comps[1]);
    } else {
        json list = json::array();
        for (std::size_t p = 0; p < comps.size(); ++p)
            list.push_back({{"element", sh.poset.name(sh.levels[p])}, {"term", show(comps[p])}});
        r.body["components"] = list;
    }

    if (check) {
        if (shape != "two") throw PreconditionFailed("--check needs --shape two");
        std::vector<GluedDecl> env;
        if (!env_path.empty()) env = io::env_from(io::read_file(env_path));
        auto v = check_translation(ty, env);
        json c = {{"iso", v.iso},
                  {"direct", io::to_json(v.direct)},
                  {"reassembled", io::to_json(v.reassembled)},
                  {"witness", v.witness ? io::to_json(*v.witness) : json(nullptr)}};
        if (!v.detail.empty()) c["detail"] = v.detail;
        r.body["check"] = c;
        r.ok = v.iso;
    }
    if (emit_as == "pretty") {
        if (check) std::cout << "check: " << (r.ok ? "iso" : "not iso") << "\n";
        return {nullptr, r.ok};
    }
    return r;
}

int selftest_cmd(bool mutant, std::size_t corpus_max, unsigned seed, const std::string& golden, bool as_json) {
    mutation::set_swap_reflector_order(mutant);
    AcceptanceOptions opt;
    opt.corpus_max = corpus_max;
    opt.seed = seed;
    opt.golden_dir = golden;
    json rows = json::array();
    bool ok = true;
    run_acceptance(opt, [&](const CriterionResult& r) {
        ok = ok && r.pass;
        if (as_json)
            rows.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
        else {
            std::printf("%s %d %-32s %7.2fs  %s\n", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(), r.seconds,
                        r.detail.c_str());
            std::fflush(stdout);
        }
    });
    if (as_json) return emit({{{"ok", ok}, {"criteria", rows}}, ok});
    return ok ? 0 : 1;
}

int fail_input(const std::string& kind, const std::string& what) {
    json e = {{"schema_version", io::kSchemaVersion}, {"error", {{"kind", kind}, {"message", what}}}};
    std::cerr << e.dump() << "\n";
    return 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"mode sketch toolkit"};
    app.require_subcommand(1);

    std::string in, in2, open, at, cosieve, shape = "two", emit_as = "json", env, golden;
    std::size_t corpus_max = 2;
    unsigned seed = 7;
    bool check = false, mutant = false, as_json = false;

    auto* validate = app.add_subcommand("validate", "check a sketch");
    validate->add_option("sketch", in)->required();
    auto* cosieves = app.add_subcommand("cosieves", "list the cosieves of a sketch or poset");
    cosieves->add_option("input", in)->required();
    auto* realize = app.add_subcommand("realize", "hom-posets of the realization");
    realize->add_option("sketch", in)->required();
    auto* mfp = app.add_subcommand("mode-from-prop", "mode family of a lattice morphism");
    mfp->add_option("morphism", in)->required();
    auto* pc = app.add_subcommand("prop-canonical", "canonical lattice morphism of a family");
    pc->add_option("family", in)->required();
    auto* axioms = app.add_subcommand("check-axioms", "axioms 1 to 3 on a corpus");
    axioms->add_option("family", in)->required();
    axioms->add_option("--corpus-max", corpus_max, "largest set size in the corpus");
    auto* fracture = app.add_subcommand("fracture", "open/closed fracture square");
    fracture->add_option("copresheaf", in)->required();
    fracture->add_option("--open", open, "cosieve U, comma separated")->required();

    auto* oplax = app.add_subcommand("oplax", "oplax limits of sketch diagrams");
    oplax->require_subcommand(1);
    auto* ov = oplax->add_subcommand("validate", "check a diagram and optionally an object");
    ov->add_option("diagram", in)->required();
    ov->add_option("object", in2);
    auto* og = oplax->add_subcommand("glue", "iterated gluing of an object");
    og->add_option("diagram", in)->required();
    og->add_option("object", in2)->required();
    auto* op = oplax->add_subcommand("project", "component of an object");
    op->add_option("diagram", in)->required();
    op->add_option("object", in2)->required();
    op->add_option("--at", at)->required();
    auto* orr = oplax->add_subcommand("radj", "right adjoint of the projection");
    orr->add_option("diagram", in)->required();
    orr->add_option("copresheaf", in2)->required();
    orr->add_option("--at", at)->required();
    auto* opr = oplax->add_subcommand("prop", "subterminal of a cosieve");
    opr->add_option("diagram", in)->required();
    opr->add_option("--cosieve", cosieve)->required();

    auto* tr = app.add_subcommand("translate", "logical-relation translation of a type");
    tr->add_option("file", in);
    tr->add_option("--in", in);
    tr->add_option("--shape", shape)->check(CLI::IsMember({"two", "span", "chain3"}));
    tr->add_option("--emit", emit_as)->check(CLI::IsMember({"json", "pretty"}));
    tr->add_flag("--check", check, "compare against the finite semantics");
    tr->add_option("--env", env, "base declarations for --check");

    auto* st = app.add_subcommand("selftest", "run the acceptance criteria");
    st->add_flag("--mutant", mutant, "swap the reflector order first");
    st->add_option("--corpus-max", corpus_max);
    st->add_option("--seed", seed);
    st->add_option("--golden-dir", golden);
    st->add_flag("--json", as_json);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return 2;
    }

    try {
        if (*validate) return emit(validate_cmd(in));
        if (*cosieves) return emit(cosieves_cmd(in));
        if (*realize) return emit(realize_cmd(in));
        if (*mfp) return emit(mode_from_prop_cmd(in));
        if (*pc) return emit(prop_canonical_cmd(in));
        if (*axioms) return emit(check_axioms_cmd(in, corpus_max));
        if (*fracture) return emit(fracture_cmd(in, open));
        if (*oplax) {
            auto d = io::diagram_from(io::read_file(in));
            if (*ov) {
                auto r = validate_diagram(d);
                json body = {{"diagram", {{"ok", r.ok}, {"violations", r.violations}}}};
                bool ok = r.ok;
                if (!in2.empty() && r.ok) {
                    auto o = oplax_validate(d, io::oplax_from(d, io::read_file(in2)));
                    body["object"] = {{"ok", o.ok}, {"violations", o.violations}};
                    ok = o.ok;
                }
                body["ok"] = ok;
                return emit({body, ok});
            }
            if (*og) {
                auto x = io::oplax_from(d, io::read_file(in2));
                auto g = iterate_glue_equivalence(d);
                auto nested = g.to_glued(x);
                bool back = g.from_glued(nested) == x;
                return emit({{{"glued", io::to_json(d.sketch.base(), nested)}, {"round_trip", back}}, back});
            }
            if (*op) {
                auto x = io::oplax_from(d, io::read_file(in2));
                auto l = projection_and_right_adjoint(d, element_arg(d, at));
                return emit({{{"copresheaf", io::to_json(l.proj(x))}}});
            }
            if (*orr) {
                auto y = io::copresheaf_from(io::read_file(in2));
                auto l = projection_and_right_adjoint(d, element_arg(d, at));
                return emit({{{"object", io::to_json(d, l.radj(y))}}});
            }
            if (*opr) {
                auto s = io::cosieve_arg(d.sketch.base(), cosieve);
                auto x = prop_canonical_oplax(d, s);
                return emit({{{"object", io::to_json(d, x)}, {"subterminal", is_oplax_subterminal(d, x)}}});
            }
        }
        if (*tr) {
            if (in.empty()) return fail_input("UsageError", "translate needs an input file");
            auto r = translate_cmd(in, shape, emit_as, check, env);
            if (r.body.is_null()) return r.ok ? 0 : 1;
            return emit(r);
        }
        if (*st) return selftest_cmd(mutant, corpus_max, seed, golden, as_json);
    } catch (const ParseError& e) {
        return fail_input(e.kind(), e.what());
    } catch (const Error& e) {
        return fail_input(e.kind(), e.what());
    } catch (const json::exception& e) {
        return fail_input("SchemaError", e.what());
    } catch (const std::exception& e) {
        return fail_input("Error", e.what());
    }
    return 2;
}
