#include "msk/acceptance.hpp"

#include <chrono>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "msk/copresheaf.hpp"
#include "msk/errors.hpp"
#include "msk/modality.hpp"
#include "msk/oplax.hpp"
#include "msk/sketch.hpp"
#include "msk/translate.hpp"

#ifndef MSK_GOLDEN_DIR
#define MSK_GOLDEN_DIR "tests/golden"
#endif

namespace msk {

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

Outcome fail(const std::string& why) { return {false, why}; }

std::string cards_of(const Copresheaf& x) {
    std::string s = "{";
    for (std::size_t i = 0; i < x.cards().size(); ++i) s += (i ? "," : "") + std::to_string(x.card(i));
    return s + "}";
}

std::string mask_str(const Poset& p, Mask m) {
    std::string s = "{";
    bool first = true;
    for (const auto& n : names_of(p, m)) {
        s += (first ? "" : ",") + n;
        first = false;
    }
    return s + "}";
}

std::string poset_str(const Poset& p) {
    std::string s = std::to_string(p.size()) + " elements";
    for (auto [a, b] : p.covers()) s += " " + p.name(a) + "<" + p.name(b);
    return s;
}

std::string modality_str(const Modality& m) {
    return "(" + mask_str(m.base(), m.open().bits) + "," + mask_str(m.base(), m.closed().bits) + ")";
}

std::vector<Poset> bases_up_to(std::size_t n, std::size_t from = 1) {
    std::vector<Poset> out;
    for (std::size_t k = from; k <= n; ++k)
        for (auto& p : all_posets(k)) out.push_back(p);
    return out;
}

// one pair (up(L), up(L) \ L) per convex L
std::vector<Modality> canonical_modalities(const Poset& s) {
    std::vector<Modality> out;
    for (Mask l = 0; l <= s.full(); ++l) {
        if (!is_convex(s, l)) continue;
        Mask u = up_closure(s, l);
        out.emplace_back(s, Cosieve{u}, Cosieve{u & ~l});
    }
    return out;
}

using ModalClass = std::vector<bool>;

bool class_subset(const ModalClass& a, const ModalClass& b) {
    for (std::size_t k = 0; k < a.size(); ++k)
        if (a[k] && !b[k]) return false;
    return true;
}

ModalClass class_meet(const ModalClass& a, const ModalClass& b) {
    ModalClass out(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] && b[k];
    return out;
}

// join-modal classes of ordered families over one corpus
class JoinClasses {
public:
    explicit JoinClasses(const std::vector<Copresheaf>& corpus) : corpus_(corpus) {}

    const ModalClass& of(const std::vector<Modality>& ordered) {
        std::vector<std::pair<Mask, Mask>> key;
        for (auto& m : ordered) key.emplace_back(m.open().bits, m.closed().bits);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        ModalClass c(corpus_.size());
        for (std::size_t k = 0; k < corpus_.size(); ++k) c[k] = is_join_modal(ordered, corpus_[k]);
        return cache_.emplace(key, std::move(c)).first->second;
    }

private:
    const std::vector<Copresheaf>& corpus_;
    std::map<std::vector<std::pair<Mask, Mask>>, ModalClass> cache_;
};

// ---- 1

Outcome cosieve_counts() {
    std::size_t checked = 0;
    auto functor = sketch_catalog("functor");
    CosieveLattice fl(functor.base());
    if (fl.size() != 3) return fail("functor sketch has " + std::to_string(fl.size()) + " cosieves");
    const auto& e = fl.elements();
    if (!(e[0].subset_of(e[1]) && e[1].subset_of(e[2]) && e[0] != e[1] && e[1] != e[2]))
        return fail("cosieves of the functor sketch are not a chain");
    // one generator: the middle element is neither bottom nor top
    if (e[1] == fl.bottom() || e[1] == fl.top()) return fail("no generator");
    ++checked;
    for (std::size_t n = 0; n <= 6; ++n, ++checked) {
        auto got = CosieveLattice(Poset::chain(n)).size();
        if (got != n + 1) return fail("chain(" + std::to_string(n) + ") has " + std::to_string(got));
    }
    for (std::size_t k = 0; k <= 4; ++k, ++checked) {
        auto got = CosieveLattice(Poset::antichain(k)).size();
        if (got != (std::size_t{1} << k)) return fail("antichain(" + std::to_string(k) + ") has " + std::to_string(got));
    }
    return {true, std::to_string(checked) + " posets"};
}

// ---- 2

Outcome round_trip(const AcceptanceOptions& opt) {
    std::vector<ModeSketch> sketches;
    for (const auto& n : catalog_names()) sketches.push_back(sketch_catalog(n));
    for (auto& s : all_sketches(3)) sketches.push_back(s);
    auto bases = bases_up_to(3);

    std::size_t morphisms = 0, families = 0, passing = 0;
    for (std::size_t b = 0; b < bases.size(); ++b) {
        const auto& s = bases[b];
        auto corpus = enumerate_copresheaves(s, opt.corpus_max, false, opt.budget);
        JoinClasses joins(corpus);
        auto reps = canonical_modalities(s);

        for (const auto& t : sketches) {
            for (const auto& p : all_lattice_morphisms(t.base(), s)) {
                ++morphisms;
                auto back = prop_canonical(mode_from_prop(t, p));
                if (!(back == p))
                    return fail("prop_canonical(mode_from_prop(p)) != p for a sketch on " + poset_str(t.base()) +
                                " into " + poset_str(s));
            }

            std::size_t n = t.base().size();
            std::vector<std::size_t> digit(n, 0);
            ModeFamily f{t, s, std::vector<Modality>(n)};
            for (;;) {
                for (std::size_t i = 0; i < n; ++i) f.modes[i] = reps[digit[i]];
                ++families;
                if (axiom1_violations(f).empty()) {
                    const auto& all = joins.of(join_family(f, t.base().full()));
                    bool a3 = true;
                    for (bool v : all) a3 = a3 && v;
                    if (a3) {
                        ++passing;
                        auto again = mode_from_prop(t, prop_canonical(f));
                        if (!again.equivalent_to(f)) {
                            std::string modes;
                            for (auto& m : f.modes) modes += " " + modality_str(m);
                            return fail("mode_from_prop(prop_canonical(F)) differs from F =" + modes + " on " +
                                        poset_str(s));
                        }
                    }
                }
                std::size_t i = 0;
                while (i < n && ++digit[i] == reps.size()) digit[i++] = 0;
                if (i == n) break;
            }
        }
    }
    return {true, std::to_string(sketches.size()) + " sketches x " + std::to_string(bases.size()) + " bases: " +
                      std::to_string(morphisms) + " lattice morphisms, " + std::to_string(passing) + " of " +
                      std::to_string(families) + " families pass A1+A3"};
}

// ---- 3

Outcome fracture(const AcceptanceOptions& opt) {
    std::size_t squares = 0;
    for (const auto& s : bases_up_to(3)) {
        auto corpus = enumerate_copresheaves(s, opt.corpus_max, false, opt.budget);
        CosieveLattice lat(s);
        for (auto u : lat.elements())
            for (const auto& x : corpus) {
                auto sq = fracture_square(u, x);
                ++squares;
                std::string where = " at U=" + mask_str(s, u.bits) + ", X" + cards_of(x) + " on " + poset_str(s);
                if (!sq.commutes) return fail("square does not commute" + where);
                if (!sq.is_pullback) return fail("not a pullback" + where);
                if (!sq.iso) return fail("no reassembly iso" + where);
                if (!(sq.iso->source() == x) || !(sq.iso->target() == sq.reassembled) || !is_iso(*sq.iso))
                    return fail("reassembly witness is not an iso" + where);
            }
    }
    return {true, std::to_string(squares) + " squares"};
}

// ---- 4

Outcome canonical_axioms(const AcceptanceOptions& opt) {
    std::string detail;
    for (const auto& name : catalog_names()) {
        auto t = sketch_catalog(name);
        const auto& s = t.base();
        LatticeMorphism id(s, s, CosieveLattice(s).elements());
        auto f = mode_from_prop(t, id);
        CorpusIndex corpus(enumerate_copresheaves(s, opt.corpus_max, false, opt.budget));
        auto r = check_axioms(f, corpus);
        if (!r.ok()) {
            auto& w = r.witnesses.front();
            return fail(name + ": " + w.axiom + " " + w.detail);
        }
        if (!r.a3_checked) return fail(name + ": A3 not checked");
        detail += (detail.empty() ? "" : ", ") + name + " (" + std::to_string(r.corpus_size) + " objects)";
    }
    return {true, detail};
}

// ---- 5

OplaxObject radj_by_cases(const SketchDiagram& d, std::size_t i, const Copresheaf& y) {
    const auto& p = d.sketch.base();
    OplaxObject x;
    for (std::size_t j = 0; j < p.size(); ++j) x.comps.push_back(p.leq(j, i) ? y : terminal(Poset::point()));
    for (std::size_t j = 0; j < p.size(); ++j)
        for (std::size_t k = 0; k < p.size(); ++k) {
            if (!p.lt(j, k)) continue;
            x.maps[{j, k}] = p.leq(k, i) ? NatMap::identity(x.comps[j]) : to_terminal(x.comps[j]);
        }
    return x;
}

Outcome localization(const AcceptanceOptions& opt) {
    std::mt19937 rng(opt.seed);
    std::size_t compared = 0, adjunctions = 0;
    for (const std::string name : {"functor", "chain3"}) {
        auto d = constant_diagram(sketch_catalog(name), Poset::point());
        std::vector<OplaxObject> xs;
        for (int n = 0; n < 50; ++n) xs.push_back(random_oplax(d, opt.corpus_max, rng));
        auto ys = enumerate_copresheaves(Poset::point(), opt.corpus_max, false, opt.budget);
        for (std::size_t i = 0; i < d.sketch.base().size(); ++i) {
            auto l = projection_and_right_adjoint(d, i);
            for (std::size_t n = 0; n < xs.size(); ++n) {
                auto y = l.proj(xs[n]);
                ++compared;
                if (!(l.radj(y) == radj_by_cases(d, i, y)))
                    return fail(name + ": radj at " + d.sketch.base().name(i) + " differs from the case split on object " +
                                std::to_string(n));
            }
            auto r = check_adjunction(d, i, xs, ys);
            ++adjunctions;
            if (!r.ok()) return fail(name + ": adjunction at " + d.sketch.base().name(i) + ": " + r.failures.front());
        }
    }
    return {true, std::to_string(compared) + " radj comparisons, " + std::to_string(adjunctions) + " adjunctions"};
}

// ---- 6

Outcome constant_model(const AcceptanceOptions& opt) {
    std::vector<ModeSketch> sketches;
    for (const auto& n : catalog_names())
        if (sketch_catalog(n).all_thin()) sketches.push_back(sketch_catalog(n));
    for (auto& t : all_sketches(3))
        if (t.all_thin()) sketches.push_back(t);

    std::size_t objects = 0, cosieves = 0;
    for (const auto& t : sketches) {
        auto cm = constant_model_equivalence(t);
        const auto& p = t.base();
        for (const auto& x : enumerate_copresheaves(p, opt.corpus_max, false, opt.budget)) {
            ++objects;
            if (!(cm.to_copresheaf(cm.from_copresheaf(x)) == x))
                return fail("copresheaf " + cards_of(x) + " on " + poset_str(p) + " does not round trip");
        }
        for (const auto& x : enumerate_oplax(cm.diagram, opt.corpus_max, opt.budget)) {
            ++objects;
            if (!(cm.from_copresheaf(cm.to_copresheaf(x)) == x))
                return fail("oplax object on " + poset_str(p) + " does not round trip");
        }
        CosieveLattice lat(p);
        for (auto sigma : lat.elements()) {
            ++cosieves;
            if (!(cm.to_copresheaf(prop_canonical_oplax(cm.diagram, sigma)) == subterminal_from_cosieve(p, sigma)))
                return fail("cosieve " + mask_str(p, sigma.bits) + " on " + poset_str(p) + " is not transported");
        }
    }
    return {true, std::to_string(sketches.size()) + " sketches, " + std::to_string(objects) + " round trips, " +
                      std::to_string(cosieves) + " cosieves"};
}

// ---- 7

Outcome goldens(const AcceptanceOptions& opt) {
    std::string dir = opt.golden_dir.empty() ? std::string(MSK_GOLDEN_DIR) : opt.golden_dir;
    TypeContext src;
    src.bases["A"] = mk::u();
    std::size_t cases = 0;
    for (const std::string shape : {"two", "span", "chain3"}) {
        auto sh = shape_named(shape);
        auto file = load_golden_file(dir + "/" + shape + ".txt");
        if (file.empty()) return fail("no cases in " + shape + ".txt");
        for (const auto& gc : file) {
            ++cases;
            auto comps = translate_sketch(check_type(src, parse_expr(gc.source, {"A"})), sh);
            if (comps.size() != gc.expected.size())
                return fail(shape + ": " + gc.source + " has " + std::to_string(comps.size()) + " components");
            for (std::size_t i = 0; i < comps.size(); ++i)
                if (show(comps[i]) != gc.expected[i])
                    return fail(shape + ": " + gc.source + " gives " + show(comps[i]) + ", expected " + gc.expected[i]);
        }
    }
    return {true, std::to_string(cases) + " golden cases"};
}

// ---- 8

Outcome oracle(const AcceptanceOptions& opt) {
    std::size_t checked = 0;
    auto run = [&](const E& ty, const std::vector<GluedDecl>& env) -> Outcome {
        ++checked;
        auto v = check_translation(ty, env, opt.budget);
        if (!v.iso) return fail(show(ty) + ": " + v.detail);
        if (!v.witness || !is_iso(*v.witness)) return fail(show(ty) + ": missing witness");
        return {};
    };

    // two bases, depth 3
    TypeContext ctx;
    ctx.bases["B"] = mk::u();
    ctx.bases["C"] = mk::u();
    std::vector<GluedDecl> two_bases{{"B", 1, {2}}, {"C", 2, {0, 3}}};
    auto deep = type_corpus({"B", "C"}, 3, 300);
    for (const auto& ty : deep) {
        auto o = run(check_type(ctx, ty), two_bases);
        if (!o.pass) return o;
    }

    // every declaration with cards <= 3, shallow types
    TypeContext one;
    one.bases["B"] = mk::u();
    auto shallow = type_corpus({"B"}, 1, 1000);
    std::size_t decls = 0;
    for (std::size_t st = 0; st <= 3; ++st) {
        std::vector<std::size_t> rel(st, 0);
        for (;;) {
            ++decls;
            for (const auto& ty : shallow) {
                auto o = run(check_type(one, ty), {{"B", st, rel}});
                if (!o.pass) return fail(o.detail + " with B " + std::to_string(st) + " static");
            }
            std::size_t i = 0;
            while (i < st && ++rel[i] == 4) rel[i++] = 0;
            if (i == st) break;
        }
    }

    // the whole one-base depth-3 corpus under the small declarations
    auto full = type_corpus({"B"}, 3, 100000);
    std::size_t small = 0;
    for (std::size_t st = 0; st <= 2; ++st) {
        std::vector<std::size_t> rel(st, 0);
        for (;;) {
            std::size_t total = 0;
            for (auto r : rel) total += r;
            if (total <= 2) {
                ++small;
                for (const auto& ty : full) {
                    auto o = run(check_type(one, ty), {{"B", st, rel}});
                    if (!o.pass) return o;
                }
            }
            std::size_t i = 0;
            while (i < st && ++rel[i] == 3) rel[i++] = 0;
            if (i == st) break;
        }
    }
    return {true, std::to_string(deep.size()) + " two-base depth-3 types, " + std::to_string(shallow.size()) +
                      " types x " + std::to_string(decls) + " declarations, " + std::to_string(full.size()) +
                      " depth-3 types x " + std::to_string(small) + " declarations, " + std::to_string(checked) +
                      " isos"};
}

// ---- 9

Outcome open_closed(const AcceptanceOptions& opt) {
    std::size_t pairs = 0, decompositions = 0, triples = 0;
    for (const auto& s : bases_up_to(3)) {
        CorpusIndex idx(enumerate_copresheaves(s, opt.corpus_max, false, opt.budget));
        JoinClasses joins(idx.corpus());
        CosieveLattice lat(s);
        const auto& cos = lat.elements();
        std::string on = " on " + poset_str(s);

        for (auto a : cos)
            for (auto b : cos) {
                ++pairs;
                bool sub = a.subset_of(b);
                if (sub != class_subset(idx.modal(Modality::open_at(s, a)), idx.modal(Modality::open_at(s, b))))
                    return fail("open embedding not monotone at " + mask_str(s, a.bits) + ", " + mask_str(s, b.bits) + on);
                if (sub != class_subset(idx.modal(Modality::closed_at(s, b)), idx.modal(Modality::closed_at(s, a))))
                    return fail("closed embedding not antitone at " + mask_str(s, a.bits) + ", " + mask_str(s, b.bits) + on);
            }

        for (const auto& m : all_modalities(s))
            for (auto w : cos) {
                ++decompositions;
                auto c = meet(m, Modality::closed_at(s, w));
                auto o = meet(m, Modality::open_at(s, w));
                if (!strongly_disjoint(c, o)) return fail("closed part not disjoint from open part" + on);
                if (idx.modal(m) != joins.of({c, o}))
                    return fail("m=" + modality_str(m) + " is not the join of its parts at W=" + mask_str(s, w.bits) + on);
            }

        auto reps = canonical_modalities(s);
        for (const auto& m1 : reps)
            for (const auto& m2 : reps)
                for (const auto& m3 : reps)
                    for (bool before : {true, false}) {
                        auto sd = [&](const Modality& x) {
                            return before ? strongly_disjoint(x, m3) : strongly_disjoint(m3, x);
                        };
                        auto ordered = [&](const Modality& x) {
                            return before ? std::vector<Modality>{x, m3} : std::vector<Modality>{m3, x};
                        };
                        if (!sd(m1) || !sd(m2)) continue;
                        ++triples;
                        auto m12 = meet(m1, m2);
                        if (!sd(m12)) return fail("meet loses disjointness" + on);
                        auto lhs = class_meet(joins.of(ordered(m1)), joins.of(ordered(m2)));
                        if (lhs != joins.of(ordered(m12)))
                            return fail("distributivity fails for " + modality_str(m1) + ", " + modality_str(m2) + ", " +
                                        modality_str(m3) + on);
                    }
    }
    return {true, std::to_string(pairs) + " cosieve pairs, " + std::to_string(decompositions) + " decompositions, " +
                      std::to_string(triples) + " distributive triples"};
}

struct Criterion {
    std::string name;
    double limit;  // seconds
    std::function<Outcome(const AcceptanceOptions&)> run;
};

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> s{
        {"cosieve lattice counts", 1, [](const AcceptanceOptions&) { return cosieve_counts(); }},
        {"mode family round trip", 30, round_trip},
        {"fracture square", 20, fracture},
        {"axioms of the canonical family", 20, canonical_axioms},
        {"localization formula", 10, localization},
        {"constant-model transport", 10, constant_model},
        {"translator goldens", 1, goldens},
        {"translator oracle", 60, oracle},
        {"open/closed algebra", 20, open_closed},
    };
    return s;
}

} // namespace

std::vector<GoldenCase> load_golden_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot read " + path);
    std::vector<GoldenCase> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (line.rfind("> ", 0) == 0)
            out.push_back({line.substr(2), {}});
        else if (out.empty())
            throw SchemaError(path + ": component line before any case");
        else
            out.back().expected.push_back(line);
    }
    return out;
}

const std::vector<std::string>& criterion_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (auto& s : criteria()) n.push_back(s.name);
        return n;
    }();
    return names;
}

CriterionResult run_criterion(int id, const AcceptanceOptions& opt) {
    if (id < 1 || id > static_cast<int>(criteria().size())) throw PreconditionFailed("no criterion " + std::to_string(id));
    const auto& s = criteria()[static_cast<std::size_t>(id - 1)];
    CriterionResult r;
    r.id = id;
    r.name = s.name;
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = s.run(opt);
    } catch (const EnumerationBudgetExceeded&) {
        throw;
    } catch (const std::exception& e) {
        o = fail(std::string("exception: ") + e.what());
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.pass = o.pass;
    r.detail = o.detail;
    if (r.pass && r.seconds > s.limit) {
        r.pass = false;
        std::ostringstream d;
        d << "took " << r.seconds << " s, limit " << s.limit << " s; " << o.detail;
        r.detail = d.str();
    }
    return r;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt,
                                            const std::function<void(const CriterionResult&)>& on_result) {
    std::vector<CriterionResult> out;
    for (int id = 1; id <= static_cast<int>(criteria().size()); ++id) {
        out.push_back(run_criterion(id, opt));
        if (on_result) on_result(out.back());
    }
    return out;
}

} // namespace msk
