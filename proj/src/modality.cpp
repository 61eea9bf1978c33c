#include "msk/modality.hpp"

#include <algorithm>
#include <atomic>
#include <functional>

#include "msk/errors.hpp"

namespace msk {

namespace mutation {
static std::atomic<bool> swapped{false};
void set_swap_reflector_order(bool on) { swapped = on; }
bool swap_reflector_order() { return swapped; }
} // namespace mutation

Modality::Modality(Poset base, Cosieve open, Cosieve closed)
    : base_(std::move(base)), open_(open), closed_(closed) {
    if (!is_cosieve(base_, open_.bits)) throw PreconditionFailed("open part is not a cosieve");
    if (!is_cosieve(base_, closed_.bits)) throw PreconditionFailed("closed part is not a cosieve");
    if (!closed_.subset_of(open_)) throw PreconditionFailed("closed part is not contained in the open part");
}

Modality Modality::canonical() const {
    Mask l = local();
    Mask u = up_closure(base_, l);
    return Modality(base_, Cosieve{u}, Cosieve{u & ~l});
}

bool equivalent(const Modality& a, const Modality& b) {
    return a.base() == b.base() && a.local() == b.local();
}

Modality meet(const Modality& a, const Modality& b) {
    require_same_base(a.base(), b.base());
    Mask u = a.open().bits & b.open().bits;
    Mask v = (a.closed().bits | b.closed().bits) & u;
    return Modality(a.base(), Cosieve{u}, Cosieve{v});
}

bool strongly_disjoint(const Modality& a, const Modality& b) {
    require_same_base(a.base(), b.base());
    return (b.local() & down_closure(a.base(), a.local())) == 0;
}

std::vector<Modality> all_modalities(const Poset& base) {
    CosieveLattice l(base);
    std::vector<Modality> out;
    for (auto u : l.elements())
        for (auto v : l.elements())
            if (v.subset_of(u)) out.emplace_back(base, u, v);
    return out;
}

namespace {

struct OpenData {
    Copresheaf object;
    NatMap unit;
    std::vector<std::vector<std::vector<std::size_t>>> tuples;  // per stage
    std::vector<std::map<std::vector<std::size_t>, std::size_t>> index;
};

// (O_U X)(i) = lim of X over U meet up(i), as tuples over its members.
OpenData open_data(Cosieve u, const Copresheaf& x) {
    const auto& p = x.base();
    Budget budget;
    OpenData d;
    d.tuples.resize(p.size());
    d.index.resize(p.size());
    std::vector<std::size_t> card(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        d.tuples[i] = limit_tuples(x, u.bits & p.up(i), budget);
        for (std::size_t k = 0; k < d.tuples[i].size(); ++k) d.index[i][d.tuples[i][k]] = k;
        card[i] = d.tuples[i].size();
    }
    d.object = Copresheaf::from_function(p, card, [&](std::size_t a, std::size_t b, std::size_t e) {
        const auto& t = d.tuples[a][e];
        std::vector<std::size_t> r;
        std::size_t k = 0;
        for (std::size_t j = 0; j < p.size(); ++j) {
            if (!has(u.bits & p.up(a), j)) continue;
            if (p.leq(b, j)) r.push_back(t[k]);
            ++k;
        }
        return d.index[b].at(r);
    });
    std::vector<Table> unit(p.size());
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t e = 0; e < x.card(i); ++e) {
            std::vector<std::size_t> t;
            for (std::size_t j = 0; j < p.size(); ++j)
                if (has(u.bits & p.up(i), j)) t.push_back(x.transition(i, j)[e]);
            unit[i].push_back(d.index[i].at(t));
        }
    d.unit = NatMap(x, d.object, std::move(unit));
    return d;
}

NatMap open_map(Cosieve u, const NatMap& f) {
    auto dx = open_data(u, f.source());
    auto dy = open_data(u, f.target());
    const auto& p = f.source().base();
    std::vector<Table> c(p.size());
    for (std::size_t i = 0; i < p.size(); ++i)
        for (auto& t : dx.tuples[i]) {
            std::vector<std::size_t> r;
            std::size_t k = 0;
            for (std::size_t j = 0; j < p.size(); ++j)
                if (has(u.bits & p.up(i), j)) r.push_back(f.at(j)[t[k++]]);
            c[i].push_back(dy.index[i].at(r));
        }
    return NatMap(dx.object, dy.object, std::move(c));
}

Copresheaf closed_object(Cosieve v, const Copresheaf& x) {
    const auto& p = x.base();
    std::vector<std::size_t> card(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) card[i] = v.contains(i) ? 1 : x.card(i);
    return Copresheaf::from_function(p, card, [&](std::size_t a, std::size_t b, std::size_t e) -> std::size_t {
        if (v.contains(b)) return 0;
        return x.edge(a, b)[e];
    });
}

NatMap closed_map(Cosieve v, const NatMap& f) {
    auto cx = closed_object(v, f.source());
    auto cy = closed_object(v, f.target());
    std::vector<Table> c(cx.base().size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = v.contains(i) ? Table{0} : f.at(i);
    return NatMap(cx, cy, std::move(c));
}

// X relative to f: X -> Y, with Y substituted on V.
struct RelClosed {
    Copresheaf object;
    NatMap c;  // X -> object
    NatMap q;  // object -> Y
};

RelClosed rel_closed(Cosieve v, const NatMap& f) {
    const auto& x = f.source();
    const auto& y = f.target();
    const auto& p = x.base();
    std::vector<std::size_t> card(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) card[i] = v.contains(i) ? y.card(i) : x.card(i);
    auto obj = Copresheaf::from_function(p, card, [&](std::size_t a, std::size_t b, std::size_t e) -> std::size_t {
        if (v.contains(a)) return y.edge(a, b)[e];
        if (v.contains(b)) return y.edge(a, b)[f.at(a)[e]];
        return x.edge(a, b)[e];
    });
    std::vector<Table> c(p.size()), q(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        c[i] = v.contains(i) ? f.at(i) : identity_table(x.card(i));
        q[i] = v.contains(i) ? identity_table(y.card(i)) : f.at(i);
    }
    return RelClosed{obj, NatMap(x, obj, c), NatMap(obj, y, q)};
}

// X' = Y x_{O Y} O X for f: X -> Y.
RelativeReflection rel_open(Cosieve u, const NatMap& f) {
    auto ox = open_data(u, f.source());
    auto oy = open_data(u, f.target());
    auto of = open_map(u, f);
    auto pb = pullback(oy.unit, of);
    auto unit = pullback_pair(pb, f, ox.unit);
    return RelativeReflection{pb.object, unit, pb.legs[0]};
}

} // namespace

Reflection open_reflect(Cosieve u, const Copresheaf& x) {
    if (!is_cosieve(x.base(), u.bits)) throw PreconditionFailed("open part is not a cosieve of the base");
    auto d = open_data(u, x);
    return Reflection{d.object, d.unit};
}

Reflection closed_reflect(Cosieve v, const Copresheaf& x) {
    if (!is_cosieve(x.base(), v.bits)) throw PreconditionFailed("closed part is not a cosieve of the base");
    auto obj = closed_object(v, x);
    std::vector<Table> unit(x.base().size());
    for (std::size_t i = 0; i < unit.size(); ++i)
        unit[i] = v.contains(i) ? constant_table(x.card(i), 0) : identity_table(x.card(i));
    return Reflection{obj, NatMap(x, obj, std::move(unit))};
}

Reflection reflect(const Modality& m, const Copresheaf& x) {
    require_same_base(m.base(), x.base());
    if (mutation::swap_reflector_order()) {
        auto o = open_reflect(m.open(), x);
        auto c = closed_reflect(m.closed(), o.object);
        return Reflection{c.object, compose(c.unit, o.unit)};
    }
    auto c = closed_reflect(m.closed(), x);
    auto o = open_reflect(m.open(), c.object);
    return Reflection{o.object, compose(o.unit, c.unit)};
}

NatMap reflect_map(const Modality& m, const NatMap& f) {
    require_same_base(m.base(), f.source().base());
    if (mutation::swap_reflector_order()) return closed_map(m.closed(), open_map(m.open(), f));
    return open_map(m.open(), closed_map(m.closed(), f));
}

bool is_modal(const Modality& m, const Copresheaf& x) { return is_iso(reflect(m, x).unit); }

bool is_connected(const Modality& m, const Copresheaf& x) {
    auto r = reflect(m, x);
    for (auto n : r.object.cards())
        if (n != 1) return false;
    return true;
}

RelativeReflection reflect_rel(const Modality& m, const NatMap& f) {
    require_same_base(m.base(), f.source().base());
    if (mutation::swap_reflector_order()) {
        auto o = rel_open(m.open(), f);
        auto c = rel_closed(m.closed(), o.proj);
        return RelativeReflection{c.object, compose(c.c, o.unit), c.q};
    }
    auto c = rel_closed(m.closed(), f);
    auto o = rel_open(m.open(), c.q);
    return RelativeReflection{o.object, compose(o.unit, c.c), o.proj};
}

bool is_modal_rel(const Modality& m, const NatMap& f) { return is_iso(reflect_rel(m, f).unit); }

static void require_disjoint_order(const std::vector<Modality>& ordered) {
    for (std::size_t k = 0; k < ordered.size(); ++k)
        for (std::size_t l = k + 1; l < ordered.size(); ++l)
            if (!strongly_disjoint(ordered[k], ordered[l]))
                throw AxiomViolation("member " + std::to_string(k) + " is not strongly disjoint from member " +
                                     std::to_string(l));
}

static Reflection join_rec(const std::vector<Modality>& ordered, std::size_t from, const Copresheaf& x) {
    if (from == ordered.size()) return Reflection{terminal(x.base()), to_terminal(x)};
    auto rest = join_rec(ordered, from + 1, x);
    auto r = reflect_rel(ordered[from], rest.unit);
    return Reflection{r.object, r.unit};
}

Reflection reflect_join(const std::vector<Modality>& ordered, const Copresheaf& x) {
    for (auto& m : ordered) require_same_base(m.base(), x.base());
    require_disjoint_order(ordered);
    return join_rec(ordered, 0, x);
}

bool is_join_modal(const std::vector<Modality>& ordered, const Copresheaf& x) {
    return is_iso(reflect_join(ordered, x).unit);
}

LatticeMorphism::LatticeMorphism(Poset source, Poset target, std::vector<Cosieve> table)
    : source_(std::move(source)), target_(std::move(target)), table_(std::move(table)) {
    CosieveLattice l(source_);
    if (table_.size() != l.size()) throw InvalidLatticeMorphism("table size does not match Cosieve(source)");
    for (auto c : table_)
        if (!is_cosieve(target_, c.bits)) throw InvalidLatticeMorphism("table value is not a cosieve of the target");
}

Cosieve LatticeMorphism::operator()(Cosieve s) const {
    CosieveLattice l(source_);
    return table_.at(l.index_of(s));
}

std::vector<std::string> LatticeMorphism::violations() const {
    std::vector<std::string> out;
    CosieveLattice l(source_);
    auto show = [&](Cosieve c) {
        std::string s = "{";
        for (auto& n : names_of(source_, c.bits)) s += (s.size() > 1 ? "," : "") + n;
        return s + "}";
    };
    if (table_[l.index_of(l.bottom())] != Cosieve{0}) out.push_back("bottom is not preserved");
    if (table_[l.index_of(l.top())] != Cosieve{target_.full()}) out.push_back("top is not preserved");
    for (auto a : l.elements())
        for (auto b : l.elements()) {
            if (b < a) continue;
            auto fa = table_[l.index_of(a)], fb = table_[l.index_of(b)];
            if (table_[l.index_of(CosieveLattice::meet(a, b))] != CosieveLattice::meet(fa, fb))
                out.push_back("meet of " + show(a) + " and " + show(b) + " is not preserved");
            if (table_[l.index_of(CosieveLattice::join(a, b))] != CosieveLattice::join(fa, fb))
                out.push_back("join of " + show(a) + " and " + show(b) + " is not preserved");
        }
    return out;
}

std::vector<LatticeMorphism> all_lattice_morphisms(const Poset& source, const Poset& target) {
    CosieveLattice ls(source), lt(target);
    const auto& src = ls.elements();
    const std::size_t n = src.size();
    std::vector<Cosieve> table(n);
    std::vector<LatticeMorphism> out;
    // masks ascend, so meets of earlier entries are earlier entries
    std::function<void(std::size_t)> go = [&](std::size_t k) {
        if (k == n) {
            out.emplace_back(source, target, table);
            return;
        }
        for (auto c : lt.elements()) {
            if (src[k].bits == 0 && c.bits != 0) continue;
            if (src[k].bits == source.full() && c.bits != target.full()) continue;
            table[k] = c;
            bool ok = true;
            for (std::size_t a = 0; a <= k && ok; ++a) {
                auto m = ls.index_of(CosieveLattice::meet(src[a], src[k]));
                auto j = ls.index_of(CosieveLattice::join(src[a], src[k]));
                if (m <= k && table[m] != CosieveLattice::meet(table[a], c)) ok = false;
                if (j <= k && table[j] != CosieveLattice::join(table[a], c)) ok = false;
                for (std::size_t b = 0; b <= k && ok; ++b)
                    if (ls.index_of(CosieveLattice::join(src[a], src[b])) == k &&
                        c != CosieveLattice::join(table[a], table[b]))
                        ok = false;
            }
            if (ok) go(k + 1);
        }
    };
    go(0);
    return out;
}

bool ModeFamily::equivalent_to(const ModeFamily& o) const {
    if (!(sketch == o.sketch) || !(base == o.base) || modes.size() != o.modes.size()) return false;
    for (std::size_t i = 0; i < modes.size(); ++i)
        if (!equivalent(modes[i], o.modes[i])) return false;
    return true;
}

ModeFamily mode_from_prop(const ModeSketch& t, const LatticeMorphism& p) {
    if (!(p.source() == t.base())) throw InvalidLatticeMorphism("source lattice is not Cosieve(T)");
    CosieveLattice l(t.base());
    for (auto a : l.elements())
        for (auto b : l.elements())
            if (a.subset_of(b) && !p(a).subset_of(p(b))) throw InvalidLatticeMorphism("table is not monotone");
    ModeFamily f{t, p.target(), {}};
    for (std::size_t i = 0; i < t.base().size(); ++i)
        f.modes.emplace_back(p.target(), p(principal_cosieve(t.base(), i)), p(boundary(t.base(), i)));
    return f;
}

std::vector<std::pair<std::size_t, std::size_t>> axiom1_violations(const ModeFamily& f) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    const auto& t = f.sketch.base();
    for (std::size_t i = 0; i < t.size(); ++i)
        for (std::size_t j = 0; j < t.size(); ++j)
            if (!t.leq(j, i) && !strongly_disjoint(f.modes[i], f.modes[j])) out.emplace_back(i, j);
    return out;
}

std::vector<Modality> join_family(const ModeFamily& f, Mask index) {
    std::vector<Modality> out;
    for (auto i : linear_extension(f.sketch.base()))
        if (has(index, i)) out.push_back(f.modes[i]);
    return out;
}

Reflection reflect_join_family(const ModeFamily& f, Mask index, const Copresheaf& x) {
    const auto& t = f.sketch.base();
    for (std::size_t i = 0; i < t.size(); ++i)
        for (std::size_t j = 0; j < t.size(); ++j)
            if (has(index, i) && has(index, j) && !t.leq(j, i) && !strongly_disjoint(f.modes[i], f.modes[j]))
                throw AxiomViolation("Axiom 1 fails for " + t.name(i) + " and " + t.name(j));
    return reflect_join(join_family(f, index), x);
}

LatticeMorphism prop_canonical(const ModeFamily& f) {
    auto bad = axiom1_violations(f);
    if (!bad.empty())
        throw AxiomViolation("Axiom 1 fails for " + f.sketch.base().name(bad[0].first) + " and " +
                             f.sketch.base().name(bad[0].second));
    const auto& t = f.sketch.base();
    CosieveLattice l(t);
    auto empty = initial(f.base);
    std::vector<Cosieve> table;
    for (auto s : l.elements()) {
        auto r = reflect_join_family(f, t.full() & ~s.bits, empty);
        table.push_back(cosieve_from_subterminal(r.object));
    }
    LatticeMorphism p(t, f.base, std::move(table));
    auto v = p.violations();
    if (!v.empty()) throw AxiomViolation("canonical table is not a lattice morphism: " + v.front());
    return p;
}

CorpusIndex::CorpusIndex(std::vector<Copresheaf> corpus) : corpus_(std::move(corpus)) {}

CorpusIndex::Entry& CorpusIndex::entry(const Modality& m) {
    auto c = m.canonical();
    auto key = std::make_pair(c.open().bits, c.closed().bits);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    Entry e;
    e.modal.resize(corpus_.size());
    e.connected.resize(corpus_.size());
    for (std::size_t k = 0; k < corpus_.size(); ++k) {
        auto r = reflect(m, corpus_[k]);
        e.modal[k] = is_iso(r.unit);
        e.connected[k] = std::all_of(r.object.cards().begin(), r.object.cards().end(), [](auto n) { return n == 1; });
    }
    return cache_.emplace(key, std::move(e)).first->second;
}

const std::vector<bool>& CorpusIndex::modal(const Modality& m) { return entry(m).modal; }
const std::vector<bool>& CorpusIndex::connected(const Modality& m) { return entry(m).connected; }

bool CorpusIndex::disjoint_on_corpus(const Modality& a, const Modality& b) {
    const auto& ma = modal(a);
    const auto& cb = connected(b);
    for (std::size_t k = 0; k < ma.size(); ++k)
        if (ma[k] && !cb[k]) return false;
    return true;
}

AxiomReport check_axioms(const ModeFamily& f, CorpusIndex& corpus, bool stop_at_first) {
    AxiomReport r;
    const auto& t = f.sketch.base();
    const auto& objs = corpus.corpus();
    r.corpus_size = objs.size();
    auto name = [&](std::size_t i) { return t.name(i); };

    for (std::size_t i = 0; i < t.size(); ++i)
        for (std::size_t j = 0; j < t.size(); ++j) {
            if (t.leq(j, i)) continue;
            const auto& mi = corpus.modal(f.modes[i]);
            const auto& cj = corpus.connected(f.modes[j]);
            for (std::size_t k = 0; k < objs.size(); ++k)
                if (mi[k] && !cj[k]) {
                    r.a1 = false;
                    r.witnesses.push_back({"A1", "m(" + name(i) + ")-modal object is not m(" + name(j) + ")-connected", k});
                    if (stop_at_first) return r;
                    break;
                }
        }

    for (auto& tri : f.sketch.thin()) {
        const auto& m2 = corpus.modal(f.modes[tri[2]]);
        for (std::size_t k = 0; k < objs.size(); ++k) {
            if (!m2[k]) continue;
            auto u = reflect(f.modes[tri[1]], objs[k]).unit;
            if (!is_iso(reflect_map(f.modes[tri[0]], u))) {
                r.a2 = false;
                r.witnesses.push_back({"A2", "triangle (" + name(tri[0]) + "," + name(tri[1]) + "," + name(tri[2]) +
                                                 ") is not inverted", k});
                if (stop_at_first) return r;
                break;
            }
        }
    }

    if (r.a1) {
        r.a3_checked = true;
        auto all = join_family(f, t.full());
        for (std::size_t k = 0; k < objs.size(); ++k)
            if (!is_join_modal(all, objs[k])) {
                r.a3 = false;
                r.witnesses.push_back({"A3", "object is not modal for the join of the family", k});
                break;
            }
    } else {
        r.a3 = false;
    }
    return r;
}

AxiomReport check_axioms(const ModeFamily& f, const std::vector<Copresheaf>& corpus) {
    CorpusIndex idx(corpus);
    return check_axioms(f, idx);
}

FractureSquare fracture_square(Cosieve u, const Copresheaf& x) {
    if (!is_cosieve(x.base(), u.bits)) throw PreconditionFailed("not a cosieve of the base");
    FractureSquare s;
    s.x = x;
    auto o = open_data(u, x);
    auto c = closed_reflect(u, x);
    auto co = closed_reflect(u, o.object);
    s.open_part = o.object;
    s.closed_part = c.object;
    s.corner = co.object;
    s.to_open = o.unit;
    s.to_closed = c.unit;
    s.open_to_corner = co.unit;
    s.closed_to_corner = closed_map(u, o.unit);
    s.commutes = compose(s.open_to_corner, s.to_open) == compose(s.closed_to_corner, s.to_closed);
    // Sigma over the closed part of the open-modal fibres
    auto pb = pullback(s.open_to_corner, s.closed_to_corner);
    s.reassembled = pb.object;
    if (s.commutes) {
        auto cmp = pullback_pair(pb, s.to_open, s.to_closed);
        s.is_pullback = is_iso(cmp);
        if (s.is_pullback)
            s.iso = cmp;
        else
            s.iso = find_iso(x, s.reassembled);
    }
    return s;
}

} // namespace msk
