#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "msk/copresheaf.hpp"
#include "msk/sketch.hpp"

namespace msk {

// open(U) meet closed(V) on copresheaves over the base, with V inside U.
// Its modal objects are the right Kan extensions from U \ V.
class Modality {
public:
    Modality() = default;
    Modality(Poset base, Cosieve open, Cosieve closed);

    static Modality top(const Poset& base) { return Modality(base, Cosieve{base.full()}, Cosieve{0}); }
    static Modality bottom(const Poset& base) { return Modality(base, Cosieve{0}, Cosieve{0}); }
    static Modality open_at(const Poset& base, Cosieve u) { return Modality(base, u, Cosieve{0}); }
    static Modality closed_at(const Poset& base, Cosieve v) { return Modality(base, Cosieve{base.full()}, v); }

    const Poset& base() const { return base_; }
    Cosieve open() const { return open_; }
    Cosieve closed() const { return closed_; }
    Mask local() const { return open_.bits & ~closed_.bits; }

    // (up(L), up(L) \ L): the representative with the smallest open part
    Modality canonical() const;

    friend bool operator==(const Modality&, const Modality&) = default;

private:
    Poset base_;
    Cosieve open_, closed_;
};

// Same modal objects.
bool equivalent(const Modality& a, const Modality& b);
Modality meet(const Modality& a, const Modality& b);
// a <= perp(b): every a-modal object is b-connected
bool strongly_disjoint(const Modality& a, const Modality& b);

// All pairs V inside U, ordered by (U, V) masks.
std::vector<Modality> all_modalities(const Poset& base);

struct Reflection {
    Copresheaf object;
    NatMap unit;
};

Reflection open_reflect(Cosieve u, const Copresheaf& x);
Reflection closed_reflect(Cosieve v, const Copresheaf& x);
Reflection reflect(const Modality& m, const Copresheaf& x);
NatMap reflect_map(const Modality& m, const NatMap& f);
bool is_modal(const Modality& m, const Copresheaf& x);
bool is_connected(const Modality& m, const Copresheaf& x);

// Factorisation x -> object -> y of f, with fibres of the second leg modal.
struct RelativeReflection {
    Copresheaf object;
    NatMap unit;  // X -> X'
    NatMap proj;  // X' -> Y
};
RelativeReflection reflect_rel(const Modality& m, const NatMap& f);
bool is_modal_rel(const Modality& m, const NatMap& f);

// Join reflector of an ordered family in which every earlier member is
// strongly disjoint from every later one.
Reflection reflect_join(const std::vector<Modality>& ordered, const Copresheaf& x);
bool is_join_modal(const std::vector<Modality>& ordered, const Copresheaf& x);

class LatticeMorphism {
public:
    LatticeMorphism() = default;
    LatticeMorphism(Poset source, Poset target, std::vector<Cosieve> table);

    const Poset& source() const { return source_; }
    const Poset& target() const { return target_; }
    const std::vector<Cosieve>& table() const { return table_; }  // indexed like CosieveLattice(source)
    Cosieve operator()(Cosieve s) const;

    // empty when the table preserves top, bottom, meets and joins
    std::vector<std::string> violations() const;

    friend bool operator==(const LatticeMorphism& a, const LatticeMorphism& b) {
        return a.source_ == b.source_ && a.target_ == b.target_ && a.table_ == b.table_;
    }

private:
    Poset source_, target_;
    std::vector<Cosieve> table_;
};

std::vector<LatticeMorphism> all_lattice_morphisms(const Poset& source, const Poset& target);

struct ModeFamily {
    ModeSketch sketch;
    Poset base;
    std::vector<Modality> modes;  // indexed by the sketch's elements

    bool equivalent_to(const ModeFamily& o) const;
};

ModeFamily mode_from_prop(const ModeSketch& t, const LatticeMorphism& p);

// Exact strong-disjointness check of Axiom 1; returns offending (i, j).
std::vector<std::pair<std::size_t, std::size_t>> axiom1_violations(const ModeFamily& f);

// members of sigma's complement along linear_extension(T)
std::vector<Modality> join_family(const ModeFamily& f, Mask index);
Reflection reflect_join_family(const ModeFamily& f, Mask index, const Copresheaf& x);

LatticeMorphism prop_canonical(const ModeFamily& f);

struct Witness {
    std::string axiom;
    std::string detail;
    std::size_t object;  // corpus index
};

struct AxiomReport {
    bool a1 = true, a2 = true, a3 = true;
    bool a3_checked = false;
    std::size_t corpus_size = 0;
    std::vector<Witness> witnesses;
    bool ok() const { return a1 && a2 && a3; }
};

// Caches modal / connected sets of a fixed corpus per modality.
class CorpusIndex {
public:
    explicit CorpusIndex(std::vector<Copresheaf> corpus);

    const std::vector<Copresheaf>& corpus() const { return corpus_; }
    const std::vector<bool>& modal(const Modality& m);
    const std::vector<bool>& connected(const Modality& m);
    bool disjoint_on_corpus(const Modality& a, const Modality& b);  // modal(a) within connected(b)

private:
    struct Entry {
        std::vector<bool> modal, connected;
    };
    Entry& entry(const Modality& m);

    std::vector<Copresheaf> corpus_;
    std::map<std::pair<Mask, Mask>, Entry> cache_;
};

AxiomReport check_axioms(const ModeFamily& f, CorpusIndex& corpus, bool stop_at_first = false);
AxiomReport check_axioms(const ModeFamily& f, const std::vector<Copresheaf>& corpus);

struct FractureSquare {
    Copresheaf x, open_part, closed_part, corner;  // corner = C(O x)
    NatMap to_open, to_closed, open_to_corner, closed_to_corner;
    bool commutes = false;
    bool is_pullback = false;
    Copresheaf reassembled;
    std::optional<NatMap> iso;  // x -> reassembled
};

FractureSquare fracture_square(Cosieve u, const Copresheaf& x);

namespace mutation {
// Swaps the reflector composite to closed-after-open; used only to show that
// the acceptance suite notices.
void set_swap_reflector_order(bool on);
bool swap_reflector_order();
} // namespace mutation

} // namespace msk
