#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "msk/copresheaf.hpp"
#include "msk/sketch.hpp"

namespace msk {

// Finite-limit preserving functor Copresheaf(source) -> Copresheaf(target),
// from a small closed algebra.
class LexFunctor {
public:
    enum class Kind { Identity, Precompose, GlobalSections, Evaluation, Compose };

    static LexFunctor identity(const Poset& base);
    // X |-> X o g, for a monotone g: target -> source
    static LexFunctor precompose(const Poset& source, const Poset& target, std::vector<std::size_t> g);
    static LexFunctor global_sections(const Poset& source);
    static LexFunctor evaluation(const Poset& source, std::size_t at);
    // parts.back() is applied first
    static LexFunctor compose(std::vector<LexFunctor> parts);

    Kind kind() const { return kind_; }
    const Poset& source() const { return source_; }
    const Poset& target() const { return target_; }
    const std::vector<std::size_t>& map() const { return map_; }
    std::size_t at() const { return at_; }
    const std::vector<LexFunctor>& parts() const { return parts_; }

    std::string describe() const;

    // same normal form: composites flattened, evaluations as precomposition
    // from the point, adjacent precompositions fused, identities dropped
    friend bool structurally_equal(const LexFunctor& a, const LexFunctor& b);
    friend bool operator==(const LexFunctor& a, const LexFunctor& b) {
        return a.kind_ == b.kind_ && a.source_ == b.source_ && a.target_ == b.target_ && a.map_ == b.map_ &&
               a.at_ == b.at_ && a.parts_ == b.parts_;
    }

private:
    Kind kind_ = Kind::Identity;
    Poset source_, target_;
    std::vector<std::size_t> map_;
    std::size_t at_ = 0;
    std::vector<LexFunctor> parts_;
};

Copresheaf lex_apply(const LexFunctor& f, const Copresheaf& x);
NatMap lex_apply(const LexFunctor& f, const NatMap& m);

// Limit of a poset-shaped diagram of copresheaves over one base; arrows
// (a, b, map) ask for map(e_a) = e_b. Points are lexicographic tuples.
struct DiagramLimit {
    Copresheaf object;
    std::vector<NatMap> legs;
};
struct DiagramArrow {
    std::size_t from, to;
    NatMap map;
};
DiagramLimit diagram_limit(const Poset& base, const std::vector<Copresheaf>& objects,
                           const std::vector<DiagramArrow>& arrows);

// Artin gluing along F: objects (a, b, m: a -> F b).
struct GlueObject {
    Copresheaf a, b;
    NatMap m;
    friend bool operator==(const GlueObject&, const GlueObject&) = default;
};
struct GlueMap {
    GlueObject source, target;
    NatMap fa, fb;
    friend bool operator==(const GlueMap&, const GlueMap&) = default;
};
struct GlueCone {
    GlueObject object;
    std::vector<GlueMap> legs;
};

class Glue {
public:
    explicit Glue(LexFunctor f) : f_(std::move(f)) {}
    const LexFunctor& functor() const { return f_; }

    GlueObject make_object(const Copresheaf& a, const Copresheaf& b, const NatMap& m) const;
    GlueMap make_map(const GlueObject& x, const GlueObject& y, const NatMap& fa, const NatMap& fb) const;
    std::vector<GlueMap> hom(const GlueObject& x, const GlueObject& y) const;
    GlueObject terminal() const;
    GlueCone product(const GlueObject& x, const GlueObject& y) const;
    GlueCone pullback(const GlueMap& f, const GlueMap& g) const;
    bool is_iso(const GlueMap& f) const;

private:
    LexFunctor f_;
};

// Models over a sketch: copresheaves over models[i] at element i, and for
// i < j a lex functor D_ij from the j-model to the i-model.
struct SketchDiagram {
    ModeSketch sketch;
    std::vector<Poset> models;
    std::map<Edge, LexFunctor> functors;

    const LexFunctor& at(std::size_t i, std::size_t j) const;
};

SketchDiagram constant_diagram(const ModeSketch& t, const Poset& model);
// lists missing or mistyped functors and triangles i<k<j with D_ij != D_ik D_kj
ValidationReport validate_diagram(const SketchDiagram& d, std::size_t corpus_card = 2);

// x_i plus structure maps x_ij: x_i -> D_ij(x_j) for i < j.
struct OplaxObject {
    std::vector<Copresheaf> comps;
    std::map<Edge, NatMap> maps;
    friend bool operator==(const OplaxObject&, const OplaxObject&) = default;
};
struct OplaxMap {
    OplaxObject source, target;
    std::vector<NatMap> comps;
    friend bool operator==(const OplaxMap&, const OplaxMap&) = default;
};

// Checks components and the coherence D_ik(x_kj) o x_ik = x_ij on every
// triangle; thin ones are flagged as such in the messages.
ValidationReport oplax_validate(const SketchDiagram& d, const OplaxObject& x);
bool is_oplax_map(const SketchDiagram& d, const OplaxObject& x, const OplaxObject& y, const std::vector<NatMap>& g);
std::vector<OplaxMap> oplax_hom(const SketchDiagram& d, const OplaxObject& x, const OplaxObject& y,
                                std::size_t budget = Budget::kDefault);

// Where the structure maps out of x_i land: lim over j > i of D_ij(x_j).
DiagramLimit structure_target(const SketchDiagram& d, const OplaxObject& x, std::size_t i);

// Every oplax object whose components come from the per-element corpora.
std::vector<OplaxObject> enumerate_oplax(const SketchDiagram& d, std::size_t max_card,
                                         std::size_t budget = Budget::kDefault);
OplaxObject random_oplax(const SketchDiagram& d, std::size_t max_card, std::mt19937& rng);

// Iterated gluing along linear_extension(T): peel the least element i0 and
// glue x_i0 against the rest through lim_{j > i0} D_i0j.
struct NestedGlue {
    std::size_t element = 0;
    Copresheaf head;
    Copresheaf target;  // lim of D_i0j over the rest
    NatMap m;           // head -> target
    std::shared_ptr<const NestedGlue> rest;
};
bool operator==(const NestedGlue& a, const NestedGlue& b);
struct GlueEquivalence {
    std::function<NestedGlue(const OplaxObject&)> to_glued;
    std::function<OplaxObject(const NestedGlue&)> from_glued;
};
GlueEquivalence iterate_glue_equivalence(const SketchDiagram& d);

OplaxObject prop_canonical_oplax(const SketchDiagram& d, Cosieve sigma);
bool is_oplax_subterminal(const SketchDiagram& d, const OplaxObject& x);
// componentwise meet and union of subterminals
OplaxObject oplax_meet(const SketchDiagram& d, const OplaxObject& x, const OplaxObject& y);
OplaxObject oplax_union(const SketchDiagram& d, const OplaxObject& x, const OplaxObject& y);

struct Localization {
    std::size_t element = 0;
    std::function<Copresheaf(const OplaxObject&)> proj;
    std::function<OplaxObject(const Copresheaf&)> radj;
    std::function<OplaxMap(const OplaxObject&)> unit;  // X -> radj(proj X)
};
Localization projection_and_right_adjoint(const SketchDiagram& d, std::size_t i);

struct AdjunctionReport {
    bool counit_identity = true;   // proj(radj y) == y
    bool bijection = true;         // g |-> g_i, hom(X, radj y) -> hom(X_i, y)
    bool unit_natural = true;      // unit is an oplax map and proj(unit) = id
    bool radj_fixed = true;        // unit at radj(y) is iso
    std::vector<std::string> failures;
    bool ok() const { return counit_identity && bijection && unit_natural && radj_fixed; }
};
AdjunctionReport check_adjunction(const SketchDiagram& d, std::size_t i, const std::vector<OplaxObject>& xs,
                                  const std::vector<Copresheaf>& ys);

// Oplax objects over the constant one-point diagram versus copresheaves on
// T's poset; needs every triangle of T thin.
struct ConstantModel {
    SketchDiagram diagram;
    std::function<Copresheaf(const OplaxObject&)> to_copresheaf;
    std::function<OplaxObject(const Copresheaf&)> from_copresheaf;
};
ConstantModel constant_model_equivalence(const ModeSketch& t);

} // namespace msk
