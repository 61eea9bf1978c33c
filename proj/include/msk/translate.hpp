#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "msk/copresheaf.hpp"
#include "msk/syntax.hpp"

namespace msk {

// A catalog shape: the poset, its components in translation order (maximal
// elements first) and the suffixes used for generated names.
struct Shape {
    std::string name;
    Poset poset;
    std::vector<std::size_t> levels;
    std::vector<std::string> binder_suffix;  // per element
    std::vector<std::string> decl_suffix;

    std::vector<std::size_t> above(std::size_t j) const;   // k > j, in level order
    std::vector<std::size_t> at_least(std::size_t j) const; // k >= j
    std::size_t position(std::size_t element) const;       // index into levels
};
Shape shape_named(const std::string& name);  // two | span | chain3

struct GluedType {
    E stat;      // static part, a type
    E relation;  // family over stat
};

// Components in level order; a component over other components is a family
// taking their values as arguments. Outputs are closed and beta normal.
std::vector<E> translate_sketch(const E& ty, const Shape& s);
GluedType translate_two(const E& ty);

// Level form of the translation of an open expression: source variable v
// (counted from the outside) has its component at levels[p] as Lvl(v*L + p).
std::vector<E> translate_open(const E& expr, const Shape& s, std::size_t vars);
E replace_levels(const E& e, const std::vector<E>& values);

// Declarations the translated components live over: each source base B
// becomes one base per element, typed by the universe's components.
TypeContext target_context(const std::vector<std::string>& bases, const Shape& s);
// The type each component must have, given the components before it.
std::vector<E> component_types(const std::vector<E>& comps, const Shape& s);

// ---- finite semantics

struct Value;
using V = std::shared_ptr<const Value>;
struct Value {
    enum Kind { Unit, Atom, Pair, Fun, Refl } kind;
    std::string base;
    std::size_t atom = 0;
    V a, b;
    std::vector<std::tuple<std::size_t, V, V>> table;  // (stage, argument, result), sorted
};
int compare(const V& x, const V& y);
struct ValueLess {
    bool operator()(const V& x, const V& y) const { return compare(x, y) < 0; }
};
std::string show_value(const V& v);

// A base type or family: elements at a stage given argument values, and how
// its atoms restrict along s <= t.
struct BaseSemantics {
    std::function<std::vector<V>(std::size_t stage, const std::vector<V>& args)> elements;
    std::function<V(const V& atom, std::size_t s, std::size_t t)> restrict;
};

// Copresheaves over `base` read as a Kripke model of the type theory.
struct Model {
    Poset base;
    std::map<std::string, BaseSemantics> bases;
};
Model copresheaf_model(const Poset& base, const std::map<std::string, Copresheaf>& env);

struct GluedDecl {
    std::string name;
    std::size_t static_card = 0;
    std::vector<std::size_t> relation_cards;  // one per static element
};
// The declaration as a copresheaf on {0 < 1}: relation total space at 0.
Copresheaf glued_copresheaf(const GluedDecl& d);
// One-point model with B a set and B_r a family over it.
Model glued_set_model(const std::vector<GluedDecl>& decls);

// Elements of a (checked) type at a stage, in canonical order.
std::vector<V> type_elements(const Model& m, const E& ty, std::size_t stage, const std::vector<V>& env,
                             Budget& budget);
V evaluate(const Model& m, const E& term, std::size_t stage, const std::vector<V>& env, Budget& budget);
V restrict_value(const Model& m, const V& v, std::size_t s, std::size_t t);

// Closed checked type as a copresheaf on the model's base. U is refused.
Copresheaf interpret_model(const E& ty, const Model& m, std::size_t budget = Budget::kDefault);

struct TranslationVerdict {
    bool iso = false;
    Copresheaf direct, reassembled;
    std::optional<NatMap> witness;
    GluedType glued;
    std::string detail;
};
// Shape two only: interpret ty over {0<1}, interpret the translated pair in
// the one-point model, glue the relation's total space under the static set.
TranslationVerdict check_translation(const E& ty, const std::vector<GluedDecl>& env,
                                     std::size_t budget = Budget::kDefault);

// Closed types over the given bases: Unit, bases, Pi, Sigma and Id of
// variables, nested to `depth` binders. Pi domains are kept to depth 1.
std::vector<E> type_corpus(const std::vector<std::string>& bases, std::size_t depth, std::size_t limit);

} // namespace msk
