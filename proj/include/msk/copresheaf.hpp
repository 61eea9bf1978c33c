#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "msk/enumerate.hpp"
#include "msk/poset.hpp"

namespace msk {

using Edge = std::pair<std::size_t, std::size_t>;

Table compose(const Table& g, const Table& f);  // g after f
Table identity_table(std::size_t n);
Table constant_table(std::size_t n, std::size_t value);
bool is_bijection(const Table& t, std::size_t codomain);

// A functor from a finite poset to finite sets; the set at i is {0..card(i)-1}.
// Edge tables are given on covers; transitions are derived and checked.
class Copresheaf {
public:
    Copresheaf();
    Copresheaf(Poset base, std::vector<std::size_t> card, std::map<Edge, Table> edges);

    // edge tables from a function on covers
    static Copresheaf from_function(Poset base, std::vector<std::size_t> card,
                                    const std::function<std::size_t(std::size_t a, std::size_t b, std::size_t x)>& f);

    const Poset& base() const { return d_->base; }
    std::size_t card(std::size_t i) const { return d_->card.at(i); }
    const std::vector<std::size_t>& cards() const { return d_->card; }
    const std::map<Edge, Table>& edges() const { return d_->edges; }
    const Table& edge(std::size_t a, std::size_t b) const;
    const Table& transition(std::size_t a, std::size_t b) const;
    std::size_t apply(std::size_t a, std::size_t b, std::size_t x) const { return transition(a, b)[x]; }

    friend bool operator==(const Copresheaf& x, const Copresheaf& y);

private:
    struct Data {
        Poset base;
        std::vector<std::size_t> card;
        std::map<Edge, Table> edges;
        std::vector<Table> trans;  // n*n, empty when incomparable
    };
    std::shared_ptr<const Data> d_;
};

void require_same_base(const Poset& a, const Poset& b);

class NatMap {
public:
    NatMap() = default;
    NatMap(Copresheaf source, Copresheaf target, std::vector<Table> comps);

    static NatMap identity(const Copresheaf& x);

    const Copresheaf& source() const { return src_; }
    const Copresheaf& target() const { return tgt_; }
    const Table& at(std::size_t i) const { return comps_.at(i); }
    const std::vector<Table>& comps() const { return comps_; }

    friend bool operator==(const NatMap&, const NatMap&) = default;

private:
    Copresheaf src_, tgt_;
    std::vector<Table> comps_;
};

NatMap compose(const NatMap& g, const NatMap& f);  // g after f
bool is_iso(const NatMap& f);
bool is_mono(const NatMap& f);
NatMap inverse(const NatMap& f);

Copresheaf terminal(const Poset& base);
Copresheaf initial(const Poset& base);
NatMap to_terminal(const Copresheaf& x);
NatMap from_initial(const Copresheaf& x);

struct Cone {
    Copresheaf object;
    std::vector<NatMap> legs;
};

Cone product(const Copresheaf& x, const Copresheaf& y);
Cone pullback(const NatMap& f, const NatMap& g);  // legs to f.source, g.source
Cone equalizer(const NatMap& f, const NatMap& g); // one leg
Cone coproduct(const Copresheaf& x, const Copresheaf& y);  // legs are injections
Cone pushout(const NatMap& f, const NatMap& g);   // f: Z->X, g: Z->Y; legs X->P, Y->P
Cone image(const NatMap& f);                      // legs: X->Im, Im->Y

// Universal maps, for checking the universal properties.
NatMap pair_map(const Cone& prod, const NatMap& f, const NatMap& g);
NatMap pullback_pair(const Cone& pb, const NatMap& u, const NatMap& v);
NatMap copair_map(const Cone& coprod, const NatMap& f, const NatMap& g);
NatMap product_map(const NatMap& f, const NatMap& g);  // f x g between canonical products

// Y^X with evaluation (Y^X) x X -> Y.
struct Exponential {
    Copresheaf object;
    NatMap eval;
    std::vector<std::vector<std::vector<std::size_t>>> families;  // per stage, ascending
};
Exponential exponential(const Copresheaf& x, const Copresheaf& y, std::size_t budget = Budget::kDefault);
// transpose of f: Z x X -> Y, where Z x X is the canonical product
NatMap curry(const Exponential& e, const Copresheaf& z, const Copresheaf& x, const NatMap& f);

// Limit of the restriction to a subset M of the base: tuples indexed by the
// members of M in element order.
std::vector<std::vector<std::size_t>> limit_tuples(const Copresheaf& x, Mask m, Budget& budget);

struct DependentProduct {
    NatMap proj;  // Pi -> Gamma
    NatMap eval;  // Pi x_Gamma A -> Z
};
DependentProduct dependent_product(const NatMap& f, const NatMap& z, std::size_t budget = Budget::kDefault);

Copresheaf subterminal_from_cosieve(const Poset& base, Cosieve s);
Cosieve cosieve_from_subterminal(const Copresheaf& x);
bool is_subterminal(const Copresheaf& x);

std::vector<NatMap> hom_set(const Copresheaf& x, const Copresheaf& y, std::size_t budget = Budget::kDefault);
std::size_t hom_count(const Copresheaf& x, const Copresheaf& y, std::size_t budget = Budget::kDefault);
std::optional<NatMap> find_iso(const Copresheaf& x, const Copresheaf& y, std::size_t budget = Budget::kDefault);
bool isomorphic(const Copresheaf& x, const Copresheaf& y, std::size_t budget = Budget::kDefault);

std::vector<Copresheaf> enumerate_copresheaves(const Poset& base, std::size_t max_card, bool dedupe = false,
                                              std::size_t budget = Budget::kDefault);

} // namespace msk
