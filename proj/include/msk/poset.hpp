#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace msk {

using Mask = std::uint32_t;

inline bool has(Mask m, std::size_t i) { return (m >> i) & 1u; }
inline Mask bit(std::size_t i) { return Mask{1} << i; }

// Finite poset with a precomputed <= matrix. Elements are addressed by their
// position in the declared order.
class Poset {
public:
    static constexpr std::size_t kMaxSize = 16;

    Poset();  // empty poset

    // elements plus a Hasse-style presentation; the order is its reflexive
    // transitive closure.
    static Poset build(std::vector<std::string> elements,
                       const std::vector<std::pair<std::string, std::string>>& covers);
    static Poset from_relation(std::vector<std::string> elements,
                               const std::vector<std::pair<std::size_t, std::size_t>>& rel);

    static Poset chain(std::size_t n);
    static Poset antichain(std::size_t n);
    static Poset point();

    std::size_t size() const { return d_->names.size(); }
    const std::vector<std::string>& elements() const { return d_->names; }
    const std::string& name(std::size_t i) const { return d_->names.at(i); }
    std::size_t index_of(const std::string& name) const;
    std::optional<std::size_t> find(const std::string& name) const;

    bool leq(std::size_t i, std::size_t j) const { return has(d_->up[i], j); }
    bool lt(std::size_t i, std::size_t j) const { return i != j && leq(i, j); }
    bool comparable(std::size_t i, std::size_t j) const { return leq(i, j) || leq(j, i); }

    Mask up(std::size_t i) const { return d_->up[i]; }      // {j | i <= j}
    Mask down(std::size_t i) const { return d_->down[i]; }  // {j | j <= i}
    Mask full() const { return size() == 32 ? ~Mask{0} : bit(size()) - 1; }

    // Hasse diagram, sorted lexicographically by (lower, upper).
    const std::vector<std::pair<std::size_t, std::size_t>>& covers() const { return d_->covers; }
    bool is_cover(std::size_t a, std::size_t b) const;

    Poset opposite() const;

    friend bool operator==(const Poset& a, const Poset& b);

private:
    struct Data {
        std::vector<std::string> names;
        std::vector<Mask> up, down;
        std::vector<std::pair<std::size_t, std::size_t>> covers;
    };
    explicit Poset(std::shared_ptr<const Data> d) : d_(std::move(d)) {}
    static Poset close(std::vector<std::string> names, std::vector<Mask> up);

    std::shared_ptr<const Data> d_;
};

// Upward-closed subset, stored as a bitmask over the poset's element order.
struct Cosieve {
    Mask bits = 0;

    bool contains(std::size_t i) const { return has(bits, i); }
    bool subset_of(const Cosieve& o) const { return (bits & ~o.bits) == 0; }
    friend bool operator==(Cosieve, Cosieve) = default;
    friend auto operator<=>(Cosieve a, Cosieve b) { return a.bits <=> b.bits; }
};

bool is_cosieve(const Poset& p, Mask m);
bool is_sieve(const Poset& p, Mask m);
bool is_convex(const Poset& p, Mask m);
Mask up_closure(const Poset& p, Mask m);
Mask down_closure(const Poset& p, Mask m);

Cosieve principal_cosieve(const Poset& p, std::size_t i);
Cosieve boundary(const Poset& p, std::size_t i);

// Element names of a mask, in element order.
std::vector<std::string> names_of(const Poset& p, Mask m);
Mask mask_of(const Poset& p, const std::vector<std::string>& names);

class CosieveLattice {
public:
    explicit CosieveLattice(const Poset& p);

    const Poset& base() const { return base_; }
    const std::vector<Cosieve>& elements() const { return elems_; }  // ascending by mask
    std::size_t size() const { return elems_.size(); }
    std::size_t index_of(Cosieve c) const;

    Cosieve top() const { return Cosieve{base_.full()}; }
    Cosieve bottom() const { return Cosieve{0}; }
    static Cosieve meet(Cosieve a, Cosieve b) { return Cosieve{a.bits & b.bits}; }
    static Cosieve join(Cosieve a, Cosieve b) { return Cosieve{a.bits | b.bits}; }
    static bool leq(Cosieve a, Cosieve b) { return a.subset_of(b); }

private:
    Poset base_;
    std::vector<Cosieve> elems_;
    std::vector<std::int32_t> pos_;  // mask -> index, -1 if not a cosieve
};

// Ties are broken by element order.
std::vector<std::size_t> linear_extension(const Poset& p);

using Chain = std::vector<std::size_t>;

struct ChainPoset {
    std::vector<Chain> chains;  // lexicographic
    bool leq(std::size_t a, std::size_t b) const;  // inclusion
    std::optional<std::size_t> minimum() const;
};

bool is_chain(const Poset& p, const Chain& c);
ChainPoset hom_chains(const Poset& p, std::size_t i, std::size_t j);

} // namespace msk
