#pragma once

#include <array>
#include <string>
#include <vector>

#include "msk/poset.hpp"

namespace msk {

using Triangle = std::array<std::size_t, 3>;

// A poset with some triangles i0 < i1 < i2 marked thin. Invalid triples are
// representable so that validate() can report them.
class ModeSketch {
public:
    ModeSketch() = default;
    ModeSketch(Poset base, std::vector<Triangle> thin);

    const Poset& base() const { return base_; }
    const std::vector<Triangle>& thin() const { return thin_; }
    bool is_thin(std::size_t a, std::size_t b, std::size_t c) const;

    // all strict triangles of the base, lexicographic
    std::vector<Triangle> triangles() const;
    bool all_thin() const;

    friend bool operator==(const ModeSketch&, const ModeSketch&) = default;

private:
    Poset base_;
    std::vector<Triangle> thin_;  // sorted, unique
};

struct ValidationReport {
    bool ok = true;
    std::vector<std::string> violations;
};

ValidationReport validate_sketch(const ModeSketch& s);

// functor, triangle, span, chain3
ModeSketch sketch_catalog(const std::string& name);
const std::vector<std::string>& catalog_names();

// Every labelled poset on n elements (n <= 4), as relations on "0".."n-1".
std::vector<Poset> all_posets(std::size_t n);
// Every sketch on every labelled poset with at most n elements and every set
// of thin triangles.
std::vector<ModeSketch> all_sketches(std::size_t max_n);

struct RealizedHom {
    std::vector<Chain> chains;              // hom_chains order
    std::vector<std::size_t> class_of;      // chain index -> class index
    std::vector<Chain> class_names;         // least member, lexicographic
    std::vector<std::vector<bool>> leq;     // induced order on classes

    std::size_t classes() const { return class_names.size(); }
    std::size_t class_of_chain(const Chain& c) const;
};

// The hom-poset of the realization between i and j: chains from i to j with
// thin interior points made invertible, i.e. the posetal localization of the
// inclusion order at the arrows c\{k} <= c for thin (a,k,b).
RealizedHom realize_hom(const ModeSketch& s, std::size_t i, std::size_t j);

// Concatenate at a shared endpoint.
Chain concat(const Chain& a, const Chain& b);

} // namespace msk
