#include "msk/poset.hpp"

#include <algorithm>
#include <set>

#include "msk/errors.hpp"

namespace msk {

Poset::Poset() : d_(std::make_shared<Data>()) {}

Poset Poset::close(std::vector<std::string> names, std::vector<Mask> up) {
    const std::size_t n = names.size();
    {
        std::set<std::string> seen;
        for (auto& s : names)
            if (!seen.insert(s).second)
                throw SchemaError("duplicate element '" + s + "'");
    }
    for (std::size_t i = 0; i < n; ++i) up[i] |= bit(i);
    // Warshall on bitsets
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            if (has(up[i], k)) up[i] |= up[k];
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (has(up[i], j) && has(up[j], i))
                throw CycleError("'" + names[i] + "' and '" + names[j] + "' are mutually below each other");

    auto d = std::make_shared<Data>();
    d->names = std::move(names);
    d->up = std::move(up);
    d->down.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (has(d->up[i], j)) d->down[j] |= bit(i);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            if (a == b || !has(d->up[a], b)) continue;
            Mask between = d->up[a] & d->down[b] & ~bit(a) & ~bit(b);
            if (between == 0) d->covers.emplace_back(a, b);
        }
    return Poset(std::move(d));
}

Poset Poset::build(std::vector<std::string> elements,
                   const std::vector<std::pair<std::string, std::string>>& covers) {
    if (elements.size() > kMaxSize)
        throw PreconditionFailed("posets are limited to " + std::to_string(kMaxSize) + " elements");
    auto lookup = [&](const std::string& s) {
        auto it = std::find(elements.begin(), elements.end(), s);
        if (it == elements.end()) throw UnknownElement("unknown element '" + s + "'");
        return static_cast<std::size_t>(it - elements.begin());
    };
    std::vector<Mask> up(elements.size(), 0);
    for (auto& [a, b] : covers) up[lookup(a)] |= bit(lookup(b));
    return close(std::move(elements), std::move(up));
}

Poset Poset::from_relation(std::vector<std::string> elements,
                           const std::vector<std::pair<std::size_t, std::size_t>>& rel) {
    if (elements.size() > kMaxSize)
        throw PreconditionFailed("posets are limited to " + std::to_string(kMaxSize) + " elements");
    std::vector<Mask> up(elements.size(), 0);
    for (auto [a, b] : rel) {
        if (a >= elements.size() || b >= elements.size())
            throw UnknownElement("relation index out of range");
        up[a] |= bit(b);
    }
    return close(std::move(elements), std::move(up));
}

Poset Poset::chain(std::size_t n) {
    std::vector<std::string> names;
    std::vector<std::pair<std::size_t, std::size_t>> rel;
    for (std::size_t i = 0; i < n; ++i) {
        names.push_back(std::to_string(i));
        if (i + 1 < n) rel.emplace_back(i, i + 1);
    }
    return from_relation(std::move(names), rel);
}

Poset Poset::antichain(std::size_t n) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back(std::to_string(i));
    return from_relation(std::move(names), {});
}

Poset Poset::point() { return from_relation({"*"}, {}); }

std::optional<std::size_t> Poset::find(const std::string& name) const {
    auto& v = d_->names;
    auto it = std::find(v.begin(), v.end(), name);
    if (it == v.end()) return std::nullopt;
    return static_cast<std::size_t>(it - v.begin());
}

std::size_t Poset::index_of(const std::string& name) const {
    auto i = find(name);
    if (!i) throw UnknownElement("unknown element '" + name + "'");
    return *i;
}

bool Poset::is_cover(std::size_t a, std::size_t b) const {
    return std::binary_search(d_->covers.begin(), d_->covers.end(), std::make_pair(a, b));
}

Poset Poset::opposite() const {
    std::vector<Mask> up(d_->down);
    return close(d_->names, std::move(up));
}

bool operator==(const Poset& a, const Poset& b) {
    if (a.d_ == b.d_) return true;
    return a.d_->names == b.d_->names && a.d_->up == b.d_->up;
}

bool is_cosieve(const Poset& p, Mask m) {
    if (m & ~p.full()) return false;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (has(m, i) && (p.up(i) & ~m)) return false;
    return true;
}

bool is_sieve(const Poset& p, Mask m) {
    if (m & ~p.full()) return false;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (has(m, i) && (p.down(i) & ~m)) return false;
    return true;
}

Mask up_closure(const Poset& p, Mask m) {
    Mask r = 0;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (has(m, i)) r |= p.up(i);
    return r;
}

Mask down_closure(const Poset& p, Mask m) {
    Mask r = 0;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (has(m, i)) r |= p.down(i);
    return r;
}

bool is_convex(const Poset& p, Mask m) {
    return (up_closure(p, m) & down_closure(p, m)) == m;
}

Cosieve principal_cosieve(const Poset& p, std::size_t i) {
    if (i >= p.size()) throw UnknownElement("element index out of range");
    return Cosieve{p.up(i)};
}

Cosieve boundary(const Poset& p, std::size_t i) {
    return Cosieve{principal_cosieve(p, i).bits & ~bit(i)};
}

std::vector<std::string> names_of(const Poset& p, Mask m) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (has(m, i)) out.push_back(p.name(i));
    return out;
}

Mask mask_of(const Poset& p, const std::vector<std::string>& names) {
    Mask m = 0;
    for (auto& n : names) m |= bit(p.index_of(n));
    return m;
}

CosieveLattice::CosieveLattice(const Poset& p) : base_(p) {
    const Mask limit = Mask{1} << p.size();
    pos_.assign(limit, -1);
    for (Mask m = 0; m < limit; ++m)
        if (is_cosieve(p, m)) {
            pos_[m] = static_cast<std::int32_t>(elems_.size());
            elems_.push_back(Cosieve{m});
        }
}

std::size_t CosieveLattice::index_of(Cosieve c) const {
    if (c.bits >= pos_.size() || pos_[c.bits] < 0)
        throw PreconditionFailed("not a cosieve of this lattice");
    return static_cast<std::size_t>(pos_[c.bits]);
}

std::vector<std::size_t> linear_extension(const Poset& p) {
    std::vector<std::size_t> out;
    Mask placed = 0;
    while (out.size() < p.size()) {
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (has(placed, i)) continue;
            if ((p.down(i) & ~bit(i) & ~placed) == 0) {
                out.push_back(i);
                placed |= bit(i);
                break;
            }
        }
    }
    return out;
}

bool is_chain(const Poset& p, const Chain& c) {
    for (std::size_t k = 0; k < c.size(); ++k) {
        if (c[k] >= p.size()) return false;
        if (k > 0 && !p.lt(c[k - 1], c[k])) return false;
    }
    return true;
}

static Mask chain_mask(const Chain& c) {
    Mask m = 0;
    for (auto k : c) m |= bit(k);
    return m;
}

bool ChainPoset::leq(std::size_t a, std::size_t b) const {
    Mask x = chain_mask(chains[a]);
    return (x & ~chain_mask(chains[b])) == 0;
}

std::optional<std::size_t> ChainPoset::minimum() const {
    for (std::size_t a = 0; a < chains.size(); ++a) {
        bool all = true;
        for (std::size_t b = 0; b < chains.size() && all; ++b) all = leq(a, b);
        if (all) return a;
    }
    return std::nullopt;
}

ChainPoset hom_chains(const Poset& p, std::size_t i, std::size_t j) {
    if (i >= p.size() || j >= p.size()) throw UnknownElement("element index out of range");
    ChainPoset out;
    if (i == j) {
        out.chains.push_back({i});
        return out;
    }
    if (!p.leq(i, j)) return out;
    Mask interior = p.up(i) & p.down(j) & ~bit(i) & ~bit(j);
    std::vector<std::size_t> mid;
    for (std::size_t k = 0; k < p.size(); ++k)
        if (has(interior, k)) mid.push_back(k);
    // order the interior along a linear extension so that chains list in order
    auto ext = linear_extension(p);
    std::vector<std::size_t> rank(p.size());
    for (std::size_t r = 0; r < ext.size(); ++r) rank[ext[r]] = r;
    std::sort(mid.begin(), mid.end(), [&](auto a, auto b) { return rank[a] < rank[b]; });
    for (Mask s = 0; s < (Mask{1} << mid.size()); ++s) {
        Chain c{i};
        for (std::size_t k = 0; k < mid.size(); ++k)
            if (has(s, k)) c.push_back(mid[k]);
        c.push_back(j);
        if (is_chain(p, c)) out.chains.push_back(std::move(c));
    }
    std::sort(out.chains.begin(), out.chains.end());
    return out;
}

} // namespace msk
