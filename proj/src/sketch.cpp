#include "msk/sketch.hpp"

#include <algorithm>
#include <map>

#include "msk/errors.hpp"

namespace msk {

ModeSketch::ModeSketch(Poset base, std::vector<Triangle> thin)
    : base_(std::move(base)), thin_(std::move(thin)) {
    std::sort(thin_.begin(), thin_.end());
    thin_.erase(std::unique(thin_.begin(), thin_.end()), thin_.end());
}

bool ModeSketch::is_thin(std::size_t a, std::size_t b, std::size_t c) const {
    return std::binary_search(thin_.begin(), thin_.end(), Triangle{a, b, c});
}

std::vector<Triangle> ModeSketch::triangles() const {
    std::vector<Triangle> out;
    const std::size_t n = base_.size();
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            for (std::size_t c = 0; c < n; ++c)
                if (base_.lt(a, b) && base_.lt(b, c)) out.push_back({a, b, c});
    return out;
}

bool ModeSketch::all_thin() const {
    for (auto& t : triangles())
        if (!is_thin(t[0], t[1], t[2])) return false;
    return true;
}

ValidationReport validate_sketch(const ModeSketch& s) {
    ValidationReport r;
    const auto& p = s.base();
    for (auto& t : s.thin()) {
        std::string label;
        bool in_range = true;
        for (auto k : t) {
            if (k >= p.size()) in_range = false;
            label += (label.empty() ? "(" : ",") + (k < p.size() ? p.name(k) : "#" + std::to_string(k));
        }
        label += ")";
        if (!in_range) {
            r.violations.push_back(label + ": unknown element");
            continue;
        }
        if (!p.lt(t[0], t[1]) || !p.lt(t[1], t[2]))
            r.violations.push_back(label + ": not strictly increasing");
    }
    r.ok = r.violations.empty();
    return r;
}

const std::vector<std::string>& catalog_names() {
    static const std::vector<std::string> names{"functor", "triangle", "span", "chain3"};
    return names;
}

ModeSketch sketch_catalog(const std::string& name) {
    if (name == "functor") return ModeSketch(Poset::chain(2), {});
    if (name == "triangle") return ModeSketch(Poset::chain(3), {{0, 1, 2}});
    if (name == "chain3") return ModeSketch(Poset::chain(3), {});
    if (name == "span") return ModeSketch(Poset::build({"0", "1", "01"}, {{"01", "0"}, {"01", "1"}}), {});
    throw UnknownName("no catalog sketch named '" + name + "'");
}

std::vector<Poset> all_posets(std::size_t n) {
    if (n > 4) throw PreconditionFailed("all_posets is limited to 4 elements");
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back(std::to_string(i));
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) pairs.emplace_back(i, j);
    std::vector<Poset> out;
    for (std::uint32_t s = 0; s < (1u << pairs.size()); ++s) {
        std::vector<Mask> up(n);
        for (std::size_t i = 0; i < n; ++i) up[i] = bit(i);
        for (std::size_t k = 0; k < pairs.size(); ++k)
            if (has(s, k)) up[pairs[k].first] |= bit(pairs[k].second);
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i)
            for (std::size_t j = 0; j < n && ok; ++j) {
                if (i != j && has(up[i], j) && has(up[j], i)) ok = false;
                for (std::size_t k = 0; k < n && ok; ++k)
                    if (has(up[i], j) && has(up[j], k) && !has(up[i], k)) ok = false;
            }
        if (!ok) continue;
        std::vector<std::pair<std::size_t, std::size_t>> rel;
        for (std::size_t k = 0; k < pairs.size(); ++k)
            if (has(s, k)) rel.push_back(pairs[k]);
        out.push_back(Poset::from_relation(names, rel));
    }
    return out;
}

std::vector<ModeSketch> all_sketches(std::size_t max_n) {
    std::vector<ModeSketch> out;
    for (std::size_t n = 0; n <= max_n; ++n)
        for (auto& p : all_posets(n)) {
            ModeSketch bare(p, {});
            auto tris = bare.triangles();
            for (std::uint32_t s = 0; s < (1u << tris.size()); ++s) {
                std::vector<Triangle> thin;
                for (std::size_t k = 0; k < tris.size(); ++k)
                    if (has(s, k)) thin.push_back(tris[k]);
                out.emplace_back(p, thin);
            }
        }
    return out;
}

std::size_t RealizedHom::class_of_chain(const Chain& c) const {
    auto it = std::find(chains.begin(), chains.end(), c);
    if (it == chains.end()) throw PreconditionFailed("chain not in this hom");
    return class_of[static_cast<std::size_t>(it - chains.begin())];
}

RealizedHom realize_hom(const ModeSketch& s, std::size_t i, std::size_t j) {
    auto hp = hom_chains(s.base(), i, j);
    RealizedHom r;
    r.chains = hp.chains;
    const std::size_t n = r.chains.size();
    std::map<Chain, std::size_t> index;
    for (std::size_t a = 0; a < n; ++a) index[r.chains[a]] = a;

    // reach[a][b]: a <= b in the localized preorder
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) reach[a][b] = hp.leq(a, b);
    for (std::size_t a = 0; a < n; ++a) {
        const auto& c = r.chains[a];
        for (std::size_t k = 1; k + 1 < c.size(); ++k) {
            if (!s.is_thin(c[k - 1], c[k], c[k + 1])) continue;
            Chain d = c;
            d.erase(d.begin() + static_cast<std::ptrdiff_t>(k));
            reach[a][index.at(d)] = true;
        }
    }
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t a = 0; a < n; ++a)
            if (reach[a][k])
                for (std::size_t b = 0; b < n; ++b)
                    if (reach[k][b]) reach[a][b] = true;

    r.class_of.assign(n, n);
    for (std::size_t a = 0; a < n; ++a) {
        if (r.class_of[a] != n) continue;
        std::size_t id = r.class_names.size();
        r.class_names.push_back(r.chains[a]);  // chains are lexicographic, so a is least
        for (std::size_t b = a; b < n; ++b)
            if (reach[a][b] && reach[b][a]) r.class_of[b] = id;
    }
    const std::size_t m = r.class_names.size();
    r.leq.assign(m, std::vector<bool>(m, false));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            if (reach[a][b]) r.leq[r.class_of[a]][r.class_of[b]] = true;
    return r;
}

Chain concat(const Chain& a, const Chain& b) {
    if (a.empty() || b.empty() || a.back() != b.front())
        throw PreconditionFailed("chains do not share an endpoint");
    Chain c = a;
    c.insert(c.end(), b.begin() + 1, b.end());
    return c;
}

} // namespace msk
