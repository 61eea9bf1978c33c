#include "msk/enumerate.hpp"

#include <algorithm>
#include <numeric>

namespace msk {

std::vector<std::size_t> iota(std::size_t n) {
    std::vector<std::size_t> v(n);
    std::iota(v.begin(), v.end(), std::size_t{0});
    return v;
}

void solve(const SlotProblem& p, Budget& budget,
           const std::function<bool(const std::vector<std::size_t>&)>& visit) {
    const std::size_t n = p.domains.size();
    // links become checkable once their later endpoint is assigned
    std::vector<std::vector<const SlotProblem::Link*>> at(n);
    for (auto& l : p.links) at[std::max(l.from, l.to)].push_back(&l);
    std::vector<std::vector<std::size_t>> same_group(n);
    if (!p.group.empty())
        for (std::size_t s = 0; s < n; ++s)
            for (std::size_t t = 0; t < s; ++t)
                if (p.group[s] >= 0 && p.group[s] == p.group[t]) same_group[s].push_back(t);

    std::vector<std::size_t> value(n, 0);
    std::vector<std::size_t> cursor(n, 0);
    if (n == 0) {
        budget.charge();
        visit(value);
        return;
    }
    std::size_t s = 0;
    cursor[0] = 0;
    while (true) {
        if (cursor[s] >= p.domains[s].size()) {
            if (s == 0) return;
            --s;
            ++cursor[s];
            continue;
        }
        budget.charge();
        value[s] = p.domains[s][cursor[s]];
        bool ok = true;
        for (auto* l : at[s]) {
            auto src = value[l->from];
            if (src >= l->map.size() || l->map[src] != value[l->to]) {
                ok = false;
                break;
            }
        }
        if (ok)
            for (auto t : same_group[s])
                if (value[t] == value[s]) {
                    ok = false;
                    break;
                }
        if (!ok) {
            ++cursor[s];
            continue;
        }
        if (s + 1 == n) {
            if (!visit(value)) return;
            ++cursor[s];
            continue;
        }
        ++s;
        cursor[s] = 0;
    }
}

std::vector<std::vector<std::size_t>> solve_all(const SlotProblem& p, Budget& budget) {
    std::vector<std::vector<std::size_t>> out;
    solve(p, budget, [&](const std::vector<std::size_t>& v) {
        out.push_back(v);
        return true;
    });
    return out;
}

} // namespace msk
