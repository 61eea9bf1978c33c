#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "msk/errors.hpp"

namespace msk {

using Table = std::vector<std::size_t>;

// Backtracking over assignments slot -> value. Solutions come out in
// lexicographic order of (value[0], value[1], ...).
struct SlotProblem {
    struct Link {
        std::size_t from, to;
        Table map;  // value[to] == map[value[from]]
    };

    std::vector<std::vector<std::size_t>> domains;  // ascending
    std::vector<Link> links;
    std::vector<int> group;  // optional; slots sharing a group id >= 0 take distinct values

    std::size_t add_slot(std::vector<std::size_t> domain, int grp = -1) {
        domains.push_back(std::move(domain));
        group.push_back(grp);
        return domains.size() - 1;
    }
    void link(std::size_t from, std::size_t to, Table map) {
        links.push_back({from, to, std::move(map)});
    }
};

// The visitor returns false to stop early.
void solve(const SlotProblem& p, Budget& budget,
           const std::function<bool(const std::vector<std::size_t>&)>& visit);

std::vector<std::vector<std::size_t>> solve_all(const SlotProblem& p, Budget& budget);

std::vector<std::size_t> iota(std::size_t n);

} // namespace msk
