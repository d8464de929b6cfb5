#pragma once

#include <algorithm>

#include "individual.hpp"

namespace sprig {

namespace detail {

inline bool dominates(const Individual& a, const Individual& b) {
    const bool le = a.loss <= b.loss && a.complexity <= b.complexity;
    const bool lt = a.loss < b.loss || a.complexity < b.complexity;
    return le && lt;
}

} // namespace detail

// Fast non-dominated sort on (loss, complexity); assigns ranks and returns
// the fronts as index lists in input order.
inline std::vector<std::vector<std::size_t>> nondominated_sort(std::vector<Individual>& pool) {
    const std::size_t n = pool.size();
    std::vector<std::vector<std::size_t>> dominated(n);
    std::vector<int> domination_count(n, 0);
    std::vector<std::vector<std::size_t>> fronts(1);

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            if (detail::dominates(pool[i], pool[j])) dominated[i].push_back(j);
            else if (detail::dominates(pool[j], pool[i])) ++domination_count[i];
        }
        if (domination_count[i] == 0) {
            pool[i].rank = 0;
            fronts[0].push_back(i);
        }
    }
    std::size_t f = 0;
    while (!fronts[f].empty()) {
        std::vector<std::size_t> next;
        for (std::size_t i : fronts[f]) {
            for (std::size_t j : dominated[i]) {
                if (--domination_count[j] == 0) {
                    pool[j].rank = static_cast<int>(f) + 1;
                    next.push_back(j);
                }
            }
        }
        // Keep each front in ascending pool order for determinism.
        std::sort(next.begin(), next.end());
        fronts.push_back(std::move(next));
        ++f;
    }
    fronts.pop_back();
    return fronts;
}

// Standard crowding distance over the two objectives; boundary members of
// each front get infinite distance.
inline void assign_crowding(std::vector<Individual>& pool, const std::vector<std::size_t>& front) {
    const std::size_t n = front.size();
    for (std::size_t i : front) pool[i].crowding = 0.0;
    if (n <= 2) {
        for (std::size_t i : front) pool[i].crowding = std::numeric_limits<double>::infinity();
        return;
    }
    auto by_objective = [&](auto key) {
        std::vector<std::size_t> order(front);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return key(pool[a]) < key(pool[b]); });
        const double lo = key(pool[order.front()]);
        const double hi = key(pool[order.back()]);
        pool[order.front()].crowding = std::numeric_limits<double>::infinity();
        pool[order.back()].crowding = std::numeric_limits<double>::infinity();
        if (hi <= lo) return;
        for (std::size_t k = 1; k + 1 < n; ++k) {
            if (std::isinf(pool[order[k]].crowding)) continue;
            pool[order[k]].crowding +=
                (key(pool[order[k + 1]]) - key(pool[order[k - 1]])) / (hi - lo);
        }
    };
    by_objective([](const Individual& ind) { return ind.loss; });
    by_objective([](const Individual& ind) { return static_cast<double>(ind.complexity); });
}

// NSGA-II survival: fill front by front; the boundary front is truncated by
// descending crowding distance with a stable sort, so the outcome is a
// deterministic function of the input order.
inline std::vector<Individual> nsga2_survive(std::vector<Individual> pool, std::size_t n_survivors) {
    if (pool.size() < n_survivors)
        throw InputError("nsga2_survive: pool smaller than requested survivor count");
    auto fronts = nondominated_sort(pool);
    for (const auto& front : fronts) assign_crowding(pool, front);

    std::vector<Individual> survivors;
    survivors.reserve(n_survivors);
    for (const auto& front : fronts) {
        if (survivors.size() + front.size() <= n_survivors) {
            for (std::size_t i : front) survivors.push_back(std::move(pool[i]));
        } else {
            std::vector<std::size_t> order(front);
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return pool[a].crowding > pool[b].crowding;
            });
            for (std::size_t k = 0; survivors.size() < n_survivors; ++k)
                survivors.push_back(std::move(pool[order[k]]));
            break;
        }
    }
    return survivors;
}

} // namespace sprig
