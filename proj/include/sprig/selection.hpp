#pragma once

#include <algorithm>
#include <numeric>

#include "individual.hpp"

namespace sprig {

namespace detail {

inline double median_inplace(std::vector<double>& v) {
    const std::size_t n = v.size();
    auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(v.begin(), mid, v.end());
    if (n % 2 == 1) return *mid;
    const double hi = *mid;
    const double lo = *std::max_element(v.begin(), mid);
    return lo + 0.5 * (hi - lo);
}

// Per-case elite threshold: pool minimum plus the median absolute
// deviation of that case's errors across the pool.
struct CaseThresholds {
    std::vector<double> threshold;
};

inline CaseThresholds lexicase_thresholds(const std::vector<Individual>& pool) {
    const std::size_t cases = pool.empty() ? 0 : pool.front().case_errors.size();
    CaseThresholds out;
    out.threshold.resize(cases);
    std::vector<double> column(pool.size());
    std::vector<double> deviation(pool.size());
    for (std::size_t c = 0; c < cases; ++c) {
        double lo = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < pool.size(); ++i) {
            column[i] = pool[i].case_errors[c];
            lo = std::min(lo, column[i]);
        }
        const double med = median_inplace(column);
        for (std::size_t i = 0; i < pool.size(); ++i)
            deviation[i] = std::abs(pool[i].case_errors[c] - med);
        const double mad = median_inplace(deviation);
        out.threshold[c] = lo + mad;
    }
    return out;
}

} // namespace detail

// Epsilon-lexicase parent selection. For each parent: shuffle the case
// order, then repeatedly keep the candidates whose error on the current
// case does not exceed the pool minimum plus the MAD-based epsilon of that
// case; a case that would eliminate every remaining candidate is skipped.
// Remaining ties break uniformly at random.
inline std::vector<std::size_t> epsilon_lexicase_select(const std::vector<Individual>& pool,
                                                        std::size_t count, Rng& rng) {
    if (pool.empty()) throw InputError("epsilon_lexicase_select: empty pool");
    const std::size_t cases = pool.front().case_errors.size();
    for (const auto& ind : pool)
        if (ind.case_errors.size() != cases)
            throw InputError("epsilon_lexicase_select: ragged case errors");

    auto thresholds = detail::lexicase_thresholds(pool);

    std::vector<std::size_t> case_order(cases);
    std::iota(case_order.begin(), case_order.end(), 0u);
    std::vector<std::size_t> candidates, kept;
    std::vector<std::size_t> parents;
    parents.reserve(count);

    for (std::size_t k = 0; k < count; ++k) {
        std::shuffle(case_order.begin(), case_order.end(), rng);
        candidates.resize(pool.size());
        std::iota(candidates.begin(), candidates.end(), 0u);
        for (std::size_t c : case_order) {
            if (candidates.size() == 1) break;
            const double thr = thresholds.threshold[c];
            kept.clear();
            for (std::size_t i : candidates)
                if (pool[i].case_errors[c] <= thr) kept.push_back(i);
            if (!kept.empty()) std::swap(candidates, kept);
        }
        if (candidates.size() == 1) {
            parents.push_back(candidates.front());
        } else {
            std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
            parents.push_back(candidates[pick(rng)]);
        }
    }
    return parents;
}

} // namespace sprig
