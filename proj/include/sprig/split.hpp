#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <span>

#include "core.hpp"
#include "eval.hpp"

namespace sprig {

struct SplitChoice {
    double tau = 0.0;
    double objective = 0.0;
};

// Per-side contribution to the scan objective. VariancePerCount is Var/|side|
// (the default); WeightedImpurity is the classical (|side|/d)*Var convention.
enum class SplitObjective { VariancePerCount, WeightedImpurity };

struct GreedySplitChoice {
    int feature = 0;
    double tau = 0.0;
    double objective = 0.0;
};

// One-dimensional clustering of y by thresholding the condition values:
// choose tau minimizing Var(l)/|l| + Var(r)/|r| with l = {y_i : c_i <= tau},
// r = {y_i : c_i > tau}, tau strictly inside (min c, max c). Candidates are
// midpoints between consecutive distinct sorted condition values; ties on
// the objective keep the smallest tau. Returns nullopt when fewer than two
// distinct condition values exist (infeasible split).
//
// Arithmetic is canonical so an exhaustive rescan reproduces it bit for bit:
// rows are stable-sorted by condition value; left sums accumulate ascending
// over the sorted order, right sums descending; population variance is
// computed as s2/cnt - mean*mean with mean = s/cnt, and each side
// contributes var/cnt.
inline std::optional<SplitChoice> find_split_threshold(std::span<const double> cond,
                                                       std::span<const double> y,
                                                       SplitObjective mode = SplitObjective::VariancePerCount) {
    const std::size_t d = cond.size();
    if (d != y.size()) throw InputError("find_split_threshold: length mismatch");
    if (d < 2) return std::nullopt;
    for (double c : cond)
        if (!std::isfinite(c)) throw InputError("find_split_threshold: non-finite condition value");

    std::vector<std::uint32_t> order(d);
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return cond[a] < cond[b]; });

    std::vector<double> c_sorted(d), y_sorted(d);
    for (std::size_t i = 0; i < d; ++i) {
        c_sorted[i] = cond[order[i]];
        y_sorted[i] = y[order[i]];
    }
    if (c_sorted.front() == c_sorted.back()) return std::nullopt;

    std::vector<double> pre_s(d), pre_s2(d), suf_s(d), suf_s2(d);
    pre_s[0] = y_sorted[0];
    pre_s2[0] = y_sorted[0] * y_sorted[0];
    for (std::size_t i = 1; i < d; ++i) {
        pre_s[i] = pre_s[i - 1] + y_sorted[i];
        pre_s2[i] = pre_s2[i - 1] + y_sorted[i] * y_sorted[i];
    }
    suf_s[d - 1] = y_sorted[d - 1];
    suf_s2[d - 1] = y_sorted[d - 1] * y_sorted[d - 1];
    for (std::size_t i = d - 1; i-- > 0;) {
        suf_s[i] = suf_s[i + 1] + y_sorted[i];
        suf_s2[i] = suf_s2[i + 1] + y_sorted[i] * y_sorted[i];
    }

    auto side_term = [&](double s, double s2, std::size_t cnt) {
        const double mean = s / static_cast<double>(cnt);
        const double var = s2 / static_cast<double>(cnt) - mean * mean;
        if (mode == SplitObjective::WeightedImpurity)
            return var * (static_cast<double>(cnt) / static_cast<double>(d));
        return var / static_cast<double>(cnt);
    };

    std::optional<SplitChoice> best;
    for (std::size_t k = 0; k + 1 < d; ++k) {
        if (c_sorted[k] == c_sorted[k + 1]) continue;
        const double tau = 0.5 * (c_sorted[k] + c_sorted[k + 1]);
        // No representable threshold strictly between two adjacent values.
        if (!(c_sorted[k] < tau && tau < c_sorted[k + 1])) continue;
        const double obj = side_term(pre_s[k], pre_s2[k], k + 1) +
                           side_term(suf_s[k + 1], suf_s2[k + 1], d - k - 1);
        if (!best || obj < best->objective) best = SplitChoice{ tau, obj };
    }
    return best;
}

// Exhaustive scan over feature columns; best objective wins, ties broken by
// lowest feature index, then smallest tau (within-column tie-break handled
// by find_split_threshold). Returns nullopt when every column is constant
// over the given rows.
inline std::optional<GreedySplitChoice> find_greedy_split(const Matrix& X,
                                                          std::span<const double> y,
                                                          const Rows& rows,
                                                          SplitObjective mode = SplitObjective::VariancePerCount) {
    if (rows.size() < 2) return std::nullopt;
    std::vector<double> c(rows.size()), yr(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) yr[i] = y[rows[i]];

    std::optional<GreedySplitChoice> best;
    for (std::size_t f = 0; f < X.cols(); ++f) {
        auto col = X.column(f);
        for (std::size_t i = 0; i < rows.size(); ++i) c[i] = col[rows[i]];
        auto choice = find_split_threshold(c, yr, mode);
        if (!choice) continue;
        if (!best || choice->objective < best->objective)
            best = GreedySplitChoice{ static_cast<int>(f), choice->tau, choice->objective };
    }
    return best;
}

inline std::optional<GreedySplitChoice> find_greedy_split(const Matrix& X,
                                                          std::span<const double> y,
                                                          SplitObjective mode = SplitObjective::VariancePerCount) {
    return find_greedy_split(X, y, all_rows(X.rows()), mode);
}

} // namespace sprig
