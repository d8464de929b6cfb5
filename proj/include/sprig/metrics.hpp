#pragma once

#include <algorithm>
#include <numeric>
#include <span>

#include "core.hpp"

namespace sprig {

inline double mse(std::span<const double> y, std::span<const double> pred) {
    if (y.size() != pred.size() || y.empty()) throw InputError("mse: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double e = pred[i] - y[i];
        s += e * e;
    }
    return s / static_cast<double>(y.size());
}

// R^2 = 1 - SS_res / SS_tot. A constant target scores 1 on an exact fit
// and 0 otherwise.
inline double r2(std::span<const double> y, std::span<const double> pred) {
    if (y.size() != pred.size() || y.empty()) throw InputError("r2: length mismatch");
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(y.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        ss_res += (y[i] - pred[i]) * (y[i] - pred[i]);
        ss_tot += (y[i] - mean) * (y[i] - mean);
    }
    if (ss_tot == 0.0) return ss_res == 0.0 ? 1.0 : 0.0;
    return 1.0 - ss_res / ss_tot;
}

// Average precision: step-wise sum of precision times recall increments
// over descending score thresholds, ties grouped.
inline double auprc(std::span<const double> y, std::span<const double> score) {
    if (y.size() != score.size() || y.empty()) throw InputError("auprc: length mismatch");
    std::size_t total_pos = 0;
    for (double v : y) {
        if (v != 0.0 && v != 1.0) throw InputError("auprc: labels must be 0/1");
        if (v == 1.0) ++total_pos;
    }
    if (total_pos == 0) throw InputError("auprc: no positive labels");

    std::vector<std::size_t> order(y.size());
    std::iota(order.begin(), order.end(), std::size_t{ 0 });
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });

    double ap = 0.0;
    std::size_t tp = 0, fp = 0, prev_tp = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        const double s = score[order[i]];
        while (i < order.size() && score[order[i]] == s) {
            if (y[order[i]] == 1.0) ++tp;
            else ++fp;
            ++i;
        }
        const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
        const double recall_step =
            static_cast<double>(tp - prev_tp) / static_cast<double>(total_pos);
        ap += precision * recall_step;
        prev_tp = tp;
    }
    return ap;
}

// Mean of the per-class recalls (classes present in y only).
inline double balanced_accuracy(std::span<const double> y, std::span<const double> label) {
    if (y.size() != label.size() || y.empty()) throw InputError("balanced_accuracy: length mismatch");
    std::size_t pos = 0, neg = 0, tp = 0, tn = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] == 1.0) {
            ++pos;
            if (label[i] == 1.0) ++tp;
        } else {
            ++neg;
            if (label[i] == 0.0) ++tn;
        }
    }
    double sum = 0.0;
    int classes = 0;
    if (pos > 0) { sum += static_cast<double>(tp) / static_cast<double>(pos); ++classes; }
    if (neg > 0) { sum += static_cast<double>(tn) / static_cast<double>(neg); ++classes; }
    return classes ? sum / classes : 0.0;
}

// Fraction of runs whose R^2 exceeds the threshold.
inline double accuracy_solution(std::span<const double> r2_values, double threshold = 0.999) {
    if (r2_values.empty()) return 0.0;
    std::size_t hits = 0;
    for (double v : r2_values)
        if (v > threshold) ++hits;
    return static_cast<double>(hits) / static_cast<double>(r2_values.size());
}

inline double log_loss_row(double y, double p) {
    const double eps = 1e-12;
    const double q = std::min(1.0 - eps, std::max(eps, p));
    return -(y * std::log(q) + (1.0 - y) * std::log(1.0 - q));
}

} // namespace sprig
