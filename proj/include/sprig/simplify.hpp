#pragma once

#include <unordered_map>

#include "eval.hpp"
#include "program.hpp"

namespace sprig {

namespace detail {

struct KeyHash {
    std::size_t operator()(const std::vector<long long>& key) const {
        std::size_t h = 0xcbf29ce484222325ULL;
        for (long long v : key) {
            h ^= static_cast<std::size_t>(v);
            h *= 0x100000001b3ULL;
        }
        return h;
    }
};

} // namespace detail

// Index of subtrees keyed by their quantized prediction vector on a fixed
// row sample; only the minimum-complexity candidate per key is kept.
class PredictionIndex {
public:
    PredictionIndex(Rows sample_rows, double q, ComplexityTable table = {})
        : sample_rows_(std::move(sample_rows)), q_(q), table_(std::move(table)) {
        if (q_ <= 0) throw ConfigError("quantization step must be > 0");
        if (sample_rows_.empty()) throw InputError("prediction index needs a nonempty sample");
    }

    double quantization() const { return q_; }
    const Rows& sample_rows() const { return sample_rows_; }
    const ComplexityTable& table() const { return table_; }
    std::size_t entries() const { return map_.size(); }

    // Quantized key, or nullopt when the predictions are non-finite or too
    // large to quantize.
    std::optional<std::vector<long long>> key_for(const Node& subtree, const Matrix& X) const {
        auto pred = evaluate(subtree, X, sample_rows_);
        std::vector<long long> key(pred.size());
        for (std::size_t i = 0; i < pred.size(); ++i) {
            const double scaled = pred[i] / q_;
            if (!std::isfinite(scaled) || std::abs(scaled) >= 4.5e18) return std::nullopt;
            key[i] = std::llround(scaled);
        }
        return key;
    }

    void insert(const Node& subtree, const Matrix& X) {
        if (subtree.op == Op::LogisticRoot) return;
        auto key = key_for(subtree, X);
        if (!key) return;
        const long long c = linear_complexity(subtree, table_);
        auto it = map_.find(*key);
        if (it == map_.end()) {
            map_.emplace(std::move(*key), Entry{ subtree, c });
        } else if (c < it->second.complexity) {
            it->second = Entry{ subtree, c };
        }
    }

    const Node* lookup(const std::vector<long long>& key, long long max_complexity) const {
        auto it = map_.find(key);
        if (it == map_.end()) return nullptr;
        if (it->second.complexity >= max_complexity) return nullptr;
        return &it->second.subtree;
    }

private:
    struct Entry {
        Node subtree;
        long long complexity;
    };

    Rows sample_rows_;
    double q_;
    ComplexityTable table_;
    std::unordered_map<std::vector<long long>, Entry, detail::KeyHash> map_;
};

// Evenly spaced row sample used for index keying.
inline Rows keying_sample(std::size_t d, std::size_t sample_size = 64) {
    sample_size = std::min(sample_size, d);
    Rows rows;
    rows.reserve(sample_size);
    for (std::size_t k = 0; k < sample_size; ++k)
        rows.push_back(static_cast<RowIndex>(k * d / sample_size));
    return rows;
}

// Every subtree of every population member goes into the index.
inline PredictionIndex build_index(std::span<const Program> population, const Matrix& X,
                                   double q = 1e-8, std::size_t sample_size = 64,
                                   ComplexityTable table = {}) {
    if (X.rows() == 0) throw InputError("build_index: empty sample matrix");
    PredictionIndex index(keying_sample(X.rows(), sample_size), q, std::move(table));
    for (const auto& p : population)
        detail::preorder(p.root, [&](const Node& n) { index.insert(n, X); });
    return index;
}

namespace detail {

inline double max_abs_difference(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!std::isfinite(a[i])) continue; // rows the original could not predict
        const double d = std::abs(a[i] - b[i]);
        if (!(d <= m)) m = std::isfinite(d) ? d : std::numeric_limits<double>::infinity();
    }
    return m;
}

// One bottom-up pass; returns true when anything changed.
inline bool simplify_pass(Node& n, const PredictionIndex& index, const Matrix& X,
                          const Rows& train_rows, double tol) {
    bool changed = false;
    for (auto& c : n.children)
        if (simplify_pass(c, index, X, train_rows, tol)) changed = true;

    // Pass-through splits route every row one way; keep the live branch.
    if (is_split(n.op) && n.threshold == kPassThroughThreshold) {
        Node keep = std::move(n.children[n.op == Op::SplitGreedy ? 0 : 1]);
        n = std::move(keep);
        changed = true;
    }

    // Multiplicative weights within q of 1 are dropped when the change
    // stays inside the drift tolerance on the training rows.
    if (n.weight_enabled && n.op != Op::Constant &&
        std::abs(n.weight - 1.0) <= index.quantization()) {
        auto before = evaluate(n, X, train_rows);
        Node trial = n;
        trial.weight_enabled = false;
        auto after = evaluate(trial, X, train_rows);
        if (max_abs_difference(before, after) <= tol) {
            n.weight_enabled = false;
            changed = true;
        }
    }

    // Additive constants within q of 0 drop out of an unweighted add.
    if (n.op == Op::Add && !n.weight_enabled) {
        for (int k = 0; k < 2; ++k) {
            const Node& c = n.children[k];
            const double value = c.weight_enabled ? c.weight : 1.0;
            if (c.op == Op::Constant && std::abs(value) <= index.quantization() &&
                std::abs(value) <= tol) {
                Node keep = std::move(n.children[1 - k]);
                n = std::move(keep);
                changed = true;
                break;
            }
        }
    }

    if (n.op == Op::LogisticRoot) return changed;

    if (auto key = index.key_for(n, X)) {
        const long long here = linear_complexity(n, index.table());
        if (const Node* candidate = index.lookup(*key, here)) {
            auto before = evaluate(n, X, train_rows);
            auto after = evaluate(*candidate, X, train_rows);
            if (max_abs_difference(before, after) <= tol) {
                n = *candidate;
                changed = true;
            }
        }
    }
    return changed;
}

} // namespace detail

// Replace subtrees with strictly simpler, approximately equivalent index
// candidates (key match on the sample, max-abs drift <= tol on the full
// training rows per substitution), plus deterministic local rules. Runs
// bottom-up passes to a fixpoint, so the result is idempotent under a fixed
// index; linear complexity never increases.
inline Program simplify_program(const Program& program, const PredictionIndex& index,
                                const Matrix& X_train, [[maybe_unused]] std::span<const double> y,
                                double tol) {
    if (tol < 0) throw ConfigError("simplify tolerance must be >= 0");
    Program out = program;
    const Rows train_rows = all_rows(X_train.rows());
    // Every changing pass strictly reduces (complexity, enabled-weight
    // count) lexicographically, so the loop reaches a fixpoint.
    while (detail::simplify_pass(out.root, index, X_train, train_rows, tol)) {}
    return out;
}

} // namespace sprig
