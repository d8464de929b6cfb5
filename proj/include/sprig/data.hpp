#pragma once

#include <charconv>
#include <fstream>
#include <optional>

#include "core.hpp"
#include "program.hpp"

namespace sprig {

struct Dataset {
    Matrix X;
    std::vector<double> y;
    std::vector<std::string> feature_names;
    std::string target_name;
    Task task = Task::Regression;
    std::size_t dropped_rows = 0;   // rows removed for missing/non-numeric cells
    std::size_t skipped_columns = 0; // non-numeric columns excluded from features

    std::size_t rows() const { return X.rows(); }
    std::size_t cols() const { return X.cols(); }

    double prevalence() const {
        if (y.empty()) return 0.0;
        double s = 0.0;
        for (double v : y) s += v;
        return s / static_cast<double>(y.size());
    }
};

namespace detail {

// RFC-4180 field splitting: quoted fields may contain commas, doubled
// quotes, and newlines.
inline std::vector<std::vector<std::string>> parse_csv(std::istream& in) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool any = false;
    char ch;
    while (in.get(ch)) {
        any = true;
        if (quoted) {
            if (ch == '"') {
                if (in.peek() == '"') {
                    field.push_back('"');
                    in.get();
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(ch);
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            row.push_back(std::move(field));
            field.clear();
        } else if (ch == '\n') {
            row.push_back(std::move(field));
            field.clear();
            rows.push_back(std::move(row));
            row.clear();
        } else if (ch != '\r') {
            field.push_back(ch);
        }
    }
    if (any && (!field.empty() || !row.empty())) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::optional<double> parse_double(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

} // namespace detail

// Load a headered CSV, keeping the numeric columns. Rows with a missing or
// non-numeric cell in a kept column are dropped and counted.
inline Dataset load_csv(const std::string& path, const std::string& target, Task task) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    auto cells = detail::parse_csv(in);
    if (cells.empty()) throw InputError(path + ": empty file");
    const auto& header = cells.front();
    if (header.empty()) throw InputError(path + ": empty header row");

    std::size_t target_col = header.size();
    for (std::size_t c = 0; c < header.size(); ++c)
        if (header[c] == target) target_col = c;
    if (target_col == header.size())
        throw InputError(path + ": target column '" + target + "' not found");

    const std::size_t n_cols = header.size();
    const std::size_t n_raw = cells.size() - 1;
    if (n_raw == 0) throw InputError(path + ": no data rows");

    // A column is numeric when every non-missing cell parses.
    std::vector<bool> numeric(n_cols, true);
    for (std::size_t r = 1; r < cells.size(); ++r) {
        const auto& row = cells[r];
        for (std::size_t c = 0; c < n_cols; ++c) {
            if (c >= row.size() || row[c].empty()) continue;
            if (!detail::parse_double(row[c])) numeric[c] = false;
        }
    }
    if (!numeric[target_col]) throw InputError(path + ": target column '" + target + "' is not numeric");

    std::vector<std::size_t> feature_cols;
    Dataset data;
    for (std::size_t c = 0; c < n_cols; ++c) {
        if (c == target_col) continue;
        if (!numeric[c]) {
            ++data.skipped_columns;
            continue;
        }
        feature_cols.push_back(c);
        data.feature_names.push_back(header[c]);
    }
    data.target_name = header[target_col];
    data.task = task;

    std::vector<std::vector<double>> kept;
    std::vector<double> y;
    for (std::size_t r = 1; r < cells.size(); ++r) {
        const auto& row = cells[r];
        if (row.size() == 1 && row[0].empty()) continue; // blank line
        std::vector<double> vals(feature_cols.size());
        bool ok = row.size() >= n_cols;
        double target_val = 0.0;
        if (ok) {
            auto tv = detail::parse_double(row[target_col]);
            ok = tv.has_value() && std::isfinite(*tv);
            if (ok) target_val = *tv;
        }
        for (std::size_t k = 0; ok && k < feature_cols.size(); ++k) {
            auto v = detail::parse_double(row[feature_cols[k]]);
            if (!v || !std::isfinite(*v)) ok = false;
            else vals[k] = *v;
        }
        if (!ok) {
            ++data.dropped_rows;
            continue;
        }
        kept.push_back(std::move(vals));
        y.push_back(target_val);
    }

    if (kept.size() < 2) throw InputError(path + ": fewer than 2 usable rows");
    data.X = Matrix(kept.size(), feature_cols.size());
    for (std::size_t r = 0; r < kept.size(); ++r)
        for (std::size_t c = 0; c < feature_cols.size(); ++c) data.X(r, c) = kept[r][c];
    data.y = std::move(y);

    if (task == Task::Classification) {
        for (double v : data.y)
            if (v != 0.0 && v != 1.0)
                throw InputError(path + ": classification target must be 0/1");
    }
    return data;
}

// ---------------------------------------------------------------------------
// Splitting
// ---------------------------------------------------------------------------

struct SplitSpec {
    double train_fraction = 0.75;
    bool stratified = false;
    std::uint64_t seed = 0;
};

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

// Deterministic given the seed; index sets come back sorted. Stratified
// splits keep the overall train count exact and the class proportion within
// one sample per class (floor allocation per class, remaining train slots to
// the largest fractional parts, class 0 first on ties).
inline SplitIndices split_indices(std::span<const double> y, const SplitSpec& spec) {
    if (spec.train_fraction <= 0.0 || spec.train_fraction >= 1.0)
        throw ConfigError("train fraction must be in (0, 1)");
    const std::size_t d = y.size();
    Rng rng(spec.seed);
    SplitIndices out;

    auto take = [&](std::vector<std::size_t>& members, std::size_t n_train) {
        std::shuffle(members.begin(), members.end(), rng);
        for (std::size_t i = 0; i < members.size(); ++i)
            (i < n_train ? out.train : out.test).push_back(members[i]);
    };

    if (spec.stratified) {
        std::vector<std::size_t> neg, pos;
        for (std::size_t i = 0; i < d; ++i) (y[i] > 0.5 ? pos : neg).push_back(i);
        if (neg.size() < 2 || pos.size() < 2)
            throw InputError("stratified split needs at least 2 members per class");
        const std::size_t total_train =
            static_cast<std::size_t>(std::llround(spec.train_fraction * static_cast<double>(d)));
        const double exact_neg = spec.train_fraction * static_cast<double>(neg.size());
        std::size_t n_neg = static_cast<std::size_t>(std::floor(exact_neg));
        std::size_t n_pos = static_cast<std::size_t>(
            std::floor(spec.train_fraction * static_cast<double>(pos.size())));
        while (n_neg + n_pos < total_train) {
            const double frac_neg = exact_neg - std::floor(exact_neg);
            const double frac_pos = spec.train_fraction * static_cast<double>(pos.size()) -
                                    std::floor(spec.train_fraction * static_cast<double>(pos.size()));
            if (frac_neg >= frac_pos && n_neg < neg.size()) ++n_neg;
            else if (n_pos < pos.size()) ++n_pos;
            else ++n_neg;
        }
        take(neg, n_neg);
        take(pos, n_pos);
    } else {
        std::vector<std::size_t> all(d);
        std::iota(all.begin(), all.end(), std::size_t{ 0 });
        take(all, static_cast<std::size_t>(
                      std::llround(spec.train_fraction * static_cast<double>(d))));
    }
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

inline Dataset subset(const Dataset& data, std::span<const std::size_t> rows) {
    Dataset out;
    out.feature_names = data.feature_names;
    out.target_name = data.target_name;
    out.task = data.task;
    out.X = Matrix(rows.size(), data.X.cols());
    out.y.resize(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t c = 0; c < data.X.cols(); ++c) out.X(i, c) = data.X(rows[i], c);
        out.y[i] = data.y[rows[i]];
    }
    return out;
}

inline std::pair<Dataset, Dataset> split(const Dataset& data, const SplitSpec& spec) {
    auto idx = split_indices(data.y, spec);
    return { subset(data, idx.train), subset(data, idx.test) };
}

// k-fold partition (stratified when asked); fold k's test set is the k-th
// chunk of the shuffled index list.
inline std::vector<SplitIndices> kfold_indices(std::span<const double> y, std::size_t folds,
                                               bool stratified, std::uint64_t seed) {
    if (folds < 2) throw ConfigError("kfold: need at least 2 folds");
    const std::size_t d = y.size();
    Rng rng(seed);
    std::vector<std::vector<std::size_t>> assignment(folds);

    auto deal = [&](std::vector<std::size_t>& members) {
        std::shuffle(members.begin(), members.end(), rng);
        for (std::size_t i = 0; i < members.size(); ++i)
            assignment[i % folds].push_back(members[i]);
    };

    if (stratified) {
        std::vector<std::size_t> neg, pos;
        for (std::size_t i = 0; i < d; ++i) (y[i] > 0.5 ? pos : neg).push_back(i);
        if (neg.size() < folds || pos.size() < folds)
            throw InputError("stratified kfold needs >= folds members per class");
        deal(neg);
        deal(pos);
    } else {
        std::vector<std::size_t> all(d);
        std::iota(all.begin(), all.end(), std::size_t{ 0 });
        deal(all);
    }

    std::vector<SplitIndices> out(folds);
    for (std::size_t f = 0; f < folds; ++f) {
        out[f].test = assignment[f];
        for (std::size_t g = 0; g < folds; ++g)
            if (g != f)
                out[f].train.insert(out[f].train.end(), assignment[g].begin(), assignment[g].end());
        std::sort(out[f].train.begin(), out[f].train.end());
        std::sort(out[f].test.begin(), out[f].test.end());
    }
    return out;
}

// Additive Gaussian target noise with standard deviation gamma * RMS(y).
// gamma = 0 returns the input unchanged (and draws nothing from the rng).
inline std::vector<double> add_target_noise(std::span<const double> y, double gamma, Rng& rng) {
    if (gamma < 0) throw ConfigError("noise level must be >= 0");
    std::vector<double> out(y.begin(), y.end());
    if (gamma == 0.0) return out;
    const double sigma = gamma * rms(y);
    std::normal_distribution<double> noise(0.0, sigma);
    for (auto& v : out) v += noise(rng);
    return out;
}

} // namespace sprig
