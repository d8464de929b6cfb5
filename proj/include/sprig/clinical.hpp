#pragma once

#include <charconv>
#include <fstream>

#include "data.hpp"

namespace sprig {

enum class ScoreSystem { MAP, CART, MEWS };

inline std::string_view score_system_name(ScoreSystem s) {
    switch (s) {
    case ScoreSystem::MAP: return "map";
    case ScoreSystem::CART: return "cart";
    case ScoreSystem::MEWS: return "mews";
    }
    return "?";
}

inline ScoreSystem score_system_from_name(std::string_view s) {
    if (s == "map") return ScoreSystem::MAP;
    if (s == "cart") return ScoreSystem::CART;
    if (s == "mews") return ScoreSystem::MEWS;
    throw ParseError("unknown scoring system: " + std::string(s));
}

// Mean arterial pressure from systolic and diastolic blood pressure.
inline double map_score(double sbp, double dbp) { return (sbp + 2.0 * dbp) / 3.0; }

// Cardiac-arrest risk triage score, 0..57. Bands are half-open [low, high);
// printed inclusive bounds stay inclusive, and each component is evaluated
// most severe band first.
inline int cart_score(double resp_rate, double heart_rate, double dbp, double age) {
    int score = 0;
    if (resp_rate >= 29) score += 22;
    else if (resp_rate >= 26) score += 15;
    else if (resp_rate >= 24) score += 12;
    else if (resp_rate >= 21) score += 8;

    if (heart_rate >= 140) score += 13;
    else if (heart_rate >= 110) score += 4;

    if (dbp <= 35) score += 13;
    else if (dbp < 40) score += 6;
    else if (dbp < 50) score += 4;

    if (age >= 70) score += 9;
    else if (age >= 55) score += 4;
    return score;
}

// Simplified early-warning score without the responsiveness component,
// 0..11 over SBP, heart rate, respiratory rate and temperature.
inline int mews_score(double sbp, double heart_rate, double resp_rate, double temperature) {
    int score = 0;
    if (sbp < 71) score += 3;
    else if (sbp < 81) score += 2;
    else if (sbp < 101) score += 1;
    else if (sbp >= 200) score += 2;

    if (heart_rate < 41) score += 2;
    else if (heart_rate < 51) score += 1;
    else if (heart_rate < 101) score += 0;
    else if (heart_rate < 111) score += 1;
    else if (heart_rate < 130) score += 2;
    else score += 3;

    if (resp_rate < 9) score += 2;
    else if (resp_rate < 15) score += 0;
    else if (resp_rate < 21) score += 1;
    else if (resp_rate < 30) score += 2;
    else score += 3;

    if (temperature < 35) score += 2;
    else if (temperature < 38.5) score += 0;
    else score += 2;
    return score;
}

// High-risk flag at the interpretive thresholds: CART >= 12, MEWS >= 3.
inline int deterioration_label(int score, ScoreSystem system) {
    switch (system) {
    case ScoreSystem::CART: return score >= 12 ? 1 : 0;
    case ScoreSystem::MEWS: return score >= 3 ? 1 : 0;
    case ScoreSystem::MAP: break;
    }
    throw ConfigError("deterioration_label: no threshold for this system");
}

struct Vitals {
    double sbp, dbp, heart_rate, resp_rate, temperature, age;
};

// Plausible triage ranges enforced at generation time.
inline Vitals sample_vitals(Rng& rng) {
    auto uni = [&](double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    };
    Vitals v;
    v.sbp = uni(60.0, 220.0);
    v.dbp = uni(30.0, std::min(130.0, v.sbp - 5.0));
    v.heart_rate = uni(30.0, 180.0);
    v.resp_rate = uni(6.0, 40.0);
    v.temperature = uni(33.0, 41.0);
    v.age = uni(18.0, 100.0);
    return v;
}

inline double score_vitals(const Vitals& v, ScoreSystem system) {
    switch (system) {
    case ScoreSystem::MAP: return map_score(v.sbp, v.dbp);
    case ScoreSystem::CART: return cart_score(v.resp_rate, v.heart_rate, v.dbp, v.age);
    case ScoreSystem::MEWS: return mews_score(v.sbp, v.heart_rate, v.resp_rate, v.temperature);
    }
    return 0.0;
}

struct ClinicalGenOptions {
    std::size_t n = 10000;
    std::size_t distractors = 10;
    double prevalence = 0.09; // CART/MEWS label rate; ignored for MAP
    std::uint64_t seed = 0;
};

inline const std::vector<std::string>& vital_column_names() {
    static const std::vector<std::string> names = {
        "sbp", "dbp", "heart_rate", "resp_rate", "temperature", "age"
    };
    return names;
}

// Synthetic triage table: vitals, uniform-noise distractor features, the
// requested score and (CART/MEWS) the deterioration label. Rejection
// sampling pins the label prevalence to round(n * prevalence) exactly.
// Deterministic given the seed.
struct ClinicalFrame {
    std::vector<std::string> columns; // vitals, distractors, score, label?
    std::vector<std::vector<double>> rows;
    ScoreSystem system;
    bool has_label = false;
};

inline ClinicalFrame generate_clinical_frame(ScoreSystem system, const ClinicalGenOptions& opt) {
    if (opt.n < 100) throw ConfigError("clinical generator: need n >= 100");
    const bool labeled = system != ScoreSystem::MAP;
    if (labeled && (opt.prevalence <= 0.0 || opt.prevalence >= 0.5))
        throw ConfigError("clinical generator: prevalence must be in (0, 0.5)");

    ClinicalFrame frame;
    frame.system = system;
    frame.has_label = labeled;
    frame.columns = vital_column_names();
    for (std::size_t k = 0; k < opt.distractors; ++k)
        frame.columns.push_back("noise_" + std::to_string(k));
    frame.columns.push_back("score");
    if (labeled) frame.columns.push_back("label");

    Rng rng(splitmix64(opt.seed ^ 0x636c696eULL));
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::size_t pos_quota = labeled
        ? static_cast<std::size_t>(std::llround(opt.prevalence * static_cast<double>(opt.n)))
        : 0;
    std::size_t neg_quota = opt.n - pos_quota;

    const std::size_t budget = 1000 * opt.n;
    std::size_t draws = 0;
    while (frame.rows.size() < opt.n) {
        if (++draws > budget)
            throw InputError("clinical generator: prevalence unreachable within sampling budget");
        Vitals v = sample_vitals(rng);
        std::vector<double> row = { v.sbp, v.dbp, v.heart_rate, v.resp_rate, v.temperature, v.age };
        for (std::size_t k = 0; k < opt.distractors; ++k) row.push_back(unit(rng));
        const double score = score_vitals(v, system);
        row.push_back(score);
        if (labeled) {
            const int label = deterioration_label(static_cast<int>(score), system);
            if (label == 1) {
                if (pos_quota == 0) continue;
                --pos_quota;
            } else {
                if (neg_quota == 0) continue;
                --neg_quota;
            }
            row.push_back(label);
        }
        frame.rows.push_back(std::move(row));
    }
    return frame;
}

// Shortest round-trip formatting so rewriting the same frame is
// byte-identical and reloading loses nothing.
inline std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

inline void write_csv(const ClinicalFrame& frame, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path);
    for (std::size_t c = 0; c < frame.columns.size(); ++c) {
        if (c) out << ',';
        out << frame.columns[c];
    }
    out << '\n';
    for (const auto& row : frame.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out << ',';
            out << format_double(row[c]);
        }
        out << '\n';
    }
}

// Feature matrix = vitals + distractors; target = score (regression) or
// label (classification).
inline Dataset frame_to_dataset(const ClinicalFrame& frame, Task task) {
    if (task == Task::Classification && !frame.has_label)
        throw ConfigError("this scoring system has no deterioration label");
    const std::size_t n_features = frame.columns.size() - (frame.has_label ? 2 : 1);
    Dataset data;
    data.task = task;
    data.feature_names.assign(frame.columns.begin(),
                              frame.columns.begin() + static_cast<std::ptrdiff_t>(n_features));
    data.target_name = task == Task::Classification ? "label" : "score";
    data.X = Matrix(frame.rows.size(), n_features);
    data.y.resize(frame.rows.size());
    const std::size_t target_col = task == Task::Classification ? n_features + 1 : n_features;
    for (std::size_t r = 0; r < frame.rows.size(); ++r) {
        for (std::size_t c = 0; c < n_features; ++c) data.X(r, c) = frame.rows[r][c];
        data.y[r] = frame.rows[r][target_col];
    }
    return data;
}

inline Dataset generate_clinical_dataset(ScoreSystem system, const ClinicalGenOptions& opt,
                                         Task task) {
    return frame_to_dataset(generate_clinical_frame(system, opt), task);
}

} // namespace sprig
