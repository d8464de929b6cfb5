#pragma once

#include <array>
#include <cstdint>

#include "fit.hpp"
#include "program.hpp"

namespace sprig {

enum class MutationKind : int {
    ToggleWeightOn = 0,
    ToggleWeightOff,
    Point,
    Subtree,
    Delete,
    Insert,
};
inline constexpr int kMutationKinds = 6;

inline std::string_view mutation_name(MutationKind k) {
    switch (k) {
    case MutationKind::ToggleWeightOn: return "toggle_weight_on";
    case MutationKind::ToggleWeightOff: return "toggle_weight_off";
    case MutationKind::Point: return "point";
    case MutationKind::Subtree: return "subtree";
    case MutationKind::Delete: return "delete";
    case MutationKind::Insert: return "insert";
    }
    return "?";
}

struct SearchConfig {
    std::size_t pop_size = 500;
    std::size_t max_gens = 100;
    std::size_t max_depth = 12;
    std::size_t max_size = 100;
    std::vector<Op> functions = { Op::Add, Op::Sub, Op::Mul, Op::Div, Op::Ceil, Op::Floor,
                                  Op::Pow, Op::Log, Op::Min, Op::Max,
                                  Op::SplitGreedy, Op::SplitFlexible };
    std::array<double, kMutationKinds> mutation_weights = { 1, 1, 1, 1, 1, 1 };
    double crossover_probability = 0.5;
    bool split_seeded_init = false;
    double constant_probability = 0.25; // terminal draw: constant vs feature
    std::uint64_t seed = 0;
    Task task = Task::Regression;
    double validation_fraction = 0.25;
    std::size_t workers = 1;
    LMSettings lm;
    SplitObjective split_objective = SplitObjective::VariancePerCount;
    ComplexityTable complexity;

    FitOptions fit_options() const { return { lm, split_objective }; }

    void check() const {
        if (pop_size < 2 || pop_size % 2 != 0)
            throw ConfigError("pop_size must be even and >= 2");
        if (max_gens < 1) throw ConfigError("max_gens must be >= 1");
        if (max_depth < 1 || max_size < 1)
            throw ConfigError("max_depth and max_size must be >= 1");
        double wsum = 0.0;
        for (double w : mutation_weights) {
            if (w < 0) throw ConfigError("mutation weights must be nonnegative");
            wsum += w;
        }
        if (wsum <= 0) throw ConfigError("mutation weights must sum to > 0");
        if (crossover_probability < 0 || crossover_probability > 1)
            throw ConfigError("crossover probability must be in [0, 1]");
        if (validation_fraction <= 0 || validation_fraction >= 1)
            throw ConfigError("validation fraction must be in (0, 1)");
        if (functions.empty()) throw ConfigError("function set is empty");
        for (Op op : functions)
            if (is_terminal(op) || op == Op::LogisticRoot)
                throw ConfigError("function set may contain operators only");
    }

    bool splits_enabled() const {
        for (Op op : functions)
            if (is_split(op)) return true;
        return false;
    }

    // Drop split operators from the function set (ablation runs).
    void disable_splits() {
        std::erase_if(functions, [](Op op) { return is_split(op); });
        split_seeded_init = false;
    }
};

// Profile used for the clinical scoring experiments.
inline SearchConfig clinical_profile() {
    SearchConfig c;
    c.pop_size = 500;
    c.max_gens = 100;
    c.max_depth = 12;
    c.max_size = 100;
    c.split_seeded_init = true;
    c.lm.max_iterations = 10;
    return c;
}

// Profile used for the regression benchmark suites.
inline SearchConfig srbench_profile() {
    SearchConfig c;
    c.pop_size = 1000;
    c.max_gens = 100;
    c.max_depth = 10;
    c.max_size = 128;
    c.functions = { Op::Add, Op::Sub, Op::Mul, Op::Div, Op::Sin, Op::Cos, Op::Tanh,
                    Op::Exp, Op::Log, Op::Sqrt, Op::Pow,
                    Op::SplitGreedy, Op::SplitFlexible };
    c.split_seeded_init = false;
    c.lm.max_iterations = 10;
    return c;
}

} // namespace sprig
