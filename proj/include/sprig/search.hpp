#pragma once

#include "data.hpp"
#include "generate.hpp"
#include "metrics.hpp"
#include "selection.hpp"
#include "survival.hpp"
#include "threading.hpp"
#include "variation.hpp"

namespace sprig {

struct GenerationStats {
    std::size_t generation = 0;
    double best_loss = 0.0;
    double median_loss = 0.0;
    std::size_t front_size = 0;
};

struct SearchResult {
    Program best;
    std::vector<Individual> archive; // rank-0 individuals of the final population
    std::vector<GenerationStats> history;
};

namespace detail {

// Loss, validation loss and per-row lexicase errors from one evaluation of
// the program over the whole training matrix. Any non-finite prediction on
// a used row flags the individual worst.
inline void score_individual(Individual& ind, const Matrix& X, std::span<const double> y,
                             const Rows& fit_rows, const Rows& val_rows,
                             const SearchConfig& config) {
    ind.complexity = ind.program.complexity(config.complexity);
    auto pred = evaluate(ind.program.root, X, all_rows(X.rows()));

    bool finite = true;
    for (auto r : fit_rows)
        if (!std::isfinite(pred[r])) { finite = false; break; }
    if (finite)
        for (auto r : val_rows)
            if (!std::isfinite(pred[r])) { finite = false; break; }
    if (!finite) {
        ind.loss = kWorstLoss;
        ind.validation_loss = kWorstLoss;
        ind.case_errors.assign(fit_rows.size(), kWorstLoss);
        return;
    }

    const bool cls = config.task == Task::Classification;
    ind.case_errors.resize(fit_rows.size());
    double total = 0.0;
    for (std::size_t i = 0; i < fit_rows.size(); ++i) {
        const auto r = fit_rows[i];
        const double e = cls ? log_loss_row(y[r], pred[r])
                             : (pred[r] - y[r]) * (pred[r] - y[r]);
        ind.case_errors[i] = e;
        total += e;
    }
    ind.loss = total / static_cast<double>(fit_rows.size());

    double vtotal = 0.0;
    for (auto r : val_rows)
        vtotal += cls ? log_loss_row(y[r], pred[r]) : (pred[r] - y[r]) * (pred[r] - y[r]);
    ind.validation_loss =
        val_rows.empty() ? ind.loss : vtotal / static_cast<double>(val_rows.size());
}

inline GenerationStats population_stats(std::size_t gen, const std::vector<Individual>& pop) {
    GenerationStats s;
    s.generation = gen;
    std::vector<double> losses;
    losses.reserve(pop.size());
    for (const auto& ind : pop) losses.push_back(ind.loss);
    std::sort(losses.begin(), losses.end());
    s.best_loss = losses.front();
    s.median_loss = losses[losses.size() / 2];
    for (const auto& ind : pop)
        if (ind.rank == 0) ++s.front_size;
    return s;
}

} // namespace detail

// The generational loop: seeded initialization, epsilon-lexicase selection,
// variation, split-aware fitting of the offspring, NSGA-II survival. The
// returned model is the rank-0 individual with the lowest loss on an
// internal validation holdout, ties broken by lower complexity. Fitting and
// scoring use per-individual work items and per-individual rng streams
// derived from the master seed, so results do not depend on the worker
// count.
inline SearchResult run(SearchConfig config, const Dataset& data,
                        std::function<void(const GenerationStats&)> on_generation = {}) {
    config.task = data.task;
    config.check();
    if (data.rows() < 4) throw InputError("run: need at least 4 rows");

    const std::size_t n_features = data.cols();
    const auto fit_opt = config.fit_options();

    // Internal holdout for final-model selection.
    SplitSpec holdout;
    holdout.train_fraction = 1.0 - config.validation_fraction;
    holdout.stratified = config.task == Task::Classification;
    holdout.seed = splitmix64(config.seed ^ 0x76616c69646174ULL);
    auto idx = split_indices(data.y, holdout);
    Rows fit_rows(idx.train.begin(), idx.train.end());
    Rows val_rows(idx.test.begin(), idx.test.end());

    const Matrix& X = data.X;
    std::span<const double> y(data.y);

    auto fit_and_score = [&](Individual& ind) {
        fit_program_rows(ind.program, X, y, fit_rows, fit_opt);
        detail::score_individual(ind, X, y, fit_rows, val_rows, config);
    };

    std::vector<Individual> pop(config.pop_size);
    parallel_for(config.pop_size, config.workers, [&](std::size_t i) {
        Rng rng = derive_rng(config.seed, 1, i);
        pop[i].program = generate_random(config, rng, n_features);
        pop[i].program.feature_names = data.feature_names;
        fit_and_score(pop[i]);
    });

    SearchResult result;
    {
        auto fronts = nondominated_sort(pop);
        (void)fronts;
        auto stats = detail::population_stats(0, pop);
        if (on_generation) on_generation(stats);
        result.history.push_back(stats);
    }

    Rng select_rng = derive_rng(config.seed, 2, 0);
    for (std::size_t gen = 1; gen <= config.max_gens; ++gen) {
        auto parents = epsilon_lexicase_select(pop, config.pop_size, select_rng);

        std::vector<Individual> offspring(config.pop_size);
        parallel_for(config.pop_size, config.workers, [&](std::size_t i) {
            Rng rng = derive_rng(config.seed, 1000 + gen, i);
            std::uniform_int_distribution<std::size_t> pick(0, parents.size() - 1);
            const Program& primary = pop[parents[i]].program;
            const Program& secondary = pop[parents[pick(rng)]].program;
            offspring[i].program = vary(primary, secondary, config, n_features, rng);
            fit_and_score(offspring[i]);
        });

        std::vector<Individual> pool;
        pool.reserve(2 * config.pop_size);
        for (auto& ind : pop) pool.push_back(std::move(ind));
        for (auto& ind : offspring) pool.push_back(std::move(ind));
        pop = nsga2_survive(std::move(pool), config.pop_size);

        auto stats = detail::population_stats(gen, pop);
        if (on_generation) on_generation(stats);
        result.history.push_back(stats);
    }

    for (auto& ind : pop)
        if (ind.rank == 0) result.archive.push_back(ind);
    std::stable_sort(result.archive.begin(), result.archive.end(),
                     [](const Individual& a, const Individual& b) {
                         if (a.loss != b.loss) return a.loss < b.loss;
                         return a.complexity < b.complexity;
                     });

    const Individual* best = nullptr;
    for (const auto& ind : result.archive) {
        if (!best || ind.validation_loss < best->validation_loss ||
            (ind.validation_loss == best->validation_loss && ind.complexity < best->complexity))
            best = &ind;
    }
    result.best = best->program;
    return result;
}

} // namespace sprig
