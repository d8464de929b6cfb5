#pragma once

#include <Eigen/Dense>

#include "eval.hpp"

namespace sprig {

struct LMSettings {
    int max_iterations = 10;
    double initial_damping = 1e-3;
    double damping_up = 10.0;   // multiplied in on a rejected step
    double damping_down = 0.1;  // multiplied in on an accepted step
    double max_damping = 1e12;
    double step_tolerance = 1e-12;
    double loss_tolerance = 1e-12;
};

enum class LMStatus {
    Converged,
    MaxIterations,
    NoParams,
    NonFiniteAtStart, // residuals not finite at theta0; parameters untouched
    Stalled,          // damping exhausted; best-so-far parameters kept
};

struct LMResult {
    LMStatus status = LMStatus::NoParams;
    double loss = 0.0; // 0.5 * ||H||^2 over the fitted rows
    int accepted_steps = 0;
    std::vector<double> loss_trace; // loss after each accepted step, nonincreasing
};

namespace detail {

inline double half_ssr(std::span<const double> pred, std::span<const double> y, const Rows& rows) {
    double s = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double h = pred[i] - y[rows[i]];
        s += h * h;
    }
    return 0.5 * s;
}

} // namespace detail

// Damped Gauss-Newton over the subtree's trainable parameters (enabled,
// unfrozen weights and the logistic offset). Split thresholds never enter;
// routing is piecewise constant in them. Accepted steps strictly decrease
// the loss, so the returned parameters are never worse than the input.
inline LMResult lm_fit_node(Node& root, const Matrix& X, std::span<const double> y,
                            const Rows& rows, const LMSettings& settings = {}) {
    LMResult result;
    auto refs = collect_trainable(root);
    const std::size_t p = refs.size();

    auto get = [](const TrainableRef& r) { return r.is_offset ? r.node->threshold : r.node->weight; };
    auto set = [](const TrainableRef& r, double v) {
        (r.is_offset ? r.node->threshold : r.node->weight) = v;
    };

    {
        auto pred = evaluate(root, X, rows);
        result.loss = detail::half_ssr(pred, y, rows);
        if (p == 0) {
            result.status = LMStatus::NoParams;
            return result;
        }
        if (!std::isfinite(result.loss)) {
            result.status = LMStatus::NonFiniteAtStart;
            result.loss = kWorstLoss;
            return result;
        }
    }

    const std::size_t m = rows.size();
    auto slots = detail::index_trainable(root);
    Eigen::VectorXd theta(p);
    for (std::size_t j = 0; j < p; ++j) theta[j] = get(refs[j]);

    double lambda = settings.initial_damping;
    double loss = result.loss;
    result.status = LMStatus::MaxIterations;

    detail::GradBlock block;
    Eigen::VectorXd residual(m);

    for (int iter = 0; iter < settings.max_iterations; ++iter) {
        detail::grad_rec(root, X, rows, slots, block);
        for (std::size_t i = 0; i < m; ++i) residual[i] = block.val[i] - y[rows[i]];

        Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
            jacobian(block.grad.data(), static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(p));
        if (!jacobian.allFinite()) {
            result.status = LMStatus::Stalled;
            break;
        }
        Eigen::MatrixXd normal = jacobian.transpose() * jacobian;
        Eigen::VectorXd gradient = jacobian.transpose() * residual;
        Eigen::VectorXd damping_scale = normal.diagonal().cwiseMax(1e-12);

        bool accepted = false;
        bool solver_ok = false;
        while (true) {
            Eigen::MatrixXd damped = normal;
            damped.diagonal() += lambda * damping_scale;
            Eigen::VectorXd step = damped.ldlt().solve(-gradient);
            if (step.allFinite()) {
                solver_ok = true;
                Eigen::VectorXd trial = theta + step;
                for (std::size_t j = 0; j < p; ++j) set(refs[j], trial[j]);
                auto pred = evaluate(root, X, rows);
                const double trial_loss = detail::half_ssr(pred, y, rows);
                if (std::isfinite(trial_loss) && trial_loss < loss) {
                    theta = trial;
                    const double decrease = loss - trial_loss;
                    loss = trial_loss;
                    lambda = std::max(lambda * settings.damping_down, 1e-15);
                    ++result.accepted_steps;
                    result.loss_trace.push_back(loss);
                    accepted = true;
                    if (step.norm() <= settings.step_tolerance * (theta.norm() + settings.step_tolerance) ||
                        decrease <= settings.loss_tolerance * std::max(loss, 1.0)) {
                        result.status = LMStatus::Converged;
                    }
                    break;
                }
            }
            lambda *= settings.damping_up;
            if (lambda > settings.max_damping) break;
        }
        if (!accepted) {
            // No improving step at any damping level. If the solver never
            // produced a usable step the system is singular: soft failure,
            // best-so-far parameters kept. Otherwise this is convergence.
            result.status = solver_ok ? LMStatus::Converged : LMStatus::Stalled;
            break;
        }
        if (result.status == LMStatus::Converged) break;
    }

    for (std::size_t j = 0; j < p; ++j) set(refs[j], theta[j]);
    result.loss = loss;
    return result;
}

inline LMResult lm_fit(Program& program, const Matrix& X, std::span<const double> y,
                       const LMSettings& settings = {}) {
    if (y.size() != X.rows()) throw InputError("lm_fit: target length mismatch");
    return lm_fit_node(program.root, X, y, all_rows(X.rows()), settings);
}

} // namespace sprig
