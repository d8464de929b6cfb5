#pragma once

#include "lm.hpp"
#include "split.hpp"

namespace sprig {

struct FitOptions {
    LMSettings lm;
    SplitObjective split_objective = SplitObjective::VariancePerCount;
};

namespace detail {

// Set a split's threshold so that, over the rows seen during fitting, every
// row routes to the true branch. Used when no feasible threshold exists;
// the simplifier later removes the node.
inline void mark_pass_through(Node& split) { split.threshold = kPassThroughThreshold; }

inline void fit_rec(Node& n, const Matrix& X, std::span<const double> y, const Rows& rows,
                    const FitOptions& opt);

// Full pipeline on a subtree treated as a standalone model of y over `rows`:
// resolve its own splits first, then tune its remaining parameters.
inline void fit_subtree(Node& sub, const Matrix& X, std::span<const double> y, const Rows& rows,
                        const FitOptions& opt) {
    fit_rec(sub, X, y, rows, opt);
    lm_fit_node(sub, X, y, rows, opt.lm);
}

inline void fit_rec(Node& n, const Matrix& X, std::span<const double> y, const Rows& rows,
                    const FitOptions& opt) {
    if (rows.empty()) return; // branch receives no data: parameters untouched

    switch (n.op) {
    case Op::SplitFlexible: {
        Node& cond = n.children[0];
        fit_subtree(cond, X, y, rows, opt);

        auto cvals = evaluate(cond, X, rows);
        Rows usable;
        std::vector<double> c_f, y_f;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (std::isfinite(cvals[i])) {
                usable.push_back(rows[i]);
                c_f.push_back(cvals[i]);
                y_f.push_back(y[rows[i]]);
            }
        }
        std::optional<SplitChoice> choice;
        if (c_f.size() >= 2) choice = find_split_threshold(c_f, y_f, opt.split_objective);
        freeze_subtree(cond);
        if (!choice) {
            mark_pass_through(n);
            fit_rec(n.children[1], X, y, usable, opt);
            return;
        }
        n.threshold = choice->tau;
        Rows rt, rf;
        for (std::size_t i = 0; i < usable.size(); ++i)
            (c_f[i] > n.threshold ? rt : rf).push_back(usable[i]);
        fit_rec(n.children[1], X, y, rt, opt);
        fit_rec(n.children[2], X, y, rf, opt);
        return;
    }
    case Op::SplitGreedy: {
        auto choice = find_greedy_split(X, y, rows, opt.split_objective);
        if (!choice) {
            mark_pass_through(n);
            fit_rec(n.children[0], X, y, rows, opt);
            return;
        }
        n.feature = choice->feature;
        n.threshold = choice->tau;
        auto col = X.column(static_cast<std::size_t>(n.feature));
        Rows rt, rf;
        for (auto r : rows) (col[r] > n.threshold ? rt : rf).push_back(r);
        fit_rec(n.children[0], X, y, rt, opt);
        fit_rec(n.children[1], X, y, rf, opt);
        return;
    }
    default:
        for (auto& c : n.children) fit_rec(c, X, y, rows, opt);
        return;
    }
}

} // namespace detail

// Split-aware parameter fitting. Depth-first over split nodes: a flexible
// split first tunes its condition subtree against the rows reaching it,
// then picks the threshold by the variance scan and fixes the condition's
// parameters; a greedy split picks (feature, threshold) by exhaustive scan.
// Each branch then sees only its routed rows. Finally the remaining
// parameters are fitted jointly. Tree structure is never altered.
inline LMResult fit_program_rows(Program& program, const Matrix& X, std::span<const double> y,
                                 const Rows& rows, const FitOptions& opt = {}) {
    if (y.size() != X.rows()) throw InputError("fit_program: target length mismatch");
    validate(program, X.cols());
    clear_frozen(program.root);
    detail::fit_rec(program.root, X, y, rows, opt);
    auto result = lm_fit_node(program.root, X, y, rows, opt.lm);
    clear_frozen(program.root);
    return result;
}

inline LMResult fit_program(Program& program, const Matrix& X, std::span<const double> y,
                            const FitOptions& opt = {}) {
    return fit_program_rows(program, X, y, all_rows(X.rows()), opt);
}

} // namespace sprig
