#pragma once

#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "core.hpp"
#include "program.hpp"

namespace sprig {

using RowIndex = std::uint32_t;
using Rows = std::vector<RowIndex>;

inline Rows all_rows(std::size_t d) {
    Rows r(d);
    for (std::size_t i = 0; i < d; ++i) r[i] = static_cast<RowIndex>(i);
    return r;
}

// Numerically stable sigmoid, clamped into the open unit interval so
// saturated classifier outputs stay valid probabilities.
inline double logistic(double z) {
    double v;
    if (z >= 0) {
        v = 1.0 / (1.0 + std::exp(-z));
    } else {
        const double e = std::exp(z);
        v = e / (1.0 + e);
    }
    const double lo = std::numeric_limits<double>::min();
    const double hi = 1.0 - std::numeric_limits<double>::epsilon() / 2;
    return std::min(hi, std::max(lo, v));
}

namespace detail {

// Splits mask the data: rows routed to the true branch are those whose
// condition value is strictly greater than the threshold; rows with a
// non-finite condition yield a non-finite output directly.
struct RoutedRows {
    Rows rows_true, rows_false;
    std::vector<std::uint32_t> pos_true, pos_false; // positions in the parent row list
    std::vector<std::uint32_t> pos_nan;
};

inline RoutedRows route(std::span<const double> cond, const Rows& rows, double tau) {
    RoutedRows out;
    for (std::uint32_t i = 0; i < rows.size(); ++i) {
        double c = cond[i];
        if (!std::isfinite(c)) {
            out.pos_nan.push_back(i);
        } else if (c > tau) {
            out.rows_true.push_back(rows[i]);
            out.pos_true.push_back(i);
        } else {
            out.rows_false.push_back(rows[i]);
            out.pos_false.push_back(i);
        }
    }
    return out;
}

inline void eval_rec(const Node& n, const Matrix& X, const Rows& rows, std::vector<double>& out) {
    const std::size_t m = rows.size();
    out.assign(m, 0.0);
    if (m == 0) return;
    const double w = n.effective_weight();

    switch (n.op) {
    case Op::Constant: {
        const double v = n.weight_enabled ? n.weight : 1.0;
        out.assign(m, v);
        return;
    }
    case Op::Feature: {
        auto col = X.column(static_cast<std::size_t>(n.feature));
        for (std::size_t i = 0; i < m; ++i) out[i] = w * col[rows[i]];
        return;
    }
    case Op::Sin: case Op::Cos: case Op::Tanh: case Op::Exp:
    case Op::Log: case Op::Sqrt: case Op::Ceil: case Op::Floor: {
        std::vector<double> u;
        eval_rec(n.children[0], X, rows, u);
        for (std::size_t i = 0; i < m; ++i) {
            double v = u[i];
            switch (n.op) {
            case Op::Sin: v = std::sin(v); break;
            case Op::Cos: v = std::cos(v); break;
            case Op::Tanh: v = std::tanh(v); break;
            case Op::Exp: v = std::exp(v); break;
            case Op::Log: v = std::log(v); break;
            case Op::Sqrt: v = std::sqrt(v); break;
            case Op::Ceil: v = std::ceil(v); break;
            case Op::Floor: v = std::floor(v); break;
            default: break;
            }
            out[i] = w * v;
        }
        return;
    }
    case Op::Add: case Op::Sub: case Op::Mul: case Op::Div:
    case Op::Pow: case Op::Min: case Op::Max: {
        std::vector<double> a, b;
        eval_rec(n.children[0], X, rows, a);
        eval_rec(n.children[1], X, rows, b);
        for (std::size_t i = 0; i < m; ++i) {
            double v = 0.0;
            switch (n.op) {
            case Op::Add: v = a[i] + b[i]; break;
            case Op::Sub: v = a[i] - b[i]; break;
            case Op::Mul: v = a[i] * b[i]; break;
            case Op::Div: v = a[i] / b[i]; break;
            case Op::Pow: v = std::pow(a[i], b[i]); break;
            case Op::Min: v = std::min(a[i], b[i]); break;
            case Op::Max: v = std::max(a[i], b[i]); break;
            default: break;
            }
            out[i] = w * v;
        }
        return;
    }
    case Op::SplitGreedy: case Op::SplitFlexible: {
        std::vector<double> cond;
        if (n.op == Op::SplitGreedy) {
            auto col = X.column(static_cast<std::size_t>(n.feature));
            cond.resize(m);
            for (std::size_t i = 0; i < m; ++i) cond[i] = col[rows[i]];
        } else {
            eval_rec(n.children[0], X, rows, cond);
        }
        auto routed = route(cond, rows, n.threshold);
        const Node& t = n.children[n.op == Op::SplitGreedy ? 0 : 1];
        const Node& f = n.children[n.op == Op::SplitGreedy ? 1 : 2];
        std::vector<double> vt, vf;
        if (!routed.rows_true.empty()) eval_rec(t, X, routed.rows_true, vt);
        if (!routed.rows_false.empty()) eval_rec(f, X, routed.rows_false, vf);
        for (std::size_t k = 0; k < routed.pos_true.size(); ++k) out[routed.pos_true[k]] = w * vt[k];
        for (std::size_t k = 0; k < routed.pos_false.size(); ++k) out[routed.pos_false[k]] = w * vf[k];
        for (auto p : routed.pos_nan) out[p] = std::numeric_limits<double>::quiet_NaN();
        return;
    }
    case Op::LogisticRoot: {
        std::vector<double> u;
        eval_rec(n.children[0], X, rows, u);
        for (std::size_t i = 0; i < m; ++i) out[i] = logistic(u[i] + n.threshold);
        return;
    }
    }
}

} // namespace detail

// Evaluate a subtree on a row subset; output aligned with `rows`.
inline std::vector<double> evaluate(const Node& root, const Matrix& X, const Rows& rows) {
    std::vector<double> out;
    detail::eval_rec(root, X, rows, out);
    return out;
}

inline std::vector<double> evaluate(const Program& p, const Matrix& X) {
    if (X.rows() == 0) throw InputError("evaluate: empty feature matrix");
    validate(p, X.cols());
    return evaluate(p.root, X, all_rows(X.rows()));
}

// ---------------------------------------------------------------------------
// Forward-mode differentiation with respect to the trainable parameters:
// enabled, unfrozen node weights plus the logistic offset. Split thresholds
// are never in the trainable set, and routing is piecewise constant, so no
// gradient flows through the routing decision or the condition subtree.
// ---------------------------------------------------------------------------

struct TrainableRef {
    Node* node;
    bool is_offset; // logistic offset rather than weight
};

// Pre-order collection; this order defines the LM parameter vector.
inline void collect_trainable(Node& n, std::vector<TrainableRef>& out) {
    if (n.weight_enabled && !n.frozen) out.push_back({ &n, false });
    if (n.op == Op::LogisticRoot && !n.frozen) out.push_back({ &n, true });
    for (auto& c : n.children) collect_trainable(c, out);
}

inline std::vector<TrainableRef> collect_trainable(Node& n) {
    std::vector<TrainableRef> out;
    collect_trainable(n, out);
    return out;
}

namespace detail {

struct ParamSlots {
    std::unordered_map<const Node*, int> weight_slot;
    std::unordered_map<const Node*, int> offset_slot;
    int count = 0;
};

inline ParamSlots index_trainable(Node& root) {
    ParamSlots slots;
    for (const auto& ref : collect_trainable(root)) {
        if (ref.is_offset) slots.offset_slot[ref.node] = slots.count++;
        else slots.weight_slot[ref.node] = slots.count++;
    }
    return slots;
}

// Values plus dense Jacobian block, grad[i*p + j] = d out_i / d theta_j.
struct GradBlock {
    std::vector<double> val;
    std::vector<double> grad;
};

inline void grad_rec(const Node& n, const Matrix& X, const Rows& rows,
                     const ParamSlots& slots, GradBlock& out) {
    const std::size_t m = rows.size();
    const std::size_t p = static_cast<std::size_t>(slots.count);
    out.val.assign(m, 0.0);
    out.grad.assign(m * p, 0.0);
    if (m == 0) return;

    const double w = n.effective_weight();
    auto wslot = slots.weight_slot.find(&n);
    const int ws = wslot == slots.weight_slot.end() ? -1 : wslot->second;

    // out = w * g(children); chain rule contribution for the node weight is
    // g itself, added after the children terms are scaled by w.
    auto finish = [&](const std::vector<double>& g) {
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < p; ++j) out.grad[i * p + j] *= w;
            if (ws >= 0) out.grad[i * p + static_cast<std::size_t>(ws)] += g[i];
            out.val[i] = w * g[i];
        }
    };

    switch (n.op) {
    case Op::Constant: {
        out.val.assign(m, n.weight_enabled ? n.weight : 1.0);
        if (ws >= 0)
            for (std::size_t i = 0; i < m; ++i) out.grad[i * p + static_cast<std::size_t>(ws)] = 1.0;
        return;
    }
    case Op::Feature: {
        auto col = X.column(static_cast<std::size_t>(n.feature));
        for (std::size_t i = 0; i < m; ++i) {
            const double x = col[rows[i]];
            out.val[i] = w * x;
            if (ws >= 0) out.grad[i * p + static_cast<std::size_t>(ws)] = x;
        }
        return;
    }
    case Op::Sin: case Op::Cos: case Op::Tanh: case Op::Exp:
    case Op::Log: case Op::Sqrt: case Op::Ceil: case Op::Floor: {
        GradBlock c;
        grad_rec(n.children[0], X, rows, slots, c);
        std::vector<double> g(m);
        for (std::size_t i = 0; i < m; ++i) {
            const double u = c.val[i];
            double gv = 0.0, du = 0.0;
            switch (n.op) {
            case Op::Sin: gv = std::sin(u); du = std::cos(u); break;
            case Op::Cos: gv = std::cos(u); du = -std::sin(u); break;
            case Op::Tanh: gv = std::tanh(u); du = 1.0 - gv * gv; break;
            case Op::Exp: gv = std::exp(u); du = gv; break;
            case Op::Log: gv = std::log(u); du = 1.0 / u; break;
            case Op::Sqrt: gv = std::sqrt(u); du = 0.5 / gv; break;
            case Op::Ceil: gv = std::ceil(u); du = 0.0; break;
            case Op::Floor: gv = std::floor(u); du = 0.0; break;
            default: break;
            }
            g[i] = gv;
            for (std::size_t j = 0; j < p; ++j) out.grad[i * p + j] = du * c.grad[i * p + j];
        }
        finish(g);
        return;
    }
    case Op::Add: case Op::Sub: case Op::Mul: case Op::Div:
    case Op::Pow: case Op::Min: case Op::Max: {
        GradBlock a, b;
        grad_rec(n.children[0], X, rows, slots, a);
        grad_rec(n.children[1], X, rows, slots, b);
        std::vector<double> g(m);
        for (std::size_t i = 0; i < m; ++i) {
            const double av = a.val[i], bv = b.val[i];
            double gv = 0.0, da = 0.0, db = 0.0;
            switch (n.op) {
            case Op::Add: gv = av + bv; da = 1.0; db = 1.0; break;
            case Op::Sub: gv = av - bv; da = 1.0; db = -1.0; break;
            case Op::Mul: gv = av * bv; da = bv; db = av; break;
            case Op::Div: gv = av / bv; da = 1.0 / bv; db = -av / (bv * bv); break;
            case Op::Pow:
                gv = std::pow(av, bv);
                da = bv * std::pow(av, bv - 1.0);
                db = gv * std::log(av);
                break;
            case Op::Min: gv = std::min(av, bv); da = av <= bv ? 1.0 : 0.0; db = 1.0 - da; break;
            case Op::Max: gv = std::max(av, bv); da = av >= bv ? 1.0 : 0.0; db = 1.0 - da; break;
            default: break;
            }
            g[i] = gv;
            for (std::size_t j = 0; j < p; ++j)
                out.grad[i * p + j] = da * a.grad[i * p + j] + db * b.grad[i * p + j];
        }
        finish(g);
        return;
    }
    case Op::SplitGreedy: case Op::SplitFlexible: {
        std::vector<double> cond;
        if (n.op == Op::SplitGreedy) {
            auto col = X.column(static_cast<std::size_t>(n.feature));
            cond.resize(m);
            for (std::size_t i = 0; i < m; ++i) cond[i] = col[rows[i]];
        } else {
            // Routing only; zero gradient through the condition.
            eval_rec(n.children[0], X, rows, cond);
        }
        auto routed = route(cond, rows, n.threshold);
        const Node& t = n.children[n.op == Op::SplitGreedy ? 0 : 1];
        const Node& f = n.children[n.op == Op::SplitGreedy ? 1 : 2];
        GradBlock bt, bf;
        if (!routed.rows_true.empty()) grad_rec(t, X, routed.rows_true, slots, bt);
        if (!routed.rows_false.empty()) grad_rec(f, X, routed.rows_false, slots, bf);
        std::vector<double> g(m, 0.0);
        auto scatter = [&](const GradBlock& blk, const std::vector<std::uint32_t>& pos) {
            for (std::size_t k = 0; k < pos.size(); ++k) {
                g[pos[k]] = blk.val[k];
                for (std::size_t j = 0; j < p; ++j)
                    out.grad[pos[k] * p + j] = blk.grad[k * p + j];
            }
        };
        scatter(bt, routed.pos_true);
        scatter(bf, routed.pos_false);
        for (auto pos : routed.pos_nan) g[pos] = std::numeric_limits<double>::quiet_NaN();
        finish(g);
        return;
    }
    case Op::LogisticRoot: {
        GradBlock c;
        grad_rec(n.children[0], X, rows, slots, c);
        auto oslot = slots.offset_slot.find(&n);
        const int os = oslot == slots.offset_slot.end() ? -1 : oslot->second;
        for (std::size_t i = 0; i < m; ++i) {
            const double v = logistic(c.val[i] + n.threshold);
            const double s = v * (1.0 - v);
            out.val[i] = v;
            for (std::size_t j = 0; j < p; ++j) out.grad[i * p + j] = s * c.grad[i * p + j];
            if (os >= 0) out.grad[i * p + static_cast<std::size_t>(os)] += s;
        }
        return;
    }
    }
}

} // namespace detail

struct EvalJacobian {
    std::vector<double> values;   // aligned with rows
    std::vector<double> jacobian; // row-major, rows.size() x n_params
    std::size_t n_params = 0;
};

// Values and forward-mode Jacobian with respect to the trainable
// parameters, in collect_trainable order.
inline EvalJacobian eval_with_jacobian(Node& root, const Matrix& X, const Rows& rows) {
    auto slots = detail::index_trainable(root);
    detail::GradBlock block;
    detail::grad_rec(root, X, rows, slots, block);
    return { std::move(block.val), std::move(block.grad),
             static_cast<std::size_t>(slots.count) };
}

} // namespace sprig
