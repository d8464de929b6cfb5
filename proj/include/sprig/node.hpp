#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "core.hpp"

namespace sprig {

enum class Op {
    Constant,
    Feature,
    // unary
    Sin,
    Cos,
    Tanh,
    Exp,
    Log,
    Sqrt,
    Ceil,
    Floor,
    // binary
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Min,
    Max,
    // splits
    SplitGreedy,   // condition = raw feature, arity 2 (true, false)
    SplitFlexible, // condition = evolved subtree, arity 3 (cond, true, false)
    // classifier root
    LogisticRoot,
};

inline int arity(Op op) {
    switch (op) {
    case Op::Constant:
    case Op::Feature:
        return 0;
    case Op::Sin:
    case Op::Cos:
    case Op::Tanh:
    case Op::Exp:
    case Op::Log:
    case Op::Sqrt:
    case Op::Ceil:
    case Op::Floor:
    case Op::LogisticRoot:
        return 1;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div:
    case Op::Pow:
    case Op::Min:
    case Op::Max:
    case Op::SplitGreedy:
        return 2;
    case Op::SplitFlexible:
        return 3;
    }
    return 0;
}

inline bool is_terminal(Op op) { return arity(op) == 0; }
inline bool is_split(Op op) { return op == Op::SplitGreedy || op == Op::SplitFlexible; }

inline std::string_view op_name(Op op) {
    switch (op) {
    case Op::Constant: return "constant";
    case Op::Feature: return "feature";
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Tanh: return "tanh";
    case Op::Exp: return "exp";
    case Op::Log: return "log";
    case Op::Sqrt: return "sqrt";
    case Op::Ceil: return "ceil";
    case Op::Floor: return "floor";
    case Op::Add: return "add";
    case Op::Sub: return "sub";
    case Op::Mul: return "mul";
    case Op::Div: return "div";
    case Op::Pow: return "pow";
    case Op::Min: return "min";
    case Op::Max: return "max";
    case Op::SplitGreedy: return "split_greedy";
    case Op::SplitFlexible: return "split_flexible";
    case Op::LogisticRoot: return "logistic";
    }
    return "?";
}

inline Op op_from_name(std::string_view name) {
    static const std::array<Op, 20> all = {
        Op::Constant, Op::Feature, Op::Sin, Op::Cos, Op::Tanh, Op::Exp, Op::Log,
        Op::Sqrt, Op::Ceil, Op::Floor, Op::Add, Op::Sub, Op::Mul, Op::Div,
        Op::Pow, Op::Min, Op::Max, Op::SplitGreedy, Op::SplitFlexible, Op::LogisticRoot
    };
    for (Op op : all)
        if (op_name(op) == name) return op;
    throw ParseError("unknown node kind: " + std::string(name));
}

// One symbol in an expression tree. Every node carries an innate
// multiplicative weight; when weight_enabled is false the effective weight
// is exactly 1 and the weight is excluded from the trainable set.
//
// A Constant node's value IS its weight (it scales an implicit 1), so a
// constant with its weight toggled off evaluates to the literal 1.
// `threshold` is the split threshold tau for split nodes and the additive
// offset b for the logistic root; unused otherwise.
struct Node {
    Op op = Op::Constant;
    int feature = 0;        // Feature and SplitGreedy
    double weight = 1.0;
    bool weight_enabled = false;
    double threshold = 0.0; // tau for splits, offset b for LogisticRoot
    int complexity_cost = 1;
    bool frozen = false;    // fit-time only: parameters excluded from LM
    std::vector<Node> children;

    double effective_weight() const { return weight_enabled ? weight : 1.0; }
};

inline std::size_t subtree_size(const Node& n) {
    std::size_t s = 1;
    for (const auto& c : n.children) s += subtree_size(c);
    return s;
}

inline std::size_t subtree_depth(const Node& n) {
    std::size_t d = 0;
    for (const auto& c : n.children) d = std::max(d, subtree_depth(c) + 1);
    return d;
}

// Per-kind complexity costs c_n for the linear complexity objective.
// Costs are configurable; these defaults order operators roughly by how
// hard they are to read in a clinical formula.
class ComplexityTable {
public:
    ComplexityTable() {
        set(Op::Constant, 1);
        set(Op::Feature, 1);
        set(Op::Add, 2);
        set(Op::Sub, 2);
        set(Op::Mul, 3);
        set(Op::Div, 3);
        set(Op::Min, 3);
        set(Op::Max, 3);
        set(Op::Ceil, 3);
        set(Op::Floor, 3);
        set(Op::Pow, 4);
        set(Op::Log, 4);
        set(Op::Exp, 4);
        set(Op::Sqrt, 4);
        set(Op::Sin, 5);
        set(Op::Cos, 5);
        set(Op::Tanh, 5);
        set(Op::SplitGreedy, 4);
        set(Op::SplitFlexible, 4);
        set(Op::LogisticRoot, 3);
    }

    void set(Op op, int cost) {
        if (cost < 1) throw ConfigError("complexity cost must be >= 1");
        costs_[op] = cost;
    }

    int cost(Op op) const {
        auto it = costs_.find(op);
        if (it == costs_.end())
            throw ConfigError("no complexity cost for kind " + std::string(op_name(op)));
        return it->second;
    }

private:
    std::map<Op, int> costs_;
};

// C(n) = c_n + sum of the children's linear complexities.
inline long long linear_complexity(const Node& n, const ComplexityTable& table) {
    long long c = table.cost(n.op);
    for (const auto& child : n.children) c += linear_complexity(child, table);
    return c;
}

} // namespace sprig
