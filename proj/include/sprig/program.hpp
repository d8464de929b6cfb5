#pragma once

#include <functional>
#include <string>
#include <vector>

#include "node.hpp"

namespace sprig {

enum class Task { Regression, Classification };

inline std::string_view task_name(Task t) {
    return t == Task::Regression ? "regression" : "classification";
}

inline Task task_from_name(std::string_view s) {
    if (s == "regression") return Task::Regression;
    if (s == "classification") return Task::Classification;
    throw ParseError("unknown task: " + std::string(s));
}

// An expression tree plus bookkeeping. The fitted parameter vector lives
// inside the nodes (weights, thresholds, logistic offset); extract_params /
// inject_params provide the flat pre-order view of it.
struct Program {
    Node root;
    Task task = Task::Regression;
    std::vector<std::string> feature_names; // column order of the fit-time dataset

    std::size_t size() const { return subtree_size(root); }
    std::size_t depth() const { return subtree_depth(root); }

    long long complexity(const ComplexityTable& table) const {
        return linear_complexity(root, table);
    }
};

namespace detail {

template <typename Visit>
void preorder(Node& n, Visit&& visit) {
    visit(n);
    for (auto& c : n.children) preorder(c, visit);
}

template <typename Visit>
void preorder(const Node& n, Visit&& visit) {
    visit(n);
    for (const auto& c : n.children) preorder(c, visit);
}

} // namespace detail

// Full parameter vector theta in pre-order: enabled weights (constants
// included, their value being their weight), logistic offset, split
// thresholds. Injection with the same tree shape round-trips bit-exactly.
inline std::vector<double> extract_params(const Program& p) {
    std::vector<double> theta;
    detail::preorder(p.root, [&](const Node& n) {
        if (n.weight_enabled) theta.push_back(n.weight);
        if (n.op == Op::LogisticRoot) theta.push_back(n.threshold);
        if (is_split(n.op)) theta.push_back(n.threshold);
    });
    return theta;
}

inline void inject_params(Program& p, std::span<const double> theta) {
    std::size_t k = 0;
    detail::preorder(p.root, [&](Node& n) {
        if (n.weight_enabled) {
            if (k >= theta.size()) throw StructuralError("parameter vector too short");
            n.weight = theta[k++];
        }
        if (n.op == Op::LogisticRoot || is_split(n.op)) {
            if (k >= theta.size()) throw StructuralError("parameter vector too short");
            n.threshold = theta[k++];
        }
    });
    if (k != theta.size()) throw StructuralError("parameter vector too long");
}

// Structural validity: arities match, logistic root only at the root of a
// classification program, feature indices within bounds (when n_features
// is known; pass 0 to skip the bound check).
inline void validate(const Program& p, std::size_t n_features = 0) {
    std::function<void(const Node&, bool)> walk = [&](const Node& n, bool at_root) {
        if (static_cast<int>(n.children.size()) != arity(n.op))
            throw StructuralError("node " + std::string(op_name(n.op)) + " has wrong arity");
        if (n.op == Op::LogisticRoot) {
            if (!at_root) throw StructuralError("logistic node below the root");
            if (p.task != Task::Classification)
                throw StructuralError("logistic root in a regression program");
        }
        if ((n.op == Op::Feature || n.op == Op::SplitGreedy) && n_features > 0) {
            if (n.feature < 0 || static_cast<std::size_t>(n.feature) >= n_features)
                throw StructuralError("feature index " + std::to_string(n.feature) +
                                      " out of bounds (" + std::to_string(n_features) + " columns)");
        }
        for (const auto& c : n.children) walk(c, false);
    };
    walk(p.root, true);
}

inline void clear_frozen(Node& n) {
    n.frozen = false;
    for (auto& c : n.children) clear_frozen(c);
}

inline void freeze_subtree(Node& n) {
    n.frozen = true;
    for (auto& c : n.children) freeze_subtree(c);
}

// Convenience constructors used across tests and generators.
inline Node constant(double value, bool enabled = true) {
    Node n;
    n.op = Op::Constant;
    n.weight = value;
    n.weight_enabled = enabled;
    return n;
}

inline Node feature(int index, double weight = 1.0, bool enabled = false) {
    Node n;
    n.op = Op::Feature;
    n.feature = index;
    n.weight = weight;
    n.weight_enabled = enabled;
    return n;
}

inline Node make_node(Op op, std::vector<Node> children) {
    Node n;
    n.op = op;
    n.children = std::move(children);
    if (static_cast<int>(n.children.size()) != arity(op))
        throw StructuralError("make_node: wrong arity for " + std::string(op_name(op)));
    return n;
}

inline Node split_greedy(int feat, double tau, Node on_true, Node on_false) {
    Node n = make_node(Op::SplitGreedy, { std::move(on_true), std::move(on_false) });
    n.feature = feat;
    n.threshold = tau;
    return n;
}

inline Node split_flexible(Node cond, double tau, Node on_true, Node on_false) {
    Node n = make_node(Op::SplitFlexible, { std::move(cond), std::move(on_true), std::move(on_false) });
    n.threshold = tau;
    return n;
}

inline Program classifier(Node body, double offset = 0.0) {
    Program p;
    p.task = Task::Classification;
    p.root = make_node(Op::LogisticRoot, { std::move(body) });
    p.root.threshold = offset;
    return p;
}

} // namespace sprig
