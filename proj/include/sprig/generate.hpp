#pragma once

#include "config.hpp"

namespace sprig {

namespace detail {

inline Node random_terminal(const SearchConfig& config, std::size_t n_features, Rng& rng) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (n_features == 0 || coin(rng) < config.constant_probability) {
        std::normal_distribution<double> value(0.0, 1.0);
        return constant(value(rng), /*enabled=*/true);
    }
    std::uniform_int_distribution<std::size_t> pick(0, n_features - 1);
    // Only terminal weights start enabled.
    return feature(static_cast<int>(pick(rng)), 1.0, /*enabled=*/true);
}

inline Node blank_operator(Op op, std::size_t n_features, Rng& rng) {
    Node n;
    n.op = op;
    n.children.resize(static_cast<std::size_t>(arity(op)));
    if (op == Op::SplitGreedy && n_features > 0) {
        std::uniform_int_distribution<std::size_t> pick(0, n_features - 1);
        n.feature = static_cast<int>(pick(rng));
    }
    return n;
}

} // namespace detail

// PTC2-style growth: draw a size budget, then expand open argument slots in
// random order, forcing terminals once the budget or the depth cap is hit.
// The result always satisfies size <= max_size and depth <= max_depth.
inline Node generate_tree_ptc2(const SearchConfig& config, std::size_t n_features, Rng& rng,
                               std::size_t max_depth, std::size_t max_size) {
    if (config.functions.empty()) throw ConfigError("generate: empty function set");
    if (max_depth < 1 || max_size < 1) throw ConfigError("generate: zero budget");

    std::uniform_int_distribution<std::size_t> size_dist(1, max_size);
    const std::size_t target = size_dist(rng);
    if (target == 1 || max_size < 2)
        return detail::random_terminal(config, n_features, rng);

    auto pick_function = [&](std::size_t size_left) -> std::optional<Op> {
        std::vector<Op> ok;
        for (Op op : config.functions)
            if (static_cast<std::size_t>(arity(op)) <= size_left) ok.push_back(op);
        if (ok.empty()) return std::nullopt;
        std::uniform_int_distribution<std::size_t> pick(0, ok.size() - 1);
        return ok[pick(rng)];
    };

    auto root_op = pick_function(max_size - 1);
    if (!root_op) return detail::random_terminal(config, n_features, rng);
    Node root = detail::blank_operator(*root_op, n_features, rng);

    struct Slot {
        Node* node;
        std::size_t depth;
    };
    std::vector<Slot> open;
    for (auto& c : root.children) open.push_back({ &c, 1 });
    std::size_t count = 1;

    while (!open.empty()) {
        std::uniform_int_distribution<std::size_t> pick(0, open.size() - 1);
        const std::size_t idx = pick(rng);
        Slot slot = open[idx];
        open[idx] = open.back();
        open.pop_back();

        const std::size_t committed = count + open.size() + 1; // nodes once this slot is a leaf
        const bool want_growth = count + open.size() + 1 < target;
        std::optional<Op> op;
        if (want_growth && slot.depth < max_depth && committed < max_size)
            op = pick_function(max_size - committed);
        if (op) {
            *slot.node = detail::blank_operator(*op, n_features, rng);
            for (auto& c : slot.node->children) open.push_back({ &c, slot.depth + 1 });
        } else {
            *slot.node = detail::random_terminal(config, n_features, rng);
        }
        ++count;
    }
    return root;
}

// Seeding trees made solely of greedy split nodes with constant leaves;
// thresholds and leaf values are placeholders until the first fit.
inline Node generate_split_seed(const SearchConfig& config, std::size_t n_features, Rng& rng,
                                std::size_t max_depth, std::size_t max_size) {
    std::size_t depth_cap = 0;
    while ((std::size_t{ 2 } << (depth_cap + 1)) - 1 <= max_size && depth_cap + 1 <= max_depth)
        ++depth_cap;
    std::normal_distribution<double> value(0.0, 1.0);
    if (depth_cap == 0) return constant(value(rng), true);

    std::uniform_int_distribution<std::size_t> depth_dist(1, depth_cap);
    const std::size_t depth = depth_dist(rng);

    std::function<Node(std::size_t)> build = [&](std::size_t level) -> Node {
        if (level == 0) return constant(value(rng), true);
        Node n = detail::blank_operator(Op::SplitGreedy, n_features, rng);
        n.children[0] = build(level - 1);
        n.children[1] = build(level - 1);
        return n;
    };
    return build(depth);
}

// Random program within the configured bounds. Classification programs get
// the logistic root; everything below it comes from the generator.
inline Program generate_random(const SearchConfig& config, Rng& rng, std::size_t n_features,
                               std::size_t max_depth, std::size_t max_size) {
    Program p;
    p.task = config.task;
    const bool cls = config.task == Task::Classification;
    const std::size_t body_depth = cls ? std::max<std::size_t>(1, max_depth - 1) : max_depth;
    const std::size_t body_size = cls ? std::max<std::size_t>(1, max_size - 1) : max_size;

    Node body;
    if (config.split_seeded_init && config.splits_enabled())
        body = generate_split_seed(config, n_features, rng, body_depth, body_size);
    else
        body = generate_tree_ptc2(config, n_features, rng, body_depth, body_size);

    if (cls) {
        p.root = make_node(Op::LogisticRoot, { std::move(body) });
        p.root.threshold = 0.0;
    } else {
        p.root = std::move(body);
    }
    return p;
}

inline Program generate_random(const SearchConfig& config, Rng& rng, std::size_t n_features) {
    return generate_random(config, rng, n_features, config.max_depth, config.max_size);
}

} // namespace sprig
