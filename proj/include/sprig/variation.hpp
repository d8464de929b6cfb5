#pragma once

#include "generate.hpp"

namespace sprig {

namespace detail {

struct NodeSlot {
    Node* node;
    std::size_t depth; // depth measured from the program root
};

inline void collect_slots(Node& n, std::size_t depth, std::vector<NodeSlot>& out) {
    out.push_back({ &n, depth });
    for (auto& c : n.children) collect_slots(c, depth + 1, out);
}

// Variation never touches the logistic root itself; for classifiers the
// mutable region is the subtree below it.
inline NodeSlot body_slot(Program& p) {
    if (p.root.op == Op::LogisticRoot) return { &p.root.children[0], 1 };
    return { &p.root, 0 };
}

inline std::vector<NodeSlot> body_slots(Program& p) {
    std::vector<NodeSlot> out;
    auto base = body_slot(p);
    collect_slots(*base.node, base.depth, out);
    return out;
}

template <typename T>
inline T& pick_uniform(std::vector<T>& v, Rng& rng) {
    std::uniform_int_distribution<std::size_t> d(0, v.size() - 1);
    return v[d(rng)];
}

inline std::vector<Op> point_alternatives(const Node& n, const SearchConfig& config,
                                          std::size_t n_features) {
    std::vector<Op> alts;
    const int a = arity(n.op);
    if (a == 0) {
        if (n.op == Op::Constant && n_features > 0) alts.push_back(Op::Feature);
        if (n.op == Op::Feature) {
            alts.push_back(Op::Constant);
            if (n_features > 1) alts.push_back(Op::Feature); // re-draw index
        }
        return alts;
    }
    for (Op op : config.functions)
        if (arity(op) == a && op != n.op) alts.push_back(op);
    return alts;
}

inline bool apply_point(Program& p, const SearchConfig& config, std::size_t n_features, Rng& rng) {
    auto slots = body_slots(p);
    std::vector<NodeSlot> eligible;
    for (auto& s : slots)
        if (!point_alternatives(*s.node, config, n_features).empty()) eligible.push_back(s);
    if (eligible.empty()) return false;
    Node& target = *pick_uniform(eligible, rng).node;
    auto alts = point_alternatives(target, config, n_features);
    std::uniform_int_distribution<std::size_t> d(0, alts.size() - 1);
    const Op op = alts[d(rng)];

    if (arity(op) == 0) {
        const double w = target.weight;
        const bool en = target.weight_enabled;
        if (op == Op::Feature) {
            std::uniform_int_distribution<std::size_t> fp(0, n_features - 1);
            int idx = static_cast<int>(fp(rng));
            if (target.op == Op::Feature && n_features > 1) {
                while (idx == target.feature) idx = static_cast<int>(fp(rng));
            }
            target = feature(idx, w, en);
        } else {
            target = constant(w, en);
        }
        return true;
    }
    target.op = op;
    if (op == Op::SplitGreedy) {
        std::uniform_int_distribution<std::size_t> fp(0, n_features > 0 ? n_features - 1 : 0);
        target.feature = static_cast<int>(fp(rng));
        target.threshold = 0.0;
    }
    return true;
}

inline bool apply_toggle(Program& p, bool enable, Rng& rng) {
    auto slots = body_slots(p);
    std::vector<NodeSlot> eligible;
    for (auto& s : slots)
        if (s.node->weight_enabled != enable) eligible.push_back(s);
    if (eligible.empty()) return false;
    pick_uniform(eligible, rng).node->weight_enabled = enable;
    return true;
}

inline bool apply_subtree(Program& p, const SearchConfig& config, std::size_t n_features, Rng& rng) {
    auto slots = body_slots(p);
    NodeSlot target = pick_uniform(slots, rng);
    const std::size_t here = subtree_size(*target.node);
    const std::size_t rest = p.size() - here;
    const std::size_t size_budget = config.max_size > rest ? config.max_size - rest : 1;
    const std::size_t depth_budget =
        config.max_depth > target.depth ? config.max_depth - target.depth : 1;
    *target.node = generate_tree_ptc2(config, n_features, rng, depth_budget, size_budget);
    return true;
}

inline bool apply_delete(Program& p, Rng& rng) {
    auto slots = body_slots(p);
    std::vector<NodeSlot> internal;
    for (auto& s : slots)
        if (!s.node->children.empty()) internal.push_back(s);
    if (internal.empty()) return false;
    Node& target = *pick_uniform(internal, rng).node;
    std::uniform_int_distribution<std::size_t> d(0, target.children.size() - 1);
    Node promoted = std::move(target.children[d(rng)]);
    target = std::move(promoted);
    return true;
}

inline bool apply_insert(Program& p, const SearchConfig& config, std::size_t n_features, Rng& rng) {
    auto slots = body_slots(p);
    NodeSlot target = pick_uniform(slots, rng);
    std::vector<Op> ok;
    for (Op op : config.functions)
        if (arity(op) >= 1) ok.push_back(op);
    if (ok.empty()) return false;
    std::uniform_int_distribution<std::size_t> d(0, ok.size() - 1);
    Node wrapper = blank_operator(ok[d(rng)], n_features, rng);
    std::uniform_int_distribution<std::size_t> slot_d(0, wrapper.children.size() - 1);
    const std::size_t keep = slot_d(rng);
    for (std::size_t i = 0; i < wrapper.children.size(); ++i)
        if (i != keep) wrapper.children[i] = random_terminal(config, n_features, rng);
    wrapper.children[keep] = std::move(*target.node);
    *target.node = std::move(wrapper);
    return true;
}

inline void collect_const_slots(const Node& n, std::vector<const Node*>& out) {
    out.push_back(&n);
    for (const auto& c : n.children) collect_const_slots(c, out);
}

inline bool apply_crossover(Program& child, const Program& donor, Rng& rng) {
    auto slots = body_slots(child);
    NodeSlot target = pick_uniform(slots, rng);
    std::vector<const Node*> donor_slots;
    const Node& donor_base =
        donor.root.op == Op::LogisticRoot ? donor.root.children[0] : donor.root;
    collect_const_slots(donor_base, donor_slots);
    *target.node = *pick_uniform(donor_slots, rng);
    return true;
}

} // namespace detail

struct VariationStats {
    std::array<std::size_t, kMutationKinds> mutation_counts{};
    std::size_t crossovers = 0;
    std::size_t parent_clones = 0;
    std::size_t bound_rejections = 0;
};

// One offspring from the selected parent(s): subtree crossover with the
// configured probability, otherwise one weighted mutation. Offspring
// violating the size/depth bounds are rejected and the variation retried;
// after bounded retries (or an inapplicable mutation) the parent is copied.
inline Program vary(const Program& primary, const Program& secondary, const SearchConfig& config,
                    std::size_t n_features, Rng& rng, VariationStats* stats = nullptr) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::discrete_distribution<int> mutation_dist(config.mutation_weights.begin(),
                                                  config.mutation_weights.end());
    constexpr int kRetries = 8;

    for (int attempt = 0; attempt < kRetries; ++attempt) {
        Program child = primary;
        bool changed = false;
        bool was_crossover = false;
        MutationKind kind{};
        if (coin(rng) < config.crossover_probability) {
            changed = detail::apply_crossover(child, secondary, rng);
            was_crossover = true;
        } else {
            kind = static_cast<MutationKind>(mutation_dist(rng));
            switch (kind) {
            case MutationKind::ToggleWeightOn: changed = detail::apply_toggle(child, true, rng); break;
            case MutationKind::ToggleWeightOff: changed = detail::apply_toggle(child, false, rng); break;
            case MutationKind::Point: changed = detail::apply_point(child, config, n_features, rng); break;
            case MutationKind::Subtree: changed = detail::apply_subtree(child, config, n_features, rng); break;
            case MutationKind::Delete: changed = detail::apply_delete(child, rng); break;
            case MutationKind::Insert: changed = detail::apply_insert(child, config, n_features, rng); break;
            }
        }
        if (!changed) break; // nothing applicable: fall through to parent copy
        if (child.size() <= config.max_size && child.depth() <= config.max_depth) {
            if (stats) {
                if (was_crossover) ++stats->crossovers;
                else ++stats->mutation_counts[static_cast<int>(kind)];
            }
            return child;
        }
        if (stats) ++stats->bound_rejections;
    }
    if (stats) ++stats->parent_clones;
    return primary;
}

} // namespace sprig
