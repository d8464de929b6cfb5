#include <catch2/catch_amalgamated.hpp>

#include <sprig/variation.hpp>

using namespace sprig;

TEST_CASE("delete on a single terminal clones the parent") {
    SearchConfig config;
    config.crossover_probability = 0.0;
    config.mutation_weights = { 0, 0, 0, 0, 1, 0 }; // delete only
    Program parent;
    parent.root = feature(0, 2.0, true);
    Rng rng(1);
    Program child = vary(parent, parent, config, 3, rng);
    CHECK(child.size() == 1);
    CHECK(child.root.op == Op::Feature);
    CHECK(child.root.weight == 2.0);
}

TEST_CASE("point mutation preserves size") {
    SearchConfig config = srbench_profile();
    config.crossover_probability = 0.0;
    config.mutation_weights = { 0, 0, 1, 0, 0, 0 }; // point only
    Rng rng(2);
    Program parent;
    parent.root = make_node(Op::Add, { make_node(Op::Sin, { feature(0) }), feature(1) });
    for (int i = 0; i < 200; ++i) {
        Program child = vary(parent, parent, config, 4, rng);
        CHECK(child.size() == parent.size());
    }
}

TEST_CASE("ten thousand offspring respect bounds and every operator fires") {
    SearchConfig config = clinical_profile();
    config.max_size = 30;
    config.max_depth = 6;
    Program a;
    a.root = make_node(Op::Add, { make_node(Op::Mul, { feature(0, 1.2, true), feature(1) }),
                                  make_node(Op::Sin, { constant(0.5) }) });
    Program b;
    b.root = split_greedy(2, 0.5, feature(0, 0.9, true), constant(1.5));

    VariationStats stats;
    Rng rng(3);
    for (int i = 0; i < 10000; ++i) {
        Program child = vary(i % 2 ? a : b, i % 2 ? b : a, config, 5, rng, &stats);
        CHECK(child.size() <= config.max_size);
        CHECK(child.depth() <= config.max_depth);
    }
    CHECK(stats.crossovers > 0);
    for (int k = 0; k < kMutationKinds; ++k) {
        INFO("mutation kind " << mutation_name(static_cast<MutationKind>(k)));
        CHECK(stats.mutation_counts[k] > 0);
    }
}

TEST_CASE("toggle weight flips exactly one flag") {
    SearchConfig config;
    config.crossover_probability = 0.0;
    config.mutation_weights = { 1, 0, 0, 0, 0, 0 }; // toggle on only
    Program parent;
    parent.root = make_node(Op::Add, { feature(0), feature(1) });
    Rng rng(4);
    Program child = vary(parent, parent, config, 2, rng);
    int enabled = 0;
    detail::preorder(child.root, [&](const Node& n) { enabled += n.weight_enabled ? 1 : 0; });
    CHECK(enabled == 1);

    // toggling off when nothing is enabled copies the parent
    config.mutation_weights = { 0, 1, 0, 0, 0, 0 };
    Program child2 = vary(parent, parent, config, 2, rng);
    int enabled2 = 0;
    detail::preorder(child2.root, [&](const Node& n) { enabled2 += n.weight_enabled ? 1 : 0; });
    CHECK(enabled2 == 0);
}

TEST_CASE("crossover grafts a donor subtree") {
    SearchConfig config;
    config.crossover_probability = 1.0;
    Program a;
    a.root = make_node(Op::Add, { feature(0), feature(1) });
    Program b;
    b.root = make_node(Op::Sin, { constant(7.0) });
    Rng rng(5);
    bool saw_donor_material = false;
    for (int i = 0; i < 100; ++i) {
        Program child = vary(a, b, config, 2, rng);
        detail::preorder(child.root, [&](const Node& n) {
            if (n.op == Op::Sin || (n.op == Op::Constant && n.weight == 7.0))
                saw_donor_material = true;
        });
    }
    CHECK(saw_donor_material);
}

TEST_CASE("classification offspring keep the logistic root") {
    SearchConfig config = clinical_profile();
    config.task = Task::Classification;
    config.max_size = 20;
    config.max_depth = 5;
    Rng rng(6);
    Program parent = classifier(make_node(Op::Add, { feature(0, 1.0, true), constant(0.2) }), 0.1);
    for (int i = 0; i < 2000; ++i) {
        Program child = vary(parent, parent, config, 3, rng);
        REQUIRE(child.root.op == Op::LogisticRoot);
        CHECK_NOTHROW(validate(child, 3));
    }
}

TEST_CASE("insert wraps a subtree in a new operator") {
    SearchConfig config;
    config.functions = { Op::Sin };
    config.crossover_probability = 0.0;
    config.mutation_weights = { 0, 0, 0, 0, 0, 1 }; // insert only
    Program parent;
    parent.root = feature(0);
    Rng rng(7);
    Program child = vary(parent, parent, config, 1, rng);
    REQUIRE(child.size() == 2);
    CHECK(child.root.op == Op::Sin);
    CHECK(child.root.children[0].op == Op::Feature);
}
