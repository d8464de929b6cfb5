#include <catch2/catch_amalgamated.hpp>

#include <sprig/program.hpp>

using namespace sprig;

TEST_CASE("size and depth") {
    Program p;
    p.root = make_node(Op::Add, { feature(0), make_node(Op::Sin, { feature(1) }) });
    CHECK(p.size() == 4);
    CHECK(p.depth() == 2);

    Program leaf;
    leaf.root = constant(2.0);
    CHECK(leaf.size() == 1);
    CHECK(leaf.depth() == 0);
}

TEST_CASE("param extraction order is pre-order and round-trips bit-exactly") {
    Program p;
    p.root = split_greedy(0, 1.25,
                          make_node(Op::Mul, { feature(1, 0.3, true), constant(2.5) }),
                          feature(2, -7.125, true));
    p.root.weight = 0.75;
    p.root.weight_enabled = true;

    auto theta = extract_params(p);
    // pre-order: split weight, split threshold, mul-child weights/constants, false-branch weight
    REQUIRE(theta.size() == 5);
    CHECK(theta[0] == 0.75);
    CHECK(theta[1] == 1.25);
    CHECK(theta[2] == 0.3);
    CHECK(theta[3] == 2.5);
    CHECK(theta[4] == -7.125);

    std::vector<double> replaced = { 1.0, 2.0, 3.0, 0x1.23456789abcdfp-3, 5.0 };
    inject_params(p, replaced);
    CHECK(extract_params(p) == replaced);

    CHECK_THROWS_AS(inject_params(p, std::vector<double>{ 1.0 }), StructuralError);
}

TEST_CASE("logistic offset participates in the parameter vector") {
    Program p = classifier(feature(0, 2.0, true), 0.5);
    auto theta = extract_params(p);
    REQUIRE(theta.size() == 2); // offset, then feature weight
    CHECK(theta[0] == 0.5);
    CHECK(theta[1] == 2.0);
}

TEST_CASE("validate rejects structural violations") {
    Program ok;
    ok.root = make_node(Op::Add, { feature(0), feature(1) });
    CHECK_NOTHROW(validate(ok, 2));
    CHECK_THROWS_AS(validate(ok, 1), StructuralError); // feature 1 out of bounds

    Program logistic_below;
    logistic_below.task = Task::Classification;
    logistic_below.root = make_node(Op::LogisticRoot, { feature(0) });
    Node inner = make_node(Op::LogisticRoot, { feature(0) });
    logistic_below.root.children[0] = make_node(Op::Sin, { inner });
    CHECK_THROWS_AS(validate(logistic_below, 2), StructuralError);

    Program logistic_regression;
    logistic_regression.task = Task::Regression;
    logistic_regression.root = make_node(Op::LogisticRoot, { feature(0) });
    CHECK_THROWS_AS(validate(logistic_regression, 2), StructuralError);

    CHECK_THROWS_AS(make_node(Op::Add, { feature(0) }), StructuralError);
}

TEST_CASE("frozen subtrees drop out of the trainable set") {
    Program p;
    p.root = make_node(Op::Add, { feature(0, 2.0, true), feature(1, 3.0, true) });
    freeze_subtree(p.root.children[0]);
    // extract_params still reports everything
    CHECK(extract_params(p).size() == 2);
    clear_frozen(p.root);
    CHECK(!p.root.children[0].frozen);
}
