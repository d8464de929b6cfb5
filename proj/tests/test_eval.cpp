#include <catch2/catch_amalgamated.hpp>

#include <sprig/eval.hpp>

using namespace sprig;

namespace {

Matrix column_matrix(std::initializer_list<std::vector<double>> cols) {
    const std::size_t rows = cols.begin()->size();
    Matrix X(rows, cols.size());
    std::size_t c = 0;
    for (const auto& col : cols) {
        for (std::size_t r = 0; r < rows; ++r) X(r, c) = col[r];
        ++c;
    }
    return X;
}

} // namespace

TEST_CASE("weight scaling on a terminal") {
    Program p;
    p.root = feature(0, 2.0, true);
    auto out = evaluate(p, column_matrix({ { 1.0, 3.0 } }));
    CHECK(out == std::vector<double>{ 2.0, 6.0 });
}

TEST_CASE("greedy split routes rows by condition > tau") {
    Program p;
    p.root = split_greedy(0, 2.5, constant(1.0), constant(0.0));
    auto out = evaluate(p, column_matrix({ { 1.0, 2.0, 3.0, 4.0 } }));
    CHECK(out == std::vector<double>{ 0.0, 0.0, 1.0, 1.0 });
}

TEST_CASE("logistic root at zero returns one half") {
    Program p = classifier(constant(0.0), 0.0);
    auto out = evaluate(p, column_matrix({ { -5.0, 0.0, 7.0 } }));
    for (double v : out) CHECK(v == 0.5);
}

TEST_CASE("flexible split uses its condition subtree") {
    // condition x0 - x1 > 0 picks max(x0, x1)-ish routing
    Program p;
    p.root = split_flexible(make_node(Op::Sub, { feature(0), feature(1) }), 0.0,
                            feature(0), feature(1));
    auto out = evaluate(p, column_matrix({ { 5.0, 1.0 }, { 2.0, 9.0 } }));
    CHECK(out == std::vector<double>{ 5.0, 9.0 });
}

TEST_CASE("routing partitions the rows reaching a split") {
    // true branch counts +1, false branch counts -1: every row gets exactly one
    Program p;
    p.root = split_greedy(0, 0.37, constant(1.0), constant(-1.0));
    Rng rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Matrix X(257, 1);
    std::size_t expect_true = 0;
    for (std::size_t r = 0; r < X.rows(); ++r) {
        X(r, 0) = u(rng);
        if (X(r, 0) > 0.37) ++expect_true;
    }
    auto out = evaluate(p, X);
    std::size_t got_true = 0, got_false = 0;
    for (double v : out) (v > 0 ? got_true : got_false)++;
    CHECK(got_true == expect_true);
    CHECK(got_true + got_false == X.rows());
}

TEST_CASE("evaluation is deterministic") {
    Program p;
    p.root = make_node(Op::Mul, { make_node(Op::Sin, { feature(0, 1.3, true) }),
                                  make_node(Op::Exp, { feature(1) }) });
    Matrix X = column_matrix({ { 0.1, 0.5, 0.9 }, { -1.0, 0.0, 2.0 } });
    CHECK(evaluate(p, X) == evaluate(p, X));
}

TEST_CASE("protected operations propagate non-finite values") {
    Program logp;
    logp.root = make_node(Op::Log, { feature(0) });
    auto out = evaluate(logp, column_matrix({ { -1.0, 0.0, 1.0 } }));
    CHECK(std::isnan(out[0]));
    CHECK(std::isinf(out[1]));
    CHECK(out[2] == 0.0);

    Program divp;
    divp.root = make_node(Op::Div, { constant(1.0), feature(0) });
    auto dout = evaluate(divp, column_matrix({ { 0.0, 2.0 } }));
    CHECK(std::isinf(dout[0]));
    CHECK(dout[1] == 0.5);
}

TEST_CASE("non-finite condition values yield non-finite outputs") {
    Program p;
    p.root = split_flexible(make_node(Op::Log, { feature(0) }), 0.0, constant(1.0), constant(2.0));
    auto out = evaluate(p, column_matrix({ { -1.0, 5.0 } }));
    CHECK(std::isnan(out[0]));
    CHECK(out[1] == 1.0); // log(5) > 0
}

TEST_CASE("structural and input errors") {
    Program p;
    p.root = feature(3);
    CHECK_THROWS_AS(evaluate(p, column_matrix({ { 1.0, 2.0 } })), StructuralError);
    Program ok;
    ok.root = feature(0);
    CHECK_THROWS_AS(evaluate(ok, Matrix()), InputError);
}

TEST_CASE("rounding operators") {
    Program p;
    p.root = make_node(Op::Ceil, { feature(0) });
    CHECK(evaluate(p, column_matrix({ { 1.2, -1.2 } })) == std::vector<double>{ 2.0, -1.0 });
    p.root = make_node(Op::Floor, { feature(0) });
    CHECK(evaluate(p, column_matrix({ { 1.8, -1.2 } })) == std::vector<double>{ 1.0, -2.0 });
}

TEST_CASE("min max pow binary ops") {
    Matrix X = column_matrix({ { 2.0, 3.0 }, { 5.0, 1.0 } });
    Program p;
    p.root = make_node(Op::Min, { feature(0), feature(1) });
    CHECK(evaluate(p, X) == std::vector<double>{ 2.0, 1.0 });
    p.root = make_node(Op::Max, { feature(0), feature(1) });
    CHECK(evaluate(p, X) == std::vector<double>{ 5.0, 3.0 });
    p.root = make_node(Op::Pow, { feature(0), feature(1) });
    CHECK(evaluate(p, X) == std::vector<double>{ 32.0, 3.0 });
}
