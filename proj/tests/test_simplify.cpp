#include <catch2/catch_amalgamated.hpp>

#include <sprig/fit.hpp>
#include <sprig/generate.hpp>
#include <sprig/serialize.hpp>
#include <sprig/simplify.hpp>

using namespace sprig;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng, double lo = 0.0, double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    Matrix X(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) X(r, c) = u(rng);
    return X;
}

} // namespace

TEST_CASE("redundant weighted copy keys with the bare terminal") {
    Rng rng(1);
    Matrix X = random_matrix(100, 2, rng);

    Program bare;
    bare.root = feature(0);
    Program dressed;
    dressed.root = make_node(Op::Add, { feature(0, 1.0, true), constant(0.0) });

    std::vector<Program> population = { dressed, bare };
    auto index = build_index(population, X);
    // the whole dressed tree and the bare terminal share a key; lookup under
    // the dressed tree's complexity finds the strictly simpler terminal
    auto key = index.key_for(dressed.root, X);
    REQUIRE(key);
    const Node* candidate = index.lookup(*key, linear_complexity(dressed.root, index.table()));
    REQUIRE(candidate);
    CHECK(candidate->op == Op::Feature);

    Program simplified = simplify_program(dressed, index, X, std::vector<double>(100, 0.0), 1e-9);
    CHECK(simplified.root.op == Op::Feature);
    CHECK(simplified.size() == 1);
}

TEST_CASE("empty population builds an empty index") {
    Rng rng(2);
    Matrix X = random_matrix(10, 1, rng);
    auto index = build_index(std::vector<Program>{}, X);
    CHECK(index.entries() == 0);
}

TEST_CASE("retained candidate per key has minimal complexity") {
    Rng rng(3);
    Matrix X = random_matrix(64, 3, rng, 0.5, 2.0);
    SearchConfig config = srbench_profile();
    config.max_size = 15;

    std::vector<Program> population;
    for (int i = 0; i < 50; ++i) population.push_back(generate_random(config, rng, 3, 5, 15));
    auto index = build_index(population, X);

    // exhaustive re-scan: no subtree with the same key may be simpler
    for (const auto& p : population) {
        detail::preorder(p.root, [&](const Node& n) {
            auto key = index.key_for(n, X);
            if (!key) return;
            const long long c = linear_complexity(n, index.table());
            const Node* better = index.lookup(*key, c);
            if (better)
                CHECK(linear_complexity(*better, index.table()) < c);
            // and the retained entry is never worse than any member
            const Node* entry = index.lookup(*key, std::numeric_limits<long long>::max());
            REQUIRE(entry);
            CHECK(linear_complexity(*entry, index.table()) <= c);
        });
    }
}

TEST_CASE("split with identical constant branches collapses") {
    Rng rng(4);
    Matrix X = random_matrix(80, 2, rng);
    Program p;
    p.root = split_greedy(0, 0.5, constant(2.5), constant(2.5));

    std::vector<Program> population = { p };
    auto index = build_index(population, X);
    Program simplified = simplify_program(p, index, X, std::vector<double>(80, 0.0), 1e-9);
    CHECK(simplified.root.op == Op::Constant);
    CHECK(simplified.size() == 1);
    auto before = evaluate(p.root, X, all_rows(80));
    auto after = evaluate(simplified.root, X, all_rows(80));
    CHECK(before == after);
}

TEST_CASE("an already-minimal terminal is unchanged") {
    Rng rng(5);
    Matrix X = random_matrix(40, 1, rng);
    Program p;
    p.root = feature(0);
    auto index = build_index(std::vector<Program>{ p }, X);
    Program simplified = simplify_program(p, index, X, std::vector<double>(40, 0.0), 1e-9);
    CHECK(to_json_string(simplified) == to_json_string(p));
}

TEST_CASE("pass-through splits are removed") {
    Rng rng(6);
    Matrix X = random_matrix(30, 2, rng);
    Program p;
    p.root = split_greedy(0, kPassThroughThreshold, feature(1, 2.0, true), constant(9.0));
    auto index = build_index(std::vector<Program>{ p }, X);
    Program simplified = simplify_program(p, index, X, std::vector<double>(30, 0.0), 1e-9);
    CHECK(simplified.root.op == Op::Feature);
    CHECK(simplified.root.weight == 2.0);
}

TEST_CASE("near-one weights and near-zero additive constants dissolve") {
    Rng rng(7);
    Matrix X = random_matrix(50, 1, rng, 0.5, 2.0);
    Program p;
    p.root = make_node(Op::Add, { feature(0, 1.0 + 1e-12, true), constant(1e-12) });
    auto index = build_index(std::vector<Program>{ p }, X, 1e-8);
    Program simplified = simplify_program(p, index, X, std::vector<double>(50, 0.0), 1e-6);
    CHECK(simplified.root.op == Op::Feature);
    CHECK(!simplified.root.weight_enabled);
}

TEST_CASE("complexity never increases, drift stays bounded, and the result is idempotent") {
    Rng rng(8);
    SearchConfig config = srbench_profile();
    config.max_size = 20;
    config.max_depth = 5;
    const double tol = 1e-6;

    Matrix X = random_matrix(120, 3, rng, 0.5, 2.0);
    std::vector<double> y(120);
    for (std::size_t i = 0; i < 120; ++i)
        y[i] = 2.0 * X(i, 0) + X(i, 1) * X(i, 2);

    std::vector<Program> population;
    for (int i = 0; i < 60; ++i) {
        Program p = generate_random(config, rng, 3, 5, 20);
        fit_program(p, X, y, config.fit_options());
        population.push_back(std::move(p));
    }
    auto index = build_index(population, X);

    int substituted = 0;
    for (const auto& p : population) {
        Program s = simplify_program(p, index, X, y, tol);
        CHECK(s.complexity(index.table()) <= p.complexity(index.table()));

        auto before = evaluate(p.root, X, all_rows(120));
        auto after = evaluate(s.root, X, all_rows(120));
        // crude substitution-count bound: every node could have been replaced
        const double bound = tol * static_cast<double>(p.size());
        for (std::size_t i = 0; i < before.size(); ++i) {
            if (!std::isfinite(before[i])) continue;
            CHECK(std::abs(before[i] - after[i]) <= bound);
        }

        Program twice = simplify_program(s, index, X, y, tol);
        CHECK(to_json_string(twice) == to_json_string(s));
        if (s.size() < p.size()) ++substituted;
    }
    CHECK(substituted > 0); // the exercise actually simplified something
}
