#include <catch2/catch_amalgamated.hpp>

#include <sprig/metrics.hpp>
#include <sprig/search.hpp>
#include <sprig/serialize.hpp>

using namespace sprig;

namespace {

Dataset identity_dataset(std::size_t d, std::uint64_t seed) {
    Rng rng(seed);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    Dataset data;
    data.task = Task::Regression;
    data.feature_names = { "x0", "x1", "x2" };
    data.X = Matrix(d, 3);
    data.y.resize(d);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t c = 0; c < 3; ++c) data.X(i, c) = u(rng);
        data.y[i] = data.X(i, 0);
    }
    return data;
}

SearchConfig small_config() {
    SearchConfig config;
    config.pop_size = 30;
    config.max_gens = 10;
    config.max_depth = 5;
    config.max_size = 16;
    config.functions = { Op::Add, Op::Sub, Op::Mul, Op::Div };
    config.lm.max_iterations = 5;
    config.split_seeded_init = false;
    config.seed = 42;
    return config;
}

} // namespace

TEST_CASE("identity target is learned within a few generations") {
    Dataset train = identity_dataset(200, 1);
    Dataset test = identity_dataset(100, 2);
    auto result = run(small_config(), train);
    auto pred = evaluate(result.best, test.X);
    CHECK(r2(test.y, pred) >= 0.999);
}

TEST_CASE("a fixed seed reproduces the final model document exactly") {
    Dataset train = identity_dataset(150, 3);
    SearchConfig config = small_config();
    config.max_gens = 5;
    auto a = run(config, train);
    auto b = run(config, train);
    CHECK(to_json_string(a.best) == to_json_string(b.best));
    REQUIRE(a.history.size() == b.history.size());
    for (std::size_t g = 0; g < a.history.size(); ++g) {
        CHECK(a.history[g].best_loss == b.history[g].best_loss);
        CHECK(a.history[g].median_loss == b.history[g].median_loss);
        CHECK(a.history[g].front_size == b.history[g].front_size);
    }
}

TEST_CASE("worker count does not change the outcome") {
    Dataset train = identity_dataset(120, 4);
    SearchConfig config = small_config();
    config.max_gens = 4;
    config.workers = 1;
    auto serial = run(config, train);
    config.workers = 2;
    auto parallel = run(config, train);
    CHECK(to_json_string(serial.best) == to_json_string(parallel.best));
}

TEST_CASE("best rank-0 loss is non-increasing across generations") {
    Dataset train = identity_dataset(150, 5);
    SearchConfig config = small_config();
    config.max_gens = 8;
    auto result = run(config, train);
    for (std::size_t g = 1; g < result.history.size(); ++g)
        CHECK(result.history[g].best_loss <= result.history[g - 1].best_loss + 1e-15);
}

TEST_CASE("per-generation records arrive through the callback") {
    Dataset train = identity_dataset(100, 6);
    SearchConfig config = small_config();
    config.max_gens = 3;
    std::vector<GenerationStats> seen;
    run(config, train, [&](const GenerationStats& s) { seen.push_back(s); });
    REQUIRE(seen.size() == 4); // init + 3 generations
    for (std::size_t g = 0; g < seen.size(); ++g) {
        CHECK(seen[g].generation == g);
        CHECK(seen[g].front_size >= 1);
    }
}

TEST_CASE("archive holds only rank-0 individuals and the best is among them") {
    Dataset train = identity_dataset(100, 7);
    auto result = run(small_config(), train);
    REQUIRE(!result.archive.empty());
    const std::string best_doc = to_json_string(result.best);
    bool found = false;
    for (const auto& ind : result.archive) {
        CHECK(ind.rank == 0);
        if (to_json_string(ind.program) == best_doc) found = true;
    }
    CHECK(found);
}

TEST_CASE("classification run produces a logistic-rooted model") {
    Rng rng(8);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    Dataset data;
    data.task = Task::Classification;
    data.feature_names = { "a", "b" };
    data.X = Matrix(240, 2);
    data.y.resize(240);
    for (std::size_t i = 0; i < 240; ++i) {
        data.X(i, 0) = u(rng);
        data.X(i, 1) = u(rng);
        data.y[i] = data.X(i, 0) > 0.3 ? 1.0 : 0.0;
    }
    SearchConfig config = small_config();
    config.functions = { Op::Add, Op::Sub, Op::Mul, Op::SplitGreedy, Op::SplitFlexible };
    config.split_seeded_init = true;
    config.max_gens = 5;
    auto result = run(config, data);
    CHECK(result.best.root.op == Op::LogisticRoot);
    auto pred = evaluate(result.best, data.X);
    CHECK(auprc(data.y, pred) > 0.9);
}
