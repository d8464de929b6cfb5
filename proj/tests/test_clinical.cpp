#include <filesystem>
#include <fstream>
#include <sstream>

#include <catch2/catch_amalgamated.hpp>

#include <sprig/clinical.hpp>

using namespace sprig;

TEST_CASE("mean arterial pressure formula") {
    CHECK(map_score(120, 80) == Catch::Approx(93.3333333333).epsilon(1e-9));
    CHECK(map_score(90, 60) == 70.0);
    CHECK(map_score(85, 85) == 85.0); // sbp == dbp fixed point
}

TEST_CASE("cart score spot values") {
    CHECK(cart_score(16, 80, 70, 30) == 0);
    CHECK(cart_score(25, 145, 30, 75) == 47); // 12 + 13 + 13 + 9
    CHECK(cart_score(29, 140, 35, 70) == 57); // the maximum
}

TEST_CASE("mews score spot values") {
    CHECK(mews_score(110, 80, 12, 36.5) == 0);
    CHECK(mews_score(65, 135, 32, 39) == 11); // the maximum
    CHECK(mews_score(110, 105, 18, 36.5) == 2); // 0 + 1 + 1 + 0
}

TEST_CASE("deterioration thresholds") {
    CHECK(deterioration_label(12, ScoreSystem::CART) == 1);
    CHECK(deterioration_label(11, ScoreSystem::CART) == 0);
    CHECK(deterioration_label(3, ScoreSystem::MEWS) == 1);
    CHECK(deterioration_label(2, ScoreSystem::MEWS) == 0);
    CHECK(deterioration_label(0, ScoreSystem::MEWS) == 0);
}

namespace {

// component scorers pulled out for edge sweeps
int cart_rr(double v) { return cart_score(v, 80, 70, 30); }
int cart_hr(double v) { return cart_score(16, v, 70, 30); }
int cart_dbp(double v) { return cart_score(16, 80, v, 30); }
int cart_age(double v) { return cart_score(16, 80, 70, v); }
int mews_sbp(double v) { return mews_score(v, 80, 12, 36.5); }
int mews_hr(double v) { return mews_score(110, v, 12, 36.5); }
int mews_rr(double v) { return mews_score(110, 80, v, 36.5); }
int mews_temp(double v) { return mews_score(110, 80, 12, v); }

struct Edge {
    double at;
    int below; // score just under the edge
    int above; // score at/over the edge
};

void check_edges(int (*component)(double), const std::vector<Edge>& edges) {
    for (const auto& e : edges) {
        INFO("edge at " << e.at);
        CHECK(component(e.at - 1e-9) == e.below);
        CHECK(component(e.at) == e.above);
        CHECK(component(e.at + 1e-9) == e.above);
    }
}

} // namespace

TEST_CASE("every cart table edge lands exactly") {
    check_edges(&cart_rr, { { 21, 0, 8 }, { 24, 8, 12 }, { 26, 12, 15 }, { 29, 15, 22 } });
    check_edges(&cart_hr, { { 110, 0, 4 }, { 140, 4, 13 } });
    check_edges(&cart_age, { { 55, 0, 4 }, { 70, 4, 9 } });
    // DBP decreases with severity; the <=35 bound is inclusive as printed
    CHECK(cart_dbp(50) == 0);
    CHECK(cart_dbp(50 - 1e-9) == 4);
    CHECK(cart_dbp(40) == 4);
    CHECK(cart_dbp(40 - 1e-9) == 6);
    CHECK(cart_dbp(35 + 1e-9) == 6);
    CHECK(cart_dbp(35) == 13);
    CHECK(cart_dbp(20) == 13);
}

TEST_CASE("every mews table edge lands exactly") {
    // SBP: <71 -> 3, [71,81) -> 2, [81,101) -> 1, [101,200) -> 0, >=200 -> 2
    CHECK(mews_sbp(71 - 1e-9) == 3);
    CHECK(mews_sbp(71) == 2);
    CHECK(mews_sbp(81 - 1e-9) == 2);
    CHECK(mews_sbp(81) == 1);
    CHECK(mews_sbp(101 - 1e-9) == 1);
    CHECK(mews_sbp(101) == 0);
    CHECK(mews_sbp(200 - 1e-9) == 0);
    CHECK(mews_sbp(200) == 2);

    check_edges(&mews_hr, { { 41, 2, 1 }, { 51, 1, 0 }, { 101, 0, 1 }, { 111, 1, 2 }, { 130, 2, 3 } });
    check_edges(&mews_rr, { { 9, 2, 0 }, { 15, 0, 1 }, { 21, 1, 2 }, { 30, 2, 3 } });
    check_edges(&mews_temp, { { 35, 2, 0 }, { 38.5, 0, 2 } });
}

TEST_CASE("component scores are piecewise constant between the table edges") {
    // fine scan: the score changes only at declared boundaries
    auto scan = [](int (*component)(double), double lo, double hi, std::vector<double> edges) {
        int prev = component(lo);
        for (double v = lo; v <= hi; v += 0.01) {
            const int s = component(v);
            if (s != prev) {
                const double boundary = *std::min_element(
                    edges.begin(), edges.end(),
                    [&](double a, double b) { return std::abs(a - v) < std::abs(b - v); });
                CHECK(std::abs(boundary - v) < 0.011);
                prev = s;
            }
        }
    };
    scan(&cart_rr, 6, 40, { 21, 24, 26, 29 });
    scan(&mews_hr, 30, 180, { 41, 51, 101, 111, 130 });
}

TEST_CASE("generated cart data hits the requested prevalence") {
    ClinicalGenOptions opt;
    opt.n = 10000;
    opt.prevalence = 0.09;
    opt.seed = 123;
    Dataset d = generate_clinical_dataset(ScoreSystem::CART, opt, Task::Classification);
    CHECK(d.rows() == 10000);
    CHECK(d.prevalence() >= 0.08);
    CHECK(d.prevalence() <= 0.10);
    CHECK(d.cols() == 6 + opt.distractors);
}

TEST_CASE("every generated row is self-consistent") {
    ClinicalGenOptions opt;
    opt.n = 500;
    opt.seed = 7;
    for (ScoreSystem system : { ScoreSystem::MAP, ScoreSystem::CART, ScoreSystem::MEWS }) {
        opt.prevalence = 0.2;
        auto frame = generate_clinical_frame(system, opt);
        const std::size_t score_col = frame.columns.size() - (frame.has_label ? 2 : 1);
        for (const auto& row : frame.rows) {
            Vitals v{ row[0], row[1], row[2], row[3], row[4], row[5] };
            CHECK(score_vitals(v, system) == row[score_col]);
            if (frame.has_label)
                CHECK(deterioration_label(static_cast<int>(row[score_col]), system) == row.back());
            CHECK(v.dbp < v.sbp);
            CHECK(v.sbp >= 60);
            CHECK(v.sbp <= 220);
            CHECK(v.resp_rate >= 6);
            CHECK(v.resp_rate <= 40);
        }
    }
}

TEST_CASE("a fixed seed writes a byte-identical csv") {
    namespace fs = std::filesystem;
    ClinicalGenOptions opt;
    opt.n = 300;
    opt.seed = 99;
    opt.prevalence = 0.11;
    auto read = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    auto p1 = fs::temp_directory_path() / "sprig_gen_a.csv";
    auto p2 = fs::temp_directory_path() / "sprig_gen_b.csv";
    write_csv(generate_clinical_frame(ScoreSystem::MEWS, opt), p1.string());
    write_csv(generate_clinical_frame(ScoreSystem::MEWS, opt), p2.string());
    CHECK(read(p1) == read(p2));
    CHECK(!read(p1).empty());
    fs::remove(p1);
    fs::remove(p2);
}

TEST_CASE("map frames carry no label and reject classification") {
    ClinicalGenOptions opt;
    opt.n = 200;
    auto frame = generate_clinical_frame(ScoreSystem::MAP, opt);
    CHECK(!frame.has_label);
    CHECK_THROWS_AS(frame_to_dataset(frame, Task::Classification), ConfigError);
    Dataset d = frame_to_dataset(frame, Task::Regression);
    for (std::size_t i = 0; i < d.rows(); ++i)
        CHECK(d.y[i] == map_score(d.X(i, 0), d.X(i, 1)));
}
