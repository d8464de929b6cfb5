#pragma once

#include <filesystem>

#include "clinical.hpp"
#include "metrics.hpp"
#include "search.hpp"
#include "serialize.hpp"
#include "simplify.hpp"

namespace sprig {

struct BenchProblem {
    std::string name;
    std::string csv_path;
    std::string target = "target";
    Task task = Task::Regression;
};

struct NamedConfig {
    std::string name;
    SearchConfig config;
};

struct BenchOptions {
    std::vector<double> noise_levels = { 0.0 };
    std::size_t repeats = 1;
    std::uint64_t seed = 0;
    double train_fraction = 0.75;
    bool simplify = true;
    double simplify_tol = 1e-6;
    std::size_t workers = 1; // parallel runs; per-run fitting honors config.workers
};

namespace detail {

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

inline double sample_sd(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

inline double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    return v[n / 2 - 1] + 0.5 * (v[n / 2] - v[n / 2 - 1]);
}

} // namespace detail

// Problems are the *.csv files of a directory (sorted by name); an optional
// "<stem>.meta.json" sidecar names the target column and task, otherwise
// the last column is a regression target.
inline std::vector<BenchProblem> discover_problems(const std::string& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw InputError("suite directory not found: " + dir);
    std::vector<BenchProblem> problems;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".csv")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& path : files) {
        BenchProblem p;
        p.name = path.stem().string();
        p.csv_path = path.string();
        fs::path meta = path;
        meta.replace_extension(".meta.json");
        if (fs::exists(meta)) {
            std::ifstream in(meta);
            Json j = Json::parse(in, nullptr, false);
            if (j.is_discarded()) throw ParseError("invalid sidecar: " + meta.string());
            if (j.contains("target")) p.target = j["target"].get<std::string>();
            if (j.contains("task")) p.task = task_from_name(j["task"].get<std::string>());
        } else {
            std::ifstream in(path);
            std::string header;
            std::getline(in, header);
            auto pos = header.find_last_of(',');
            p.target = pos == std::string::npos ? header : header.substr(pos + 1);
            while (!p.target.empty() && (p.target.back() == '\r' || p.target.back() == '\n'))
                p.target.pop_back();
        }
        problems.push_back(std::move(p));
    }
    if (problems.empty()) throw InputError("no .csv problems in " + dir);
    return problems;
}

struct BenchOutput {
    std::vector<Json> records; // one per run, timing-free
    std::vector<Json> timings; // wall clock per run, kept out of the report
    Json report;
    std::string summary_md;
};

// Aggregation is a pure function of the records, so a report can be
// regenerated from a persisted records file bit-identically.
inline Json aggregate_records(std::span<const Json> records) {
    struct Key {
        std::string config, problem;
        double noise;
    };
    std::vector<Key> keys;
    auto key_index = [&](const Json& r) {
        Key k{ r["config"].get<std::string>(), r["problem"].get<std::string>(),
               r["noise"].get<double>() };
        for (std::size_t i = 0; i < keys.size(); ++i)
            if (keys[i].config == k.config && keys[i].problem == k.problem && keys[i].noise == k.noise)
                return i;
        keys.push_back(k);
        return keys.size() - 1;
    };

    std::vector<std::vector<const Json*>> groups;
    for (const auto& r : records) {
        const std::size_t i = key_index(r);
        if (i == groups.size()) groups.emplace_back();
        groups[i].push_back(&r);
    }

    Json rows = Json::array();
    for (std::size_t i = 0; i < groups.size(); ++i) {
        Json row;
        row["config"] = keys[i].config;
        row["problem"] = keys[i].problem;
        row["noise"] = keys[i].noise;
        row["runs"] = groups[i].size();
        row["task"] = (*groups[i].front())["task"];
        auto stat = [&](const char* field) {
            std::vector<double> v;
            for (const Json* r : groups[i])
                if (r->contains(field)) v.push_back((*r)[field].get<double>());
            Json s;
            s["mean"] = detail::mean_of(v);
            s["sd"] = detail::sample_sd(v);
            return s;
        };
        const bool cls = row["task"] == "classification";
        if (cls) {
            row["auprc_test"] = stat("auprc_test");
            row["balanced_accuracy_test"] = stat("balanced_accuracy_test");
        } else {
            row["r2_test"] = stat("r2_test");
        }
        row["size"] = stat("size");
        row["complexity"] = stat("complexity");
        rows.push_back(std::move(row));
    }

    // Accuracy-solution rate per (config, noise) over regression runs.
    Json acc = Json::array();
    std::vector<std::pair<std::string, double>> seen;
    for (const auto& r : records) {
        if (r["task"] != "regression") continue;
        auto key = std::make_pair(r["config"].get<std::string>(), r["noise"].get<double>());
        if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
        seen.push_back(key);
        std::vector<double> r2s;
        for (const auto& s : records)
            if (s["task"] == "regression" && s["config"] == key.first && s["noise"] == key.second)
                r2s.push_back(s["r2_test"].get<double>());
        Json row;
        row["config"] = key.first;
        row["noise"] = key.second;
        row["runs"] = r2s.size();
        row["rate"] = accuracy_solution(r2s);
        acc.push_back(std::move(row));
    }

    // Pareto table: rank configs by median test R^2 (regression runs) and
    // by median model size (all runs).
    std::vector<std::string> configs;
    for (const auto& r : records) {
        auto c = r["config"].get<std::string>();
        if (std::find(configs.begin(), configs.end(), c) == configs.end()) configs.push_back(c);
    }
    std::vector<double> med_r2(configs.size(), 0.0), med_size(configs.size(), 0.0);
    std::vector<bool> has_r2(configs.size(), false);
    for (std::size_t i = 0; i < configs.size(); ++i) {
        std::vector<double> r2s, sizes;
        for (const auto& r : records) {
            if (r["config"] != configs[i]) continue;
            sizes.push_back(r["size"].get<double>());
            if (r["task"] == "regression") r2s.push_back(r["r2_test"].get<double>());
        }
        has_r2[i] = !r2s.empty();
        med_r2[i] = detail::median_of(r2s);
        med_size[i] = detail::median_of(sizes);
    }
    Json pareto = Json::array();
    for (std::size_t i = 0; i < configs.size(); ++i) {
        int r2_rank = 1, size_rank = 1;
        for (std::size_t j = 0; j < configs.size(); ++j) {
            if (j == i) continue;
            if (has_r2[i] && has_r2[j] && med_r2[j] > med_r2[i]) ++r2_rank;
            if (med_size[j] < med_size[i]) ++size_rank;
        }
        Json row;
        row["config"] = configs[i];
        if (has_r2[i]) {
            row["median_r2"] = med_r2[i];
            row["r2_rank"] = r2_rank;
        }
        row["median_size"] = med_size[i];
        row["size_rank"] = size_rank;
        pareto.push_back(std::move(row));
    }

    Json report;
    report["rows"] = std::move(rows);
    report["accuracy_solution"] = std::move(acc);
    report["pareto"] = std::move(pareto);
    return report;
}

inline std::string summary_markdown(const Json& report) {
    std::ostringstream md;
    md << "# Benchmark summary\n\n";
    md << "| problem | config | noise | metric | mean +/- sd | size mean +/- sd |\n";
    md << "|---|---|---|---|---|---|\n";
    char buf[128];
    for (const auto& row : report["rows"]) {
        const bool cls = row["task"] == "classification";
        const char* metric = cls ? "AUPRC" : "R2";
        const auto& m = cls ? row["auprc_test"] : row["r2_test"];
        std::snprintf(buf, sizeof buf, "%.4f +/- %.4f", m["mean"].get<double>(), m["sd"].get<double>());
        md << "| " << row["problem"].get<std::string>() << " | " << row["config"].get<std::string>()
           << " | " << row["noise"].get<double>() << " | " << metric << " | " << buf;
        std::snprintf(buf, sizeof buf, "%.1f +/- %.1f", row["size"]["mean"].get<double>(),
                      row["size"]["sd"].get<double>());
        md << " | " << buf << " |\n";
    }
    if (!report["accuracy_solution"].empty()) {
        md << "\n## Accuracy-solution rate (R^2 > 0.999)\n\n";
        md << "| config | noise | rate | runs |\n|---|---|---|---|\n";
        for (const auto& row : report["accuracy_solution"]) {
            std::snprintf(buf, sizeof buf, "%.3f", row["rate"].get<double>());
            md << "| " << row["config"].get<std::string>() << " | " << row["noise"].get<double>()
               << " | " << buf << " | " << row["runs"].get<std::size_t>() << " |\n";
        }
    }
    md << "\n## Pareto ranks\n\n";
    md << "| config | median R2 | R2 rank | median size | size rank |\n|---|---|---|---|---|\n";
    for (const auto& row : report["pareto"]) {
        md << "| " << row["config"].get<std::string>() << " | ";
        if (row.contains("median_r2")) {
            std::snprintf(buf, sizeof buf, "%.4f", row["median_r2"].get<double>());
            md << buf << " | " << row["r2_rank"].get<int>() << " | ";
        } else {
            md << "- | - | ";
        }
        std::snprintf(buf, sizeof buf, "%.1f", row["median_size"].get<double>());
        md << buf << " | " << row["size_rank"].get<int>() << " |\n";
    }
    return md.str();
}

// One search per (config, problem, noise level, repeat). Noise perturbs the
// training targets only; test metrics use the clean targets. Classification
// problems run at zero noise. Runs are scheduled concurrently up to the
// worker limit and the outputs assembled in run order, so reports do not
// depend on scheduling.
inline BenchOutput run_suite(const std::vector<BenchProblem>& problems,
                             const std::vector<NamedConfig>& configs,
                             const BenchOptions& options) {
    if (configs.empty()) throw ConfigError("run_suite: no configurations");

    struct RunSpec {
        std::size_t config_idx, problem_idx, repeat;
        double noise;
    };
    std::vector<RunSpec> specs;
    for (std::size_t c = 0; c < configs.size(); ++c)
        for (std::size_t p = 0; p < problems.size(); ++p) {
            const bool cls = problems[p].task == Task::Classification;
            std::vector<double> levels = cls ? std::vector<double>{ 0.0 } : options.noise_levels;
            for (double noise : levels)
                for (std::size_t r = 0; r < options.repeats; ++r)
                    specs.push_back({ c, p, r, noise });
        }

    std::vector<Dataset> datasets(problems.size());
    for (std::size_t p = 0; p < problems.size(); ++p)
        datasets[p] = load_csv(problems[p].csv_path, problems[p].target, problems[p].task);

    std::vector<Json> records(specs.size());
    std::vector<Json> timings(specs.size());

    parallel_for(specs.size(), options.workers, [&](std::size_t k) {
        const auto& spec = specs[k];
        const auto& problem = problems[spec.problem_idx];
        const auto& dataset = datasets[spec.problem_idx];

        const std::uint64_t run_seed =
            splitmix64(options.seed ^ detail::fnv1a(problem.name) ^
                       detail::fnv1a(configs[spec.config_idx].name) ^
                       splitmix64((std::uint64_t)(spec.repeat * 7919 + 13) ^
                                  (std::uint64_t)std::llround(spec.noise * 1e9)));

        Json rec;
        rec["problem"] = problem.name;
        rec["config"] = configs[spec.config_idx].name;
        rec["task"] = std::string(task_name(problem.task));
        rec["noise"] = spec.noise;
        rec["repeat"] = spec.repeat;
        rec["seed"] = run_seed;

        const auto t0 = std::chrono::steady_clock::now();
        try {
            SplitSpec split_spec;
            split_spec.train_fraction = options.train_fraction;
            split_spec.stratified = problem.task == Task::Classification;
            split_spec.seed = splitmix64(run_seed ^ 0x73706c6974ULL);
            auto [train, test] = split(dataset, split_spec);

            std::vector<double> clean_train_y = train.y;
            if (spec.noise > 0.0 && problem.task == Task::Regression) {
                Rng noise_rng = derive_rng(run_seed, 0x6e6f697365ULL);
                train.y = add_target_noise(train.y, spec.noise, noise_rng);
            }

            SearchConfig config = configs[spec.config_idx].config;
            config.seed = run_seed;
            config.task = problem.task;
            auto search_result = run(config, train);
            Program model = search_result.best;

            if (options.simplify) {
                std::vector<Program> population;
                population.reserve(search_result.archive.size());
                for (const auto& ind : search_result.archive) population.push_back(ind.program);
                auto index = build_index(population, train.X, 1e-8, 64, config.complexity);
                model = simplify_program(model, index, train.X, train.y, options.simplify_tol);
            }

            auto pred_test = evaluate(model, test.X);
            auto pred_train = evaluate(model, train.X);
            if (problem.task == Task::Classification) {
                rec["auprc_test"] = auprc(test.y, pred_test);
                std::vector<double> labels(pred_test.size());
                for (std::size_t i = 0; i < pred_test.size(); ++i)
                    labels[i] = pred_test[i] > 0.5 ? 1.0 : 0.0;
                rec["balanced_accuracy_test"] = balanced_accuracy(test.y, labels);
                rec["auprc_train"] = auprc(clean_train_y, pred_train);
            } else {
                rec["r2_test"] = r2(test.y, pred_test);
                rec["r2_train"] = r2(clean_train_y, pred_train);
            }
            rec["size"] = static_cast<double>(model.size());
            rec["complexity"] = model.complexity(config.complexity);
            rec["model"] = serialize(model, config.complexity);
        } catch (const std::exception& e) {
            rec["error"] = e.what(); // suite continues; run recorded as failed
        }
        const auto t1 = std::chrono::steady_clock::now();

        Json timing;
        timing["problem"] = rec["problem"];
        timing["config"] = rec["config"];
        timing["noise"] = rec["noise"];
        timing["repeat"] = rec["repeat"];
        timing["wall_time_s"] = std::chrono::duration<double>(t1 - t0).count();
        records[k] = std::move(rec);
        timings[k] = std::move(timing);
    });

    BenchOutput out;
    std::vector<Json> ok;
    for (auto& r : records)
        if (!r.contains("error")) ok.push_back(r);
    out.report = aggregate_records(ok);
    out.summary_md = summary_markdown(out.report);
    out.records = std::move(records);
    out.timings = std::move(timings);
    return out;
}

// records.jsonl / report.json / summary.md are byte-stable for a fixed
// seed; wall-clock timings live in their own sidecar.
inline void write_bench_output(const BenchOutput& out, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    {
        std::ofstream f(fs::path(dir) / "records.jsonl", std::ios::binary);
        for (const auto& r : out.records) f << r.dump() << '\n';
    }
    {
        std::ofstream f(fs::path(dir) / "timings.jsonl", std::ios::binary);
        for (const auto& t : out.timings) f << t.dump() << '\n';
    }
    {
        std::ofstream f(fs::path(dir) / "report.json", std::ios::binary);
        f << out.report.dump(2) << '\n';
    }
    {
        std::ofstream f(fs::path(dir) / "summary.md", std::ios::binary);
        f << out.summary_md;
    }
}

} // namespace sprig
