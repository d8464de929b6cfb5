// Command-line front end: fit / predict / score-gen / bench / simplify / export.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include <sprig/sprig.hpp>

namespace fs = std::filesystem;
using namespace sprig;

namespace {

std::size_t default_workers() {
    if (const char* env = std::getenv("SPRIG_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    }
    return 1;
}

struct ConfigFlags {
    std::string profile = "clinical";
    std::string config_file;
    std::string functions;
    std::size_t pop = 0, gens = 0, max_depth = 0, max_size = 0;
    int lm_iters = -1;
    double crossover = -1.0, validation_fraction = -1.0, constant_prob = -1.0;
    int split_seeded = -1; // tri-state: unset / off / on
    bool no_splits = false;
    bool weighted_split_objective = false;
    std::size_t workers = default_workers();
    std::uint64_t seed = 0;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--profile", profile, "Hyperparameter profile: clinical | srbench")
            ->check(CLI::IsMember({ "clinical", "srbench" }));
        cmd->add_option("--config", config_file, "JSON config file (flags take precedence)");
        cmd->add_option("--pop", pop, "Population size");
        cmd->add_option("--gens", gens, "Number of generations");
        cmd->add_option("--max-depth", max_depth, "Maximum tree depth");
        cmd->add_option("--max-size", max_size, "Maximum tree size (node count)");
        cmd->add_option("--lm-iters", lm_iters, "Local optimization iterations");
        cmd->add_option("--crossover-prob", crossover, "Crossover probability");
        cmd->add_option("--validation-fraction", validation_fraction,
                        "Internal holdout fraction for final-model selection");
        cmd->add_option("--constant-prob", constant_prob, "Terminal constant probability");
        cmd->add_option("--functions", functions,
                        "Comma-separated operator set (e.g. add,sub,mul,div,split)");
        cmd->add_flag("--split-seeded{1},--no-split-seeded{0}", split_seeded,
                      "Seed the initial population with greedy split trees");
        cmd->add_flag("--no-splits", no_splits, "Disable split operators");
        cmd->add_flag("--weighted-split-objective", weighted_split_objective,
                      "Use the weighted-impurity split objective");
        cmd->add_option("--workers", workers, "Worker threads (env SPRIG_WORKERS)");
        cmd->add_option("--seed", seed, "Random seed");
    }

    static std::vector<Op> parse_functions(const std::string& spec) {
        std::vector<Op> ops;
        std::stringstream ss(spec);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            if (tok.empty()) continue;
            if (tok == "split") {
                ops.push_back(Op::SplitGreedy);
                ops.push_back(Op::SplitFlexible);
            } else {
                Op op = op_from_name(tok);
                if (is_terminal(op) || op == Op::LogisticRoot)
                    throw ConfigError("not an operator: " + tok);
                ops.push_back(op);
            }
        }
        if (ops.empty()) throw ConfigError("empty function set");
        return ops;
    }

    SearchConfig build() const {
        SearchConfig config = profile == "srbench" ? srbench_profile() : clinical_profile();
        if (!config_file.empty()) {
            std::ifstream in(config_file);
            if (!in) throw InputError("cannot open config file " + config_file);
            Json j = Json::parse(in, nullptr, false);
            if (j.is_discarded()) throw ParseError("config file is not valid JSON");
            if (j.contains("pop")) config.pop_size = j["pop"].get<std::size_t>();
            if (j.contains("gens")) config.max_gens = j["gens"].get<std::size_t>();
            if (j.contains("max_depth")) config.max_depth = j["max_depth"].get<std::size_t>();
            if (j.contains("max_size")) config.max_size = j["max_size"].get<std::size_t>();
            if (j.contains("lm_iters")) config.lm.max_iterations = j["lm_iters"].get<int>();
            if (j.contains("crossover_prob"))
                config.crossover_probability = j["crossover_prob"].get<double>();
            if (j.contains("validation_fraction"))
                config.validation_fraction = j["validation_fraction"].get<double>();
            if (j.contains("constant_prob"))
                config.constant_probability = j["constant_prob"].get<double>();
            if (j.contains("split_seeded")) config.split_seeded_init = j["split_seeded"].get<bool>();
            if (j.contains("functions"))
                config.functions = parse_functions(j["functions"].get<std::string>());
            if (j.contains("mutation_weights")) {
                auto w = j["mutation_weights"].get<std::vector<double>>();
                if (w.size() != static_cast<std::size_t>(kMutationKinds))
                    throw ConfigError("mutation_weights needs 6 entries");
                std::copy(w.begin(), w.end(), config.mutation_weights.begin());
            }
        }
        if (pop) config.pop_size = pop;
        if (gens) config.max_gens = gens;
        if (max_depth) config.max_depth = max_depth;
        if (max_size) config.max_size = max_size;
        if (lm_iters >= 0) config.lm.max_iterations = lm_iters;
        if (crossover >= 0) config.crossover_probability = crossover;
        if (validation_fraction > 0) config.validation_fraction = validation_fraction;
        if (constant_prob >= 0) config.constant_probability = constant_prob;
        if (!functions.empty()) config.functions = parse_functions(functions);
        if (split_seeded >= 0) config.split_seeded_init = split_seeded == 1;
        if (no_splits) config.disable_splits();
        if (weighted_split_objective) config.split_objective = SplitObjective::WeightedImpurity;
        config.workers = workers;
        config.seed = seed;
        return config;
    }
};

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    out << text;
}

Program load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open model " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_string(ss.str());
}

// Resolve the model's feature names against a dataset header (match by
// name, column order free). Throws listing every missing column.
void bind_features(Program& model, const Dataset& data, Matrix& X_out) {
    std::vector<int> mapping(model.feature_names.size(), -1);
    std::vector<std::string> missing;
    for (std::size_t i = 0; i < model.feature_names.size(); ++i) {
        auto it = std::find(data.feature_names.begin(), data.feature_names.end(),
                            model.feature_names[i]);
        if (it == data.feature_names.end()) missing.push_back(model.feature_names[i]);
        else mapping[i] = static_cast<int>(it - data.feature_names.begin());
    }
    if (!missing.empty()) {
        std::string msg = "missing feature columns:";
        for (const auto& name : missing) msg += " " + name;
        throw InputError(msg);
    }
    X_out = Matrix(data.rows(), model.feature_names.size());
    for (std::size_t i = 0; i < model.feature_names.size(); ++i)
        for (std::size_t r = 0; r < data.rows(); ++r)
            X_out(r, i) = data.X(r, static_cast<std::size_t>(mapping[i]));
}

int cmd_fit(const std::string& data_path, const std::string& target, const std::string& task_str,
            const ConfigFlags& flags, const std::string& out_dir, double train_fraction,
            bool no_simplify, double simplify_tol, const std::string& progress_path, bool json_out) {
    const Task task = task_from_name(task_str);
    SearchConfig config = flags.build();
    config.task = task;

    Dataset data = load_csv(data_path, target, task);
    if (data.dropped_rows > 0)
        std::cerr << "note: dropped " << data.dropped_rows << " rows with missing values\n";

    SplitSpec split_spec;
    split_spec.train_fraction = train_fraction;
    split_spec.stratified = task == Task::Classification;
    split_spec.seed = splitmix64(config.seed ^ 0x747261696eULL);
    auto [train, test] = split(data, split_spec);

    std::ofstream progress;
    std::function<void(const GenerationStats&)> on_gen;
    if (!progress_path.empty()) {
        progress.open(progress_path, std::ios::binary);
        if (!progress) throw InputError("cannot write " + progress_path);
        on_gen = [&progress](const GenerationStats& s) {
            Json j;
            j["generation"] = s.generation;
            j["best_loss"] = s.best_loss;
            j["median_loss"] = s.median_loss;
            j["front_size"] = s.front_size;
            progress << j.dump() << '\n';
        };
    }

    auto result = run(config, train, on_gen);
    Program model = result.best;
    if (!no_simplify) {
        std::vector<Program> population;
        for (const auto& ind : result.archive) population.push_back(ind.program);
        auto index = build_index(population, train.X, 1e-8, 64, config.complexity);
        model = simplify_program(model, index, train.X, train.y, simplify_tol);
    }

    auto pred_train = evaluate(model, train.X);
    auto pred_test = evaluate(model, test.X);
    Json metrics;
    metrics["task"] = std::string(task_name(task));
    metrics["train_rows"] = train.rows();
    metrics["test_rows"] = test.rows();
    if (task == Task::Classification) {
        metrics["train_auprc"] = auprc(train.y, pred_train);
        metrics["test_auprc"] = auprc(test.y, pred_test);
        std::vector<double> lbl(pred_test.size());
        for (std::size_t i = 0; i < lbl.size(); ++i) lbl[i] = pred_test[i] > 0.5 ? 1.0 : 0.0;
        metrics["test_balanced_accuracy"] = balanced_accuracy(test.y, lbl);
        metrics["train_log_loss"] = [&] {
            double s = 0;
            for (std::size_t i = 0; i < train.y.size(); ++i) s += log_loss_row(train.y[i], pred_train[i]);
            return s / static_cast<double>(train.y.size());
        }();
    } else {
        metrics["train_r2"] = r2(train.y, pred_train);
        metrics["test_r2"] = r2(test.y, pred_test);
        metrics["train_mse"] = mse(train.y, pred_train);
        metrics["test_mse"] = mse(test.y, pred_test);
    }
    metrics["size"] = model.size();
    metrics["complexity"] = model.complexity(config.complexity);
    metrics["seed"] = config.seed;

    fs::create_directories(out_dir);
    write_text(fs::path(out_dir) / "model.json", to_json_string(model, config.complexity));
    write_text(fs::path(out_dir) / "model.txt", to_infix(model) + "\n");
    write_text(fs::path(out_dir) / "model_pseudo.txt", to_pseudocode(model));
    write_text(fs::path(out_dir) / "metrics.json", metrics.dump(2) + "\n");

    if (json_out) std::cout << metrics.dump(2) << "\n";
    else {
        std::cout << "model: " << to_infix(model) << "\n";
        if (task == Task::Classification)
            std::cout << "test AUPRC: " << metrics["test_auprc"].get<double>() << "\n";
        else
            std::cout << "test R2: " << metrics["test_r2"].get<double>() << "\n";
        std::cout << "size: " << model.size() << "  outputs in " << out_dir << "\n";
    }
    return 0;
}

int cmd_predict(const std::string& model_path, const std::string& data_path,
                const std::string& out_path) {
    Program model = load_model(model_path);

    // Load without a target: parse the CSV directly as an all-feature table.
    std::ifstream in(data_path, std::ios::binary);
    if (!in) throw InputError("cannot open " + data_path);
    auto cells = detail::parse_csv(in);
    if (cells.size() < 2) throw InputError(data_path + ": no data rows");
    const auto header = cells.front();

    Dataset data;
    data.feature_names = header;
    data.X = Matrix(cells.size() - 1, header.size());
    std::vector<std::vector<std::string>> raw_rows(cells.begin() + 1, cells.end());
    for (std::size_t r = 0; r < raw_rows.size(); ++r) {
        if (raw_rows[r].size() != header.size())
            throw InputError(data_path + ": ragged row " + std::to_string(r + 2));
        for (std::size_t c = 0; c < header.size(); ++c) {
            auto v = detail::parse_double(raw_rows[r][c]);
            data.X(r, c) = v ? *v : std::numeric_limits<double>::quiet_NaN();
        }
    }

    Matrix bound;
    bind_features(model, data, bound);
    Program eval_model = model;
    // After binding, feature i of the model maps to column i of `bound`.
    auto pred = evaluate(eval_model.root, bound, all_rows(bound.rows()));

    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw InputError("cannot write " + out_path);
    for (std::size_t c = 0; c < header.size(); ++c) out << header[c] << ',';
    out << "prediction\n";
    for (std::size_t r = 0; r < raw_rows.size(); ++r) {
        for (const auto& cell : raw_rows[r]) out << cell << ',';
        out << format_double(pred[r]) << '\n';
    }
    std::cout << "wrote " << out_path << " (" << raw_rows.size() << " predictions)\n";
    return 0;
}

int cmd_score_gen(const std::string& system_str, std::size_t n, double prevalence,
                  std::size_t distractors, std::uint64_t seed, const std::string& out_path,
                  bool with_meta, bool json_out) {
    const ScoreSystem system = score_system_from_name(system_str);
    ClinicalGenOptions opt;
    opt.n = n;
    opt.distractors = distractors;
    opt.prevalence = prevalence;
    opt.seed = seed;
    auto frame = generate_clinical_frame(system, opt);
    write_csv(frame, out_path);

    double observed = 0.0;
    if (frame.has_label) {
        for (const auto& row : frame.rows) observed += row.back();
        observed /= static_cast<double>(frame.rows.size());
    }
    if (with_meta) {
        Json meta;
        meta["target"] = frame.has_label ? "label" : "score";
        meta["task"] = frame.has_label ? "classification" : "regression";
        fs::path meta_path = out_path;
        meta_path.replace_extension(".meta.json");
        write_text(meta_path, meta.dump(2) + "\n");
    }
    Json info;
    info["system"] = system_str;
    info["rows"] = frame.rows.size();
    info["columns"] = frame.columns;
    if (frame.has_label) info["prevalence"] = observed;
    if (json_out) std::cout << info.dump(2) << "\n";
    else std::cout << "wrote " << out_path << " (" << frame.rows.size() << " rows)\n";
    return 0;
}

int cmd_bench(const std::string& suite_dir, const std::string& noise_csv, std::size_t repeats,
              const ConfigFlags& flags, const std::string& out_dir, bool ablate_splits,
              std::size_t run_workers, bool no_simplify, double simplify_tol) {
    std::vector<double> noise_levels;
    std::stringstream ss(noise_csv);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) noise_levels.push_back(std::stod(tok));
    if (noise_levels.empty()) noise_levels.push_back(0.0);

    auto problems = discover_problems(suite_dir);
    std::vector<NamedConfig> configs;
    SearchConfig base = flags.build();
    configs.push_back({ "default", base });
    if (ablate_splits) {
        SearchConfig ablated = base;
        ablated.disable_splits();
        configs.push_back({ "no_splits", ablated });
    }

    BenchOptions options;
    options.noise_levels = noise_levels;
    options.repeats = repeats;
    options.seed = flags.seed;
    options.simplify = !no_simplify;
    options.simplify_tol = simplify_tol;
    options.workers = run_workers;

    auto output = run_suite(problems, configs, options);
    write_bench_output(output, out_dir);
    std::cout << output.summary_md;
    std::cout << "report written to " << out_dir << "\n";
    return 0;
}

int cmd_simplify(const std::string& model_path, const std::string& data_path,
                 const std::string& target, double tol, const std::string& out_path) {
    Program model = load_model(model_path);
    Dataset data = load_csv(data_path, target, model.task);
    Matrix bound;
    bind_features(model, data, bound);

    std::vector<Program> population = { model };
    auto index = build_index(population, bound, 1e-8, 64);
    Program simplified = simplify_program(model, index, bound, data.y, tol);
    write_text(out_path, to_json_string(simplified));
    std::cout << "size " << model.size() << " -> " << simplified.size() << ", wrote " << out_path
              << "\n";
    return 0;
}

int cmd_export(const std::string& model_path, const std::string& format,
               const std::string& out_path) {
    Program model = load_model(model_path);
    std::string text;
    if (format == "infix") text = to_infix(model) + "\n";
    else if (format == "pseudo") text = to_pseudocode(model);
    else text = to_json_string(model);
    if (out_path.empty()) std::cout << text;
    else write_text(out_path, text);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{ "symbolic regression and classification with decision splits" };
    app.require_subcommand(1);

    // fit
    auto* fit = app.add_subcommand("fit", "Fit a model to a CSV dataset");
    std::string fit_data, fit_target, fit_task = "regression", fit_out = "sprig_out";
    std::string fit_progress;
    double fit_train_fraction = 0.75, fit_simplify_tol = 1e-6;
    bool fit_no_simplify = false, fit_json = false;
    ConfigFlags fit_flags;
    fit->add_option("data", fit_data, "Training CSV")->required();
    fit->add_option("--target", fit_target, "Target column name")->required();
    fit->add_option("--task", fit_task, "regression | classification")
        ->check(CLI::IsMember({ "regression", "classification" }));
    fit->add_option("--out", fit_out, "Output directory");
    fit->add_option("--train-fraction", fit_train_fraction, "Train split fraction");
    fit->add_option("--simplify-tol", fit_simplify_tol, "Simplifier drift tolerance");
    fit->add_flag("--no-simplify", fit_no_simplify, "Skip post-run simplification");
    fit->add_option("--progress", fit_progress, "Write per-generation JSONL records here");
    fit->add_flag("--json", fit_json, "Machine-readable stdout");
    fit_flags.add_to(fit);

    // predict
    auto* predict = app.add_subcommand("predict", "Apply a model document to a CSV");
    std::string pr_model, pr_data, pr_out = "predictions.csv";
    predict->add_option("--model", pr_model, "Model JSON")->required();
    predict->add_option("data", pr_data, "Input CSV")->required();
    predict->add_option("--out", pr_out, "Output CSV with prediction column");

    // score-gen
    auto* gen = app.add_subcommand("score-gen", "Generate a synthetic clinical-score dataset");
    std::string sg_system, sg_out = "scores.csv";
    std::size_t sg_n = 10000, sg_distractors = 10;
    double sg_prevalence = 0.09;
    std::uint64_t sg_seed = 0;
    bool sg_meta = false, sg_json = false;
    gen->add_option("--system", sg_system, "map | cart | mews")->required()
        ->check(CLI::IsMember({ "map", "cart", "mews" }));
    gen->add_option("--n", sg_n, "Number of rows");
    gen->add_option("--prevalence", sg_prevalence, "Positive label prevalence (cart/mews)");
    gen->add_option("--distractors", sg_distractors, "Number of noise features");
    gen->add_option("--seed", sg_seed, "Random seed");
    gen->add_option("--out", sg_out, "Output CSV path");
    gen->add_flag("--meta", sg_meta, "Also write a <out>.meta.json sidecar");
    gen->add_flag("--json", sg_json, "Machine-readable stdout");

    // bench
    auto* bench = app.add_subcommand("bench", "Run a problem suite and write a report");
    std::string be_suite, be_noise = "0", be_out = "report";
    std::size_t be_repeats = 1, be_run_workers = 1;
    bool be_ablate = false, be_no_simplify = false;
    double be_simplify_tol = 1e-6;
    ConfigFlags bench_flags;
    bench->add_option("--suite", be_suite, "Directory of problem CSVs")->required();
    bench->add_option("--noise", be_noise, "Comma-separated target noise levels");
    bench->add_option("--repeats", be_repeats, "Repeats per (problem, noise)");
    bench->add_option("--out", be_out, "Report directory");
    bench->add_flag("--ablate-splits", be_ablate, "Also run a no-split configuration");
    bench->add_option("--run-workers", be_run_workers, "Concurrent runs");
    bench->add_flag("--no-simplify", be_no_simplify, "Skip post-run simplification");
    bench->add_option("--simplify-tol", be_simplify_tol, "Simplifier drift tolerance");
    bench_flags.add_to(bench);

    // simplify
    auto* simp = app.add_subcommand("simplify", "Simplify a model document against data");
    std::string si_model, si_data, si_target, si_out = "model_simplified.json";
    double si_tol = 1e-6;
    simp->add_option("--model", si_model, "Model JSON")->required();
    simp->add_option("data", si_data, "CSV with the model's feature columns")->required();
    simp->add_option("--target", si_target, "Target column")->required();
    simp->add_option("--tol", si_tol, "Prediction drift tolerance");
    simp->add_option("--out", si_out, "Output model JSON");

    // export
    auto* exp = app.add_subcommand("export", "Render a model document");
    std::string ex_model, ex_format = "infix", ex_out;
    exp->add_option("--model", ex_model, "Model JSON")->required();
    exp->add_option("--format", ex_format, "infix | pseudo | json")
        ->check(CLI::IsMember({ "infix", "pseudo", "json" }));
    exp->add_option("--out", ex_out, "Output path (stdout when omitted)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (fit->parsed())
            return cmd_fit(fit_data, fit_target, fit_task, fit_flags, fit_out, fit_train_fraction,
                           fit_no_simplify, fit_simplify_tol, fit_progress, fit_json);
        if (predict->parsed()) return cmd_predict(pr_model, pr_data, pr_out);
        if (gen->parsed())
            return cmd_score_gen(sg_system, sg_n, sg_prevalence, sg_distractors, sg_seed, sg_out,
                                 sg_meta, sg_json);
        if (bench->parsed())
            return cmd_bench(be_suite, be_noise, be_repeats, bench_flags, be_out, be_ablate,
                             be_run_workers, be_no_simplify, be_simplify_tol);
        if (simp->parsed()) return cmd_simplify(si_model, si_data, si_target, si_tol, si_out);
        if (exp->parsed()) return cmd_export(ex_model, ex_format, ex_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
