// tarp: simulate data, fit/predict on CSV files, run benchmarks, export screening.

#include "tarp/config.hpp"
#include "tarp/error.hpp"
#include "tarp/harness.hpp"
#include "tarp/kernels.hpp"
#include "tarp/metrics.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <deque>
#include <fstream>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

using namespace tarp;

namespace {

/// Flags are collected as config keys and applied after any --config file.
struct FlagSet {
    std::vector<std::pair<std::string, CLI::Option*>> options;
    std::deque<std::string> values;  // stable addresses for CLI11 bindings
    std::string configPath;

    void add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
        values.emplace_back();
        options.emplace_back(key, app->add_option(flag, values.back(), help));
    }

    void apply(ExperimentSpec& spec) const {
        if (!configPath.empty()) apply_config_file(spec, configPath);
        // seed and scheme first so scheme-specific keys attach to the right spec
        for (const char* first : {"seed", "scheme"})
            for (std::size_t i = 0; i < options.size(); ++i)
                if (options[i].first == first && options[i].second->count()) apply_key(spec, first, values[i]);
        for (std::size_t i = 0; i < options.size(); ++i) {
            const auto& [key, opt] = options[i];
            if (key == "seed" || key == "scheme" || !opt->count()) continue;
            apply_key(spec, key, values[i]);
        }
    }
};

void add_tarp_flags(CLI::App* app, FlagSet& f) {
    f.add(app, "--seed", "seed", "master seed");
    f.add(app, "--backend", "backend", "ris-rp | ris-pcr | sparse-ris-rp");
    f.add(app, "--delta", "delta", "screening exponent or 'auto'");
    f.add(app, "--replicates", "replicates", "number of replicates N");
    f.add(app, "--level", "level", "prediction interval level");
    f.add(app, "--workers", "workers", "worker threads (0 = all cores)");
    f.add(app, "--m", "m", "fixed compression dimension");
    f.add(app, "--psi", "psi", "fixed projection sparsity");
    f.add(app, "--kappa", "kappa", "sparse projection exponent");
    f.add(app, "--a-sigma", "a_sigma", "inverse-gamma shape");
    f.add(app, "--b-sigma", "b_sigma", "inverse-gamma rate");
    f.add(app, "--aggregation", "aggregation", "average | model-average | cv");
    f.add(app, "--intervals", "intervals", "endpoint | mixture");
    f.add(app, "--k-folds", "k_folds", "folds for cv aggregation");
}

void add_scheme_flags(CLI::App* app, FlagSet& f) {
    f.add(app, "--scheme", "scheme", "ar1 | block | pcr | bridge | clusters");
    f.add(app, "--n", "n", "training rows");
    f.add(app, "--p", "p", "predictors");
    f.add(app, "--n-test", "n_test", "test rows (default n)");
    f.add(app, "--coef", "coef", "active coefficient value");
    f.add(app, "--noise-sd", "noise_sd", "response noise sd");
}

void print_error(const std::string& kind, const std::string& message) {
    Json j;
    j["error"] = {{"kind", kind}, {"message", message}};
    std::cerr << j.dump() << '\n';
}

std::string path_with(const std::string& base, const std::string& suffix) { return base + suffix; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int cmd_simulate(const ExperimentSpec& spec) {
    require(spec.scheme.has_value(), ErrorKind::parameter, "simulate needs --scheme");
    SchemeSpec s = *spec.scheme;
    s.seed = spec.tarp.seed;
    const SimulatedData sim = simulate(s);
    const std::string out = spec.out.string();
    write_dataset_csv(path_with(out, "_train.csv"), sim.train);
    Dataset test = make_dataset(sim.testX, sim.testY, sim.train.columnNames);
    write_dataset_csv(path_with(out, "_test.csv"), test);

    Json j;
    j["seed"] = s.seed;
    j["scheme"] = to_json(s);
    j["activeIdx"] = sim.activeIdx;
    Json nz = Json::array();
    for (Index k : sim.activeIdx) nz.push_back({{"index", k}, {"value", sim.trueBeta[k]}});
    j["trueBeta"] = nz;
    j["outlierRows"] = sim.outlierRows;
    write_json(path_with(out, ".json"), j);
    return 0;
}

int cmd_fit(const ExperimentSpec& spec) {
    require(spec.trainPath && spec.testPath, ErrorKind::parameter, "fit needs --train and --test");
    const auto start = std::chrono::steady_clock::now();
    const Dataset raw = read_csv(*spec.trainPath);
    const Dataset train = standardize(raw);

    const CsvTable testTable = read_csv_table(*spec.testPath, true);
    CsvOptions testOpts;
    testOpts.responseRequired = false;
    testOpts.responseColumn = raw.responseName;
    if (testTable.values.cols() == raw.cols() + 1 && std::find(testTable.header.begin(), testTable.header.end(),
                                                               raw.responseName) == testTable.header.end())
        testOpts.responseColumn = -1L;
    const Dataset test = read_csv(*spec.testPath, testOpts);
    require(test.cols() == raw.cols(), ErrorKind::ingestion,
            "test data has " + std::to_string(test.cols()) + " predictors, training data has " + std::to_string(raw.cols()));
    if (test.columnNames != raw.columnNames)
        fail(ErrorKind::ingestion, "test column names do not match the training columns");
    const MatrixXd testX = apply_standardization(train, test.X);
    const bool hasTruth = test.y.size() == test.rows();

    const std::string out = spec.out.string();
    Json summary;
    summary["config"] = to_json(spec.tarp);
    summary["train_rows"] = train.rows();
    summary["predictors"] = train.cols();
    summary["test_rows"] = test.rows();
    summary["kernels"] = kernels::to_string(kernels::active_isa());
    std::vector<double> pg;
    Json timing;

    if (train.responseKind == ResponseKind::binary) {
        const BinaryResult r = run_tarp_binary(train, testX, spec.tarp);
        MatrixXd table(test.rows(), 2);
        for (Index i = 0; i < test.rows(); ++i) table.row(i) << static_cast<double>(i), r.prob[i];
        write_csv(path_with(out, ".csv"), std::vector<std::string>{"index", "prob"}, table);
        for (const auto& rep : r.perReplicate) pg.push_back(static_cast<double>(rep.pGamma));
        summary["response"] = "binary";
        summary["delta"] = r.delta;
        summary["m_range"] = {r.mRange.lo, r.mRange.hi};
        if (hasTruth) {
            const auto m = classification_metrics(r.prob, test.y);
            summary["metrics"] = {{"misclass", m.misclassRate}, {"auc", m.auc}, {"msd", m.calibrationMsd}};
        }
        timing["phases_s"] = {{"screen", r.phases.screen}, {"project", r.phases.project}, {"fit", r.phases.fit},
                              {"predict", r.phases.predict}};
    } else {
        const TarpResult r = run_tarp(train, testX, spec.tarp);
        MatrixXd table(test.rows(), 4);
        for (Index i = 0; i < test.rows(); ++i)
            table.row(i) << static_cast<double>(i), r.yhat[i], r.lower[i], r.upper[i];
        write_csv(path_with(out, ".csv"), std::vector<std::string>{"index", "yhat", "lower", "upper"}, table);
        for (const auto& rep : r.perReplicate) pg.push_back(static_cast<double>(rep.pGamma));
        summary["response"] = "continuous";
        summary["delta"] = r.delta;
        summary["m_range"] = {r.mRange.lo, r.mRange.hi};
        if (r.selected) summary["selected_replicate"] = *r.selected;
        if (hasTruth) {
            const auto m = regression_metrics(r.yhat, r.lower, r.upper, test.y, spec.tarp.level);
            summary["metrics"] = {{"mspe", m.mspe}, {"ecp", m.ecp}, {"width", m.meanWidth}};
        }
        timing["phases_s"] = {{"screen", r.phases.screen}, {"project", r.phases.project}, {"fit", r.phases.fit},
                              {"predict", r.phases.predict}};
    }
    const Summary s = summarize(pg);
    summary["p_gamma"] = {{"mean", s.mean}, {"sd", s.sd}, {"min", *std::min_element(pg.begin(), pg.end())},
                          {"max", *std::max_element(pg.begin(), pg.end())}};
    write_json(path_with(out, ".json"), summary);
    timing["wall_time_s"] = seconds_since(start);
    write_json(path_with(out, ".timing.json"), timing);
    return 0;
}

int cmd_benchmark(const ExperimentSpec& spec) {
    const BenchmarkReport report = run_benchmark(spec);
    const std::string out = spec.out.string();
    write_report_csv(path_with(out, ".csv"), report.row);
    write_outcomes_csv(path_with(out, ".datasets.csv"), report.outcomes);
    write_json(path_with(out, ".json"), report_json(spec, report));
    write_json(path_with(out, ".timing.json"), timing_json(report));
    return 0;
}

int cmd_screen(const ExperimentSpec& spec, const std::string& dataPath) {
    require(!dataPath.empty(), ErrorKind::parameter, "screen needs --data");
    const Dataset data = standardize(read_csv(dataPath));
    const TarpConfig& cfg = spec.tarp;
    const double delta = cfg.delta ? *cfg.delta : default_delta(data.rows(), data.cols());
    const UtilityVector u = marginal_utility(data);
    InclusionProbs probs = inclusion_probabilities(u, delta);
    if (probs.degenerate) probs.q = VectorXd::Ones(data.cols());

    const Index p = data.cols();
    std::vector<double> freq(static_cast<std::size_t>(p), 0.0);
    const std::string out = spec.out.string();
    {
        std::ofstream sel(path_with(out, ".selections.csv"));
        require(sel.good(), ErrorKind::io, "cannot write " + out + ".selections.csv");
        sel << "replicate,p_gamma,columns\n";
        for (Index l = 0; l < cfg.nReplicates; ++l) {
            Rng rng(replicate_seed(cfg.seed, l), Stream::screening);
            const GammaMask mask = sample_gamma(probs, rng);
            std::string cols;
            for (Index j : mask.selected) {
                freq[static_cast<std::size_t>(j)] += 1.0;
                if (!cols.empty()) cols += ' ';
                cols += data.columnNames[j];
            }
            sel << l << ',' << mask.pGamma << ',' << csv_escape(cols) << '\n';
        }
        require(sel.good(), ErrorKind::io, "write failed for " + out + ".selections.csv");
    }
    {
        std::ofstream tab(path_with(out, ".frequency.csv"));
        require(tab.good(), ErrorKind::io, "cannot write " + out + ".frequency.csv");
        tab << "column,name,utility,q,frequency\n";
        for (Index j = 0; j < p; ++j)
            tab << j << ',' << csv_escape(data.columnNames[j]) << ',' << format_double(u.r[j]) << ','
                << format_double(probs.q[j]) << ','
                << format_double(freq[static_cast<std::size_t>(j)] / static_cast<double>(cfg.nReplicates)) << '\n';
        require(tab.good(), ErrorKind::io, "write failed for " + out + ".frequency.csv");
    }
    double meanSelected = 0.0;
    Index unionSize = 0;
    for (double f : freq) {
        meanSelected += f;
        if (f > 0.0) ++unionSize;
    }
    Json j;
    j["delta"] = delta;
    j["replicates"] = cfg.nReplicates;
    j["seed"] = cfg.seed;
    j["expected_p_gamma"] = probs.expected_count();
    j["mean_p_gamma"] = meanSelected / static_cast<double>(cfg.nReplicates);
    j["union_size"] = unionSize;
    j["degenerate_utilities"] = probs.degenerate;
    write_json(path_with(out, ".json"), j);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Targeted random projection regression"};
    app.require_subcommand(1);

    FlagSet simFlags, fitFlags, benchFlags, screenFlags;
    std::string simOut = "sim", fitOut = "fit", benchOut = "benchmark", screenOut = "screen";
    std::string trainPath, testPath, dataPath;
    bool noAggregate = false;

    auto* sim = app.add_subcommand("simulate", "write a simulated train/test pair and a JSON sidecar");
    add_scheme_flags(sim, simFlags);
    simFlags.add(sim, "--seed", "seed", "seed");
    sim->add_option("--config", simFlags.configPath, "key=value config file");
    sim->add_option("--out", simOut, "output prefix");

    auto* fit = app.add_subcommand("fit", "fit on a training CSV and predict a test CSV");
    add_tarp_flags(fit, fitFlags);
    fit->add_option("--train", trainPath, "training CSV (last column or 'y' is the response)");
    fit->add_option("--test", testPath, "test CSV");
    fit->add_option("--config", fitFlags.configPath, "key=value config file");
    fit->add_option("--out", fitOut, "output prefix");

    auto* bench = app.add_subcommand("benchmark", "run TARP on many simulated datasets");
    add_scheme_flags(bench, benchFlags);
    add_tarp_flags(bench, benchFlags);
    benchFlags.add(bench, "--datasets", "datasets", "number of simulated datasets");
    bench->add_flag("--no-aggregate", noAggregate, "single replicate (pair with --m and --psi)");
    bench->add_option("--config", benchFlags.configPath, "key=value config file");
    bench->add_option("--out", benchOut, "output prefix");

    auto* screen = app.add_subcommand("screen", "export randomized screening draws");
    screenFlags.add(screen, "--seed", "seed", "seed");
    screenFlags.add(screen, "--delta", "delta", "screening exponent or 'auto'");
    screenFlags.add(screen, "--replicates", "replicates", "number of draws");
    screen->add_option("--data", dataPath, "CSV with response");
    screen->add_option("--config", screenFlags.configPath, "key=value config file");
    screen->add_option("--out", screenOut, "output prefix");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        print_error("usage", e.what());
        return 2;
    }

    try {
        ExperimentSpec spec;
        if (*sim) {
            simFlags.apply(spec);
            if (!spec.scheme) spec.scheme = SchemeSpec{};
            spec.out = simOut;
            return cmd_simulate(spec);
        }
        if (*fit) {
            fitFlags.apply(spec);
            if (!trainPath.empty()) spec.trainPath = trainPath;
            if (!testPath.empty()) spec.testPath = testPath;
            spec.out = fitOut;
            return cmd_fit(spec);
        }
        if (*bench) {
            benchFlags.apply(spec);
            if (!spec.scheme) spec.scheme = SchemeSpec{};
            if (noAggregate) spec.tarp.nReplicates = 1;
            spec.out = benchOut;
            return cmd_benchmark(spec);
        }
        if (*screen) {
            screenFlags.apply(spec);
            spec.out = screenOut;
            return cmd_screen(spec, dataPath);
        }
    } catch (const Error& e) {
        print_error(std::string(to_string(e.kind())), e.what());
        return 1;
    } catch (const std::exception& e) {
        print_error("internal", e.what());
        return 1;
    }
    return 0;
}
