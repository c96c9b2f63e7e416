#include "tarp/harness.hpp"

#include "tarp/error.hpp"
#include "tarp/parallel.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

namespace tarp {

namespace {

constexpr std::uint64_t kTarpSalt = 0x7A2B9C4D1E3F5061ULL;

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Json summary_json(const Summary& s) { return Json{{"mean", s.mean}, {"sd", s.sd}}; }

}  // namespace

Summary summarize(const std::vector<double>& v) {
    require(!v.empty(), ErrorKind::parameter, "nothing to summarize");
    Summary s;
    for (double x : v) s.mean += x;
    s.mean /= static_cast<double>(v.size());
    if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - s.mean) * (x - s.mean);
        s.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
    }
    return s;
}

std::uint64_t dataset_seed(std::uint64_t seed, Index i) noexcept {
    return substream_seed(seed, static_cast<std::uint64_t>(i));
}

std::uint64_t dataset_tarp_seed(std::uint64_t seed, Index i) noexcept {
    return substream_seed(seed ^ kTarpSalt, static_cast<std::uint64_t>(i));
}

std::string method_label(const TarpConfig& cfg) {
    std::ostringstream os;
    os << to_string(cfg.backend);
    if (cfg.fixedM) os << " m=" << *cfg.fixedM;
    if (cfg.fixedPsi && cfg.backend == Backend::risRp) os << " psi=" << *cfg.fixedPsi;
    os << " N=" << cfg.nReplicates << ' ' << to_string(cfg.aggregation);
    return os.str();
}

DatasetOutcome run_dataset(const ExperimentSpec& spec, Index index) {
    require(spec.scheme.has_value(), ErrorKind::parameter, "benchmark needs a simulation scheme");
    const auto start = std::chrono::steady_clock::now();
    DatasetOutcome out;
    out.index = index;
    out.dataSeed = dataset_seed(spec.tarp.seed, index);
    out.tarpSeed = dataset_tarp_seed(spec.tarp.seed, index);

    SchemeSpec s = *spec.scheme;
    s.seed = out.dataSeed;
    const SimulatedData sim = simulate(s);
    const Dataset train = standardize(sim.train);
    const MatrixXd testX = apply_standardization(train, sim.testX);

    TarpConfig cfg = spec.tarp;
    cfg.seed = out.tarpSeed;
    cfg.workers = 1;
    cfg.keepReplicates = true;
    try {
        if (train.responseKind == ResponseKind::binary) {
            out.binary = true;
            const BinaryResult r = run_tarp_binary(train, testX, cfg);
            out.classification = classification_metrics(r.prob, sim.testY);
            for (const auto& rep : r.perReplicate) {
                out.meanPGamma += static_cast<double>(rep.pGamma);
                out.meanM += static_cast<double>(rep.m);
            }
            out.meanPGamma /= static_cast<double>(r.perReplicate.size());
            out.meanM /= static_cast<double>(r.perReplicate.size());
            out.phases = r.phases;
        } else {
            const TarpResult r = run_tarp(train, testX, cfg);
            out.regression = regression_metrics(r.yhat, r.lower, r.upper, sim.testY, cfg.level);
            for (const auto& rep : r.perReplicate) {
                out.meanPGamma += static_cast<double>(rep.pGamma);
                out.meanM += static_cast<double>(rep.m);
            }
            out.meanPGamma /= static_cast<double>(r.perReplicate.size());
            out.meanM /= static_cast<double>(r.perReplicate.size());
            out.phases = r.phases;
        }
    } catch (const Error& e) {
        fail(e.kind(), "dataset " + std::to_string(index) + " (seed " + std::to_string(out.dataSeed) + "): " + e.what());
    }
    out.wallTime = seconds_since(start);
    return out;
}

BenchmarkReport run_benchmark(const ExperimentSpec& spec) {
    spec.validate();
    const auto start = std::chrono::steady_clock::now();
    BenchmarkReport report;
    const auto N = static_cast<std::size_t>(spec.nDatasets);
    report.outcomes.resize(N);
    auto err = parallel_for(N, spec.tarp.workers,
                            [&](std::size_t i) { report.outcomes[i] = run_dataset(spec, static_cast<Index>(i)); });
    if (err) std::rethrow_exception(err);

    ReportRow& row = report.row;
    row.method = method_label(spec.tarp);
    row.datasets = spec.nDatasets;
    row.binary = report.outcomes.front().binary;
    std::vector<double> a, b, c, pg;
    for (const auto& o : report.outcomes) {
        if (row.binary) {
            a.push_back(100.0 * o.classification.misclassRate);
            b.push_back(o.classification.auc);
            c.push_back(o.classification.calibrationMsd);
        } else {
            a.push_back(o.regression.mspe);
            b.push_back(100.0 * o.regression.ecp);
            c.push_back(o.regression.meanWidth);
        }
        pg.push_back(o.meanPGamma);
        report.phases.screen += o.phases.screen;
        report.phases.project += o.phases.project;
        report.phases.fit += o.phases.fit;
        report.phases.predict += o.phases.predict;
    }
    if (row.binary) {
        row.misclassPct = summarize(a);
        row.auc = summarize(b);
        row.msd = summarize(c);
    } else {
        row.mspe = summarize(a);
        row.ecpPct = summarize(b);
        row.width = summarize(c);
    }
    row.pGamma = summarize(pg);
    report.wallTime = row.wallTime = seconds_since(start);
    return report;
}

void write_report_csv(const std::filesystem::path& path, const ReportRow& row) {
    std::vector<std::string> header{"datasets"};
    std::vector<double> values{static_cast<double>(row.datasets)};
    auto add = [&](const std::string& name, const Summary& s) {
        header.push_back(name + "_mean");
        header.push_back(name + "_sd");
        values.push_back(s.mean);
        values.push_back(s.sd);
    };
    if (row.binary) {
        add("misclass_pct", row.misclassPct);
        add("auc", row.auc);
        add("msd", row.msd);
    } else {
        add("mspe", row.mspe);
        add("ecp_pct", row.ecpPct);
        add("width", row.width);
    }
    add("p_gamma", row.pGamma);
    MatrixXd m(1, static_cast<Index>(values.size()));
    for (std::size_t j = 0; j < values.size(); ++j) m(0, static_cast<Index>(j)) = values[j];
    write_csv(path, header, m);
}

void write_outcomes_csv(const std::filesystem::path& path, const std::vector<DatasetOutcome>& outcomes) {
    require(!outcomes.empty(), ErrorKind::parameter, "no outcomes to write");
    const bool binary = outcomes.front().binary;
    const std::vector<std::string> header =
        binary ? std::vector<std::string>{"dataset", "misclass", "auc", "msd", "mean_p_gamma", "mean_m"}
               : std::vector<std::string>{"dataset", "mspe", "ecp", "width", "mean_p_gamma", "mean_m"};
    MatrixXd m(static_cast<Index>(outcomes.size()), 6);
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const auto& o = outcomes[i];
        const auto r = static_cast<Index>(i);
        m(r, 0) = static_cast<double>(o.index);
        if (binary) {
            m(r, 1) = o.classification.misclassRate;
            m(r, 2) = o.classification.auc;
            m(r, 3) = o.classification.calibrationMsd;
        } else {
            m(r, 1) = o.regression.mspe;
            m(r, 2) = o.regression.ecp;
            m(r, 3) = o.regression.meanWidth;
        }
        m(r, 4) = o.meanPGamma;
        m(r, 5) = o.meanM;
    }
    write_csv(path, header, m);
}

Json report_json(const ExperimentSpec& spec, const BenchmarkReport& report) {
    const ReportRow& row = report.row;
    Json j;
    j["method"] = row.method;
    j["config"] = to_json(spec);
    Json r;
    r["datasets"] = row.datasets;
    if (row.binary) {
        r["misclass_pct"] = summary_json(row.misclassPct);
        r["auc"] = summary_json(row.auc);
        r["msd"] = summary_json(row.msd);
    } else {
        r["mspe"] = summary_json(row.mspe);
        r["ecp_pct"] = summary_json(row.ecpPct);
        r["width"] = summary_json(row.width);
    }
    r["p_gamma"] = summary_json(row.pGamma);
    j["report"] = r;
    Json ds = Json::array();
    for (const auto& o : report.outcomes) {
        Json d;
        d["index"] = o.index;
        d["data_seed"] = o.dataSeed;
        d["tarp_seed"] = o.tarpSeed;
        if (o.binary) {
            d["misclass"] = o.classification.misclassRate;
            d["auc"] = o.classification.auc;
            d["msd"] = o.classification.calibrationMsd;
        } else {
            d["mspe"] = o.regression.mspe;
            d["ecp"] = o.regression.ecp;
            d["width"] = o.regression.meanWidth;
        }
        d["mean_p_gamma"] = o.meanPGamma;
        d["mean_m"] = o.meanM;
        ds.push_back(d);
    }
    j["datasets"] = ds;
    return j;
}

Json timing_json(const BenchmarkReport& report) {
    Json j;
    j["wall_time_s"] = report.wallTime;
    j["phases_s"] = {{"screen", report.phases.screen},
                     {"project", report.phases.project},
                     {"fit", report.phases.fit},
                     {"predict", report.phases.predict}};
    Json per = Json::array();
    for (const auto& o : report.outcomes) per.push_back(o.wallTime);
    j["dataset_wall_time_s"] = per;
    return j;
}

void write_json(const std::filesystem::path& path, const Json& j) {
    std::ofstream out(path);
    require(out.good(), ErrorKind::io, "cannot write " + path.string());
    out << j.dump(2) << '\n';
    require(out.good(), ErrorKind::io, "write failed for " + path.string());
}

}  // namespace tarp
