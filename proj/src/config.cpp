#include "tarp/config.hpp"

#include "tarp/error.hpp"

#include <charconv>
#include <fstream>

namespace tarp {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    require(ec == std::errc{} && ptr == v.data() + v.size(), ErrorKind::parameter,
            "config key '" + key + "': '" + v + "' is not a number");
    return out;
}

template <class Int>
Int to_int(const std::string& key, const std::string& v) {
    Int out{};
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    require(ec == std::errc{} && ptr == v.data() + v.size(), ErrorKind::parameter,
            "config key '" + key + "': '" + v + "' is not an integer");
    return out;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    fail(ErrorKind::parameter, "config key '" + key + "': '" + v + "' is not a boolean");
}

SchemeSpec& scheme_of(ExperimentSpec& spec) {
    if (!spec.scheme) spec.scheme = SchemeSpec{};
    return *spec.scheme;
}

}  // namespace

void ExperimentSpec::validate() const {
    const bool hasData = trainPath.has_value();
    require(scheme.has_value() != hasData, ErrorKind::parameter, "give exactly one of a scheme or data paths");
    require(nDatasets >= 1, ErrorKind::parameter, "datasets must be >= 1");
    if (scheme) scheme->validate();
    tarp.validate();
}

std::map<std::string, std::string> read_key_values(const std::filesystem::path& path) {
    std::ifstream in(path);
    require(in.good(), ErrorKind::io, "cannot read config " + path.string());
    std::map<std::string, std::string> out;
    std::string line;
    for (int lineNo = 1; std::getline(in, line); ++lineNo) {
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        require(eq != std::string::npos, ErrorKind::parameter,
                path.string() + ":" + std::to_string(lineNo) + ": expected key=value");
        const std::string key = trim(t.substr(0, eq));
        require(!key.empty(), ErrorKind::parameter, path.string() + ":" + std::to_string(lineNo) + ": empty key");
        require(!out.count(key), ErrorKind::parameter, "duplicate config key '" + key + "'");
        out[key] = trim(t.substr(eq + 1));
    }
    return out;
}

void apply_key(ExperimentSpec& spec, const std::string& key, const std::string& v) {
    TarpConfig& c = spec.tarp;
    if (key == "backend") c.backend = parse_backend(v);
    else if (key == "delta") c.delta = v == "auto" ? std::nullopt : std::optional<double>(to_double(key, v));
    else if (key == "replicates") c.nReplicates = to_int<Index>(key, v);
    else if (key == "m_min") c.mRange = IndexRange{to_int<Index>(key, v), c.mRange ? c.mRange->hi : to_int<Index>(key, v)};
    else if (key == "m_max") c.mRange = IndexRange{c.mRange ? c.mRange->lo : 1, to_int<Index>(key, v)};
    else if (key == "psi_min") c.psiRange.lo = to_double(key, v);
    else if (key == "psi_max") c.psiRange.hi = to_double(key, v);
    else if (key == "m") c.fixedM = to_int<Index>(key, v);
    else if (key == "psi") c.fixedPsi = to_double(key, v);
    else if (key == "kappa") c.kappa = to_double(key, v);
    else if (key == "a_sigma") c.prior.aSigma = to_double(key, v);
    else if (key == "b_sigma") c.prior.bSigma = to_double(key, v);
    else if (key == "theta_scale") c.prior.thetaScale = to_double(key, v);
    else if (key == "aggregation") c.aggregation = parse_aggregation(v);
    else if (key == "intervals") c.intervals = parse_interval_aggregation(v);
    else if (key == "k_folds") c.kFolds = to_int<Index>(key, v);
    else if (key == "level") c.level = to_double(key, v);
    else if (key == "seed") {
        c.seed = to_int<std::uint64_t>(key, v);
        if (spec.scheme) spec.scheme->seed = c.seed;
    }
    else if (key == "center_y") c.centerY = to_bool(key, v);
    else if (key == "workers") c.workers = to_int<unsigned>(key, v);
    else if (key == "probit_iterations") c.probit.iterations = to_int<Index>(key, v);
    else if (key == "probit_burnin") c.probit.burnin = to_int<Index>(key, v);
    else if (key == "probit_intercept") c.probitIntercept = to_bool(key, v);
    else if (key == "probit_averaging") c.probitPosteriorAveraging = to_bool(key, v);
    else if (key == "datasets") spec.nDatasets = to_int<Index>(key, v);
    else if (key == "train") spec.trainPath = v;
    else if (key == "test") spec.testPath = v;
    else if (key == "out") spec.out = v;
    else if (key == "scheme") {
        scheme_of(spec).scheme = parse_scheme(v);
        spec.scheme->seed = c.seed;
    }
    else if (key == "n") scheme_of(spec).n = to_int<Index>(key, v);
    else if (key == "p") scheme_of(spec).p = to_int<Index>(key, v);
    else if (key == "n_test") scheme_of(spec).nTest = to_int<Index>(key, v);
    else if (key == "n_active") scheme_of(spec).nActive = to_int<Index>(key, v);
    else if (key == "coef") scheme_of(spec).coefValue = to_double(key, v);
    else if (key == "noise_sd") scheme_of(spec).noiseSd = to_double(key, v);
    else if (key == "rho") scheme_of(spec).rho = to_double(key, v);
    else if (key == "block_size") scheme_of(spec).blockSize = to_int<Index>(key, v);
    else if (key == "rho_low") scheme_of(spec).rhoLow = to_double(key, v);
    else if (key == "rho_high") scheme_of(spec).rhoHigh = to_double(key, v);
    else if (key == "n_independent") scheme_of(spec).nIndependent = to_int<Index>(key, v);
    else if (key == "n_outliers") scheme_of(spec).nOutliers = to_int<Index>(key, v);
    else if (key == "outlier_sd") scheme_of(spec).outlierSd = to_double(key, v);
    else if (key == "residual_sd") scheme_of(spec).residualSd = to_double(key, v);
    else if (key == "t_max") scheme_of(spec).tMax = to_double(key, v);
    else if (key == "bridge_scale") scheme_of(spec).bridgeScale = to_double(key, v);
    else if (key == "separation") scheme_of(spec).separation = to_double(key, v);
    else if (key == "n_informative") scheme_of(spec).nInformative = to_int<Index>(key, v);
    else fail(ErrorKind::parameter, "unknown config key '" + key + "'");
}

void apply_config_file(ExperimentSpec& spec, const std::filesystem::path& path) {
    // "scheme" and "seed" first so later scheme keys land on the right spec.
    auto kv = read_key_values(path);
    for (const char* first : {"seed", "scheme"}) {
        auto it = kv.find(first);
        if (it == kv.end()) continue;
        apply_key(spec, it->first, it->second);
        kv.erase(it);
    }
    for (const auto& [k, v] : kv) apply_key(spec, k, v);
}

Json to_json(const TarpConfig& c) {
    Json j;
    j["backend"] = to_string(c.backend);
    j["delta"] = c.delta ? Json(*c.delta) : Json("auto");
    j["replicates"] = c.nReplicates;
    if (c.mRange) j["m_range"] = {c.mRange->lo, c.mRange->hi};
    else j["m_range"] = "auto";
    j["psi_range"] = {c.psiRange.lo, c.psiRange.hi};
    j["m"] = c.fixedM ? Json(*c.fixedM) : Json(nullptr);
    j["psi"] = c.fixedPsi ? Json(*c.fixedPsi) : Json(nullptr);
    j["kappa"] = c.kappa;
    j["a_sigma"] = c.prior.aSigma;
    j["b_sigma"] = c.prior.bSigma;
    j["theta_scale"] = c.prior.thetaScale;
    j["aggregation"] = to_string(c.aggregation);
    j["intervals"] = to_string(c.intervals);
    j["k_folds"] = c.kFolds;
    j["level"] = c.level;
    j["seed"] = c.seed;
    j["center_y"] = c.centerY;
    j["probit_iterations"] = c.probit.iterations;
    j["probit_burnin"] = c.probit.burnin;
    j["probit_intercept"] = c.probitIntercept;
    j["probit_averaging"] = c.probitPosteriorAveraging;
    return j;
}

Json to_json(const SchemeSpec& s) {
    Json j;
    j["scheme"] = to_string(s.scheme);
    j["n"] = s.n;
    j["p"] = s.p;
    j["n_test"] = s.test_count();
    j["seed"] = s.seed;
    j["noise_sd"] = s.noiseSd;
    switch (s.scheme) {
        case Scheme::ar1:
            j["n_active"] = s.nActive;
            j["coef"] = s.coefValue;
            j["rho"] = s.rho;
            break;
        case Scheme::blockDiag:
            j["n_active"] = s.nActive;
            j["coef"] = s.coefValue;
            j["block_size"] = s.blockSize;
            j["rho_low"] = s.rhoLow;
            j["rho_high"] = s.rhoHigh;
            j["n_independent"] = s.nIndependent;
            break;
        case Scheme::pcrScheme:
            j["coef"] = s.coefValue;
            j["n_outliers"] = s.nOutliers;
            j["outlier_sd"] = s.outlierSd;
            j["residual_sd"] = s.residualSd;
            break;
        case Scheme::brownianBridge:
            j["n_active"] = s.nActive;
            j["coef"] = s.coefValue;
            j["t_max"] = s.tMax;
            j["bridge_scale"] = s.bridgeScale ? *s.bridgeScale : std::sqrt(s.tMax / 4.0);
            break;
        case Scheme::twoClusters:
            j["separation"] = s.separation;
            j["n_informative"] = s.nInformative;
            break;
    }
    return j;
}

Json to_json(const ExperimentSpec& s) {
    Json j;
    if (s.scheme) j["scheme"] = to_json(*s.scheme);
    if (s.trainPath) j["train"] = s.trainPath->string();
    if (s.testPath) j["test"] = s.testPath->string();
    j["datasets"] = s.nDatasets;
    j["tarp"] = to_json(s.tarp);
    return j;
}

}  // namespace tarp
