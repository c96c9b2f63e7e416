#include "tarp/simgen.hpp"

#include "tarp/error.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace tarp {

namespace {

// Structure draws (active set, loadings) and row draws use separate substreams
// so changing nTest does not move the active set.
constexpr std::uint64_t kStructureTag = 0x5354;
constexpr std::uint64_t kRowTag = 0x524F;
constexpr std::uint64_t kNoiseTag = 0x4E4F;

Rng stream(std::uint64_t seed, std::uint64_t tag) {
    return Rng(substream_seed(seed, tag), Stream::data);
}

/// k distinct indices from pool, returned ascending (partial Fisher-Yates).
std::vector<Index> choose(std::vector<Index> pool, Index k, Rng& rng) {
    require(k <= static_cast<Index>(pool.size()), ErrorKind::parameter, "not enough candidates for the active set");
    for (Index i = 0; i < k; ++i) {
        const auto j = rng.uniform_int(i, static_cast<Index>(pool.size()) - 1);
        std::swap(pool[i], pool[j]);
    }
    pool.resize(static_cast<std::size_t>(k));
    std::sort(pool.begin(), pool.end());
    return pool;
}

std::vector<Index> range(Index lo, Index hi) {
    std::vector<Index> v(static_cast<std::size_t>(hi - lo));
    std::iota(v.begin(), v.end(), lo);
    return v;
}

SimulatedData assemble(const SchemeSpec& spec, MatrixXd X, VectorXd beta, std::vector<Index> outliers = {}) {
    const Index n = spec.n;
    Rng noise = stream(spec.seed, kNoiseTag);
    VectorXd y = make_response(X, beta, spec.noiseSd, noise);

    SimulatedData out;
    out.spec = spec;
    out.trueBeta = std::move(beta);
    for (Index j = 0; j < out.trueBeta.size(); ++j)
        if (out.trueBeta[j] != 0.0) out.activeIdx.push_back(j);
    out.outlierRows = std::move(outliers);
    out.testX = X.bottomRows(X.rows() - n);
    out.testY = y.tail(X.rows() - n);
    MatrixXd trainX = X.topRows(n);
    VectorXd trainY = y.head(n);
    out.train = make_dataset(std::move(trainX), std::move(trainY));
    return out;
}

}  // namespace

std::string_view to_string(Scheme s) noexcept {
    switch (s) {
        case Scheme::ar1: return "ar1";
        case Scheme::blockDiag: return "block";
        case Scheme::pcrScheme: return "pcr";
        case Scheme::brownianBridge: return "bridge";
        case Scheme::twoClusters: return "clusters";
    }
    return "?";
}

Scheme parse_scheme(std::string_view s) {
    if (s == "ar1" || s == "I" || s == "1") return Scheme::ar1;
    if (s == "block" || s == "II" || s == "2") return Scheme::blockDiag;
    if (s == "pcr" || s == "III" || s == "3") return Scheme::pcrScheme;
    if (s == "bridge" || s == "IV" || s == "4") return Scheme::brownianBridge;
    if (s == "clusters") return Scheme::twoClusters;
    fail(ErrorKind::parameter, "unknown scheme '" + std::string(s) + "'");
}

void SchemeSpec::validate() const {
    require(n >= 2 && p >= 1, ErrorKind::parameter, "scheme needs n >= 2 and p >= 1");
    require(test_count() >= 0, ErrorKind::parameter, "nTest must be >= 0");
    require(noiseSd >= 0.0 && std::isfinite(noiseSd), ErrorKind::parameter, "noiseSd must be finite and >= 0");
    require(std::isfinite(coefValue), ErrorKind::parameter, "coefValue must be finite");
    switch (scheme) {
        case Scheme::ar1:
            require(std::abs(rho) < 1.0, ErrorKind::parameter, "ar1 needs |rho| < 1");
            require(nActive >= 0 && nActive <= p, ErrorKind::parameter, "nActive must lie in [0, p]");
            break;
        case Scheme::blockDiag:
            require(nIndependent >= 1 && p >= 2 * nIndependent, ErrorKind::parameter,
                    "block scheme needs p >= " + std::to_string(2 * nIndependent));
            require(blockSize >= 1 && (p - nIndependent) % blockSize == 0, ErrorKind::parameter,
                    "blockSize must divide p - nIndependent");
            require((p - nIndependent) / blockSize >= 2, ErrorKind::parameter, "block scheme needs at least two blocks");
            require(rhoLow >= 0.0 && rhoLow < 1.0 && rhoHigh >= 0.0 && rhoHigh < 1.0, ErrorKind::parameter,
                    "block correlations must lie in [0, 1)");
            require(nActive >= 1, ErrorKind::parameter, "block scheme needs nActive >= 1");
            break;
        case Scheme::pcrScheme:
            require(p >= 3, ErrorKind::parameter, "pcr scheme needs p >= 3");
            require(nOutliers >= 0 && nOutliers < n, ErrorKind::parameter, "nOutliers must lie in [0, n)");
            require(outlierSd > 0.0 && residualSd >= 0.0, ErrorKind::parameter, "outlierSd > 0 and residualSd >= 0");
            break;
        case Scheme::brownianBridge:
            require(p >= 2, ErrorKind::parameter, "bridge scheme needs p >= 2");
            require(tMax > 0.0, ErrorKind::parameter, "tMax must be positive");
            require(!bridgeScale || *bridgeScale > 0.0, ErrorKind::parameter, "bridge scale must be positive");
            require(nActive >= 0 && nActive <= p, ErrorKind::parameter, "nActive must lie in [0, p]");
            break;
        case Scheme::twoClusters:
            require(nInformative >= 1 && nInformative <= p, ErrorKind::parameter, "nInformative must lie in [1, p]");
            require(separation >= 0.0, ErrorKind::parameter, "separation must be >= 0");
            break;
    }
}

VectorXd make_response(const MatrixXd& X, const VectorXd& beta, double noiseSd, Rng& rng) {
    require(X.cols() == beta.size(), ErrorKind::dimension, "beta length does not match X columns");
    VectorXd y = X * beta;
    if (noiseSd > 0.0)
        for (Index i = 0; i < y.size(); ++i) y[i] += noiseSd * rng.normal();
    return y;
}

SimulatedData gen_scheme1(const SchemeSpec& spec) {
    require(spec.scheme == Scheme::ar1, ErrorKind::parameter, "spec is not an ar1 scheme");
    spec.validate();
    const Index rows = spec.n + spec.test_count();
    const Index p = spec.p;
    Rng structure = stream(spec.seed, kStructureTag);
    VectorXd beta = VectorXd::Zero(p);
    for (Index j : choose(range(0, p), spec.nActive, structure)) beta[j] = spec.coefValue;

    Rng rng = stream(spec.seed, kRowTag);
    const double innov = std::sqrt(1.0 - spec.rho * spec.rho);
    MatrixXd X(rows, p);
    for (Index i = 0; i < rows; ++i) {
        double prev = rng.normal();
        X(i, 0) = prev;
        for (Index j = 1; j < p; ++j) {
            prev = spec.rho * prev + innov * rng.normal();
            X(i, j) = prev;
        }
    }
    return assemble(spec, std::move(X), std::move(beta));
}

SimulatedData gen_scheme2(const SchemeSpec& spec) {
    require(spec.scheme == Scheme::blockDiag, ErrorKind::parameter, "spec is not a block scheme");
    spec.validate();
    const Index rows = spec.n + spec.test_count();
    const Index p = spec.p;
    const Index nBlocks = (p - spec.nIndependent) / spec.blockSize;
    const Index nLow = nBlocks / 2;  // first half at rhoLow, the rest at rhoHigh
    const Index highBegin = nLow * spec.blockSize;
    const Index tailBegin = nBlocks * spec.blockSize;

    Rng structure = stream(spec.seed, kStructureTag);
    VectorXd beta = VectorXd::Zero(p);
    for (Index j : choose(range(highBegin, tailBegin), spec.nActive - 1, structure)) beta[j] = spec.coefValue;
    beta[choose(range(tailBegin, p), 1, structure).front()] = spec.coefValue;

    Rng rng = stream(spec.seed, kRowTag);
    MatrixXd X(rows, p);
    for (Index i = 0; i < rows; ++i) {
        for (Index b = 0; b < nBlocks; ++b) {
            const double rho = b < nLow ? spec.rhoLow : spec.rhoHigh;
            const double shared = std::sqrt(rho) * rng.normal();
            const double own = std::sqrt(1.0 - rho);
            for (Index j = b * spec.blockSize; j < (b + 1) * spec.blockSize; ++j) X(i, j) = shared + own * rng.normal();
        }
        for (Index j = tailBegin; j < p; ++j) X(i, j) = rng.normal();
    }
    return assemble(spec, std::move(X), std::move(beta));
}

MatrixXd scheme3_loadings(Index p, std::uint64_t seed) {
    require(p >= 3, ErrorKind::parameter, "pcr scheme needs p >= 3");
    Rng structure = stream(seed, kStructureTag);
    MatrixXd G(p, 3);
    for (Index j = 0; j < 3; ++j)
        for (Index i = 0; i < p; ++i) G(i, j) = structure.normal();
    Eigen::HouseholderQR<MatrixXd> qr(G);
    MatrixXd P = qr.householderQ() * MatrixXd::Identity(p, 3);
    return P;
}

SimulatedData gen_scheme3(const SchemeSpec& spec) {
    require(spec.scheme == Scheme::pcrScheme, ErrorKind::parameter, "spec is not a pcr scheme");
    spec.validate();
    const Index rows = spec.n + spec.test_count();
    const Index p = spec.p;
    const MatrixXd P = scheme3_loadings(p, spec.seed);
    const double sd[3] = {15.0, 10.0, 7.0};

    Rng rng = stream(spec.seed, kRowTag);
    MatrixXd F(rows, 3);
    for (Index i = 0; i < rows; ++i)
        for (Index k = 0; k < 3; ++k) F(i, k) = sd[k] * rng.normal();
    MatrixXd X = F * P.transpose();
    if (spec.residualSd > 0.0)
        for (Index j = 0; j < p; ++j)
            for (Index i = 0; i < rows; ++i) X(i, j) += spec.residualSd * rng.normal();

    // Outliers replace whole training rows; their responses follow from the perturbed rows.
    Rng structure = stream(spec.seed, kStructureTag + 1);
    std::vector<Index> outliers = choose(range(0, spec.n), spec.nOutliers, structure);
    for (Index i : outliers)
        for (Index j = 0; j < p; ++j) X(i, j) = spec.outlierSd * rng.normal();

    VectorXd beta = spec.coefValue * P.col(0);
    return assemble(spec, std::move(X), std::move(beta), std::move(outliers));
}

SimulatedData gen_scheme4(const SchemeSpec& spec) {
    require(spec.scheme == Scheme::brownianBridge, ErrorKind::parameter, "spec is not a bridge scheme");
    spec.validate();
    const Index rows = spec.n + spec.test_count();
    const Index p = spec.p;
    const double T = spec.tMax;
    const double scale = spec.bridgeScale ? *spec.bridgeScale : std::sqrt(T / 4.0);

    Rng structure = stream(spec.seed, kStructureTag);
    VectorXd beta = VectorXd::Zero(p);
    for (Index j : choose(range(0, p), spec.nActive, structure)) beta[j] = spec.coefValue;

    // Interior grid t_j = T (j+1)/(p+1). Build Brownian motion on the grid plus
    // the endpoint, then pin: B(t) = W(t) - (t/T) W(T).
    const double dt = T / static_cast<double>(p + 1);
    const double step = std::sqrt(dt);
    Rng rng = stream(spec.seed, kRowTag);
    MatrixXd X(rows, p);
    VectorXd w(p);
    for (Index i = 0; i < rows; ++i) {
        double acc = 0.0;
        for (Index j = 0; j < p; ++j) w[j] = (acc += step * rng.normal());
        const double wT = acc + step * rng.normal();
        for (Index j = 0; j < p; ++j) {
            const double t = dt * static_cast<double>(j + 1);
            X(i, j) = scale * (w[j] - (t / T) * wT);
        }
    }
    return assemble(spec, std::move(X), std::move(beta));
}

SimulatedData gen_two_clusters(const SchemeSpec& spec) {
    require(spec.scheme == Scheme::twoClusters, ErrorKind::parameter, "spec is not a two-cluster scheme");
    spec.validate();
    const Index rows = spec.n + spec.test_count();
    const Index p = spec.p;
    Rng structure = stream(spec.seed, kStructureTag);
    const std::vector<Index> informative = choose(range(0, p), spec.nInformative, structure);
    // Centers at +-(separation/2) u with u a unit vector on the informative coordinates.
    const double shift = 0.5 * spec.separation / std::sqrt(static_cast<double>(spec.nInformative));

    Rng rng = stream(spec.seed, kRowTag);
    MatrixXd X(rows, p);
    VectorXd y(rows);
    for (Index i = 0; i < rows; ++i) {
        y[i] = rng.bernoulli(0.5) ? 1.0 : 0.0;
        for (Index j = 0; j < p; ++j) X(i, j) = rng.normal();
        const double sign = y[i] == 1.0 ? 1.0 : -1.0;
        for (Index j : informative) X(i, j) += sign * shift;
    }

    SimulatedData out;
    out.spec = spec;
    out.trueBeta = VectorXd::Zero(p);
    for (Index j : informative) out.trueBeta[j] = shift;
    out.activeIdx = informative;
    out.testX = X.bottomRows(rows - spec.n);
    out.testY = y.tail(rows - spec.n);
    MatrixXd trainX = X.topRows(spec.n);
    VectorXd trainY = y.head(spec.n);
    out.train = make_dataset(std::move(trainX), std::move(trainY));
    return out;
}

SimulatedData simulate(const SchemeSpec& spec) {
    switch (spec.scheme) {
        case Scheme::ar1: return gen_scheme1(spec);
        case Scheme::blockDiag: return gen_scheme2(spec);
        case Scheme::pcrScheme: return gen_scheme3(spec);
        case Scheme::brownianBridge: return gen_scheme4(spec);
        case Scheme::twoClusters: return gen_two_clusters(spec);
    }
    fail(ErrorKind::internal, "unhandled scheme");
}

}  // namespace tarp
