#include "tarp/distributions.hpp"
#include "tarp/error.hpp"
#include "tarp/posterior.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>

namespace tarp {

double truncated_standard_normal(double lower, Rng& rng) {
    if (lower < 0.5) {
        // Plain rejection accepts with probability >= 0.3 here.
        for (;;) {
            const double x = rng.normal();
            if (x >= lower) return x;
        }
    }
    // Robert (1995): translated exponential proposal with the optimal rate.
    const double rate = 0.5 * (lower + std::sqrt(lower * lower + 4.0));
    for (;;) {
        const double x = lower - std::log(rng.open_uniform()) / rate;
        const double d = x - rate;
        if (rng.uniform() <= std::exp(-0.5 * d * d)) return x;
    }
}

ProbitFit probit_gibbs(const MatrixXd& Z, const VectorXd& y, const ProbitOptions& options, Rng& rng,
                       const PriorHyper& prior) {
    const Index n = Z.rows();
    const Index m = Z.cols();
    require(n >= 1 && m >= 1, ErrorKind::dimension, "probit needs n >= 1 and m >= 1");
    require(y.size() == n, ErrorKind::dimension, "response length does not match Z rows");
    require(infer_response_kind(y) == ResponseKind::binary, ErrorKind::ingestion, "probit response must be in {0,1}");
    require(options.burnin >= 0 && options.iterations > options.burnin, ErrorKind::parameter,
            "probit needs iterations > burnin >= 0");
    require(prior.thetaScale > 0.0, ErrorKind::parameter, "theta prior scale must be positive");

    MatrixXd precision = MatrixXd::Identity(m, m) / (prior.thetaScale * prior.thetaScale);
    precision.selfadjointView<Eigen::Lower>().rankUpdate(Z.transpose());
    const Eigen::LLT<MatrixXd> llt(precision.selfadjointView<Eigen::Lower>());
    require(llt.info() == Eigen::Success, ErrorKind::internal, "I + Z'Z is not positive definite");
    const auto L = llt.matrixL();
    const auto U = llt.matrixU();

    const Index kept = options.iterations - options.burnin;
    ProbitFit fit;
    fit.draws = kept;
    fit.burnin = options.burnin;
    fit.thetaMean = VectorXd::Zero(m);
    if (options.keepDraws) fit.thetaDraws.resize(m, kept);

    constexpr Index kBatches = 20;
    const Index batchSize = std::max<Index>(1, kept / kBatches);
    MatrixXd batchSums = MatrixXd::Zero(m, kBatches);
    Eigen::VectorXi batchCounts = Eigen::VectorXi::Zero(kBatches);

    VectorXd theta = VectorXd::Zero(m);
    VectorXd latent(n);
    VectorXd noise(m);
    for (Index it = 0; it < options.iterations; ++it) {
        const VectorXd score = Z * theta;
        for (Index i = 0; i < n; ++i) {
            // y = 1: y* in (0, inf); y = 0: y* in (-inf, 0]
            latent[i] = y[i] == 1.0 ? score[i] + truncated_standard_normal(-score[i], rng)
                                    : score[i] - truncated_standard_normal(score[i], rng);
        }
        // theta ~ N(A^{-1} Z'y*, A^{-1}) with A = L L'
        VectorXd w = L.solve(Z.transpose() * latent);
        for (Index k = 0; k < m; ++k) noise[k] = rng.normal();
        theta = U.solve(w + noise);

        if (it >= options.burnin) {
            const Index d = it - options.burnin;
            fit.thetaMean += theta;
            if (options.keepDraws) fit.thetaDraws.col(d) = theta;
            const Index b = std::min<Index>(d / batchSize, kBatches - 1);
            batchSums.col(b) += theta;
            ++batchCounts[b];
        }
    }
    fit.thetaMean /= static_cast<double>(kept);

    // Batch means over the non-empty batches.
    VectorXd acc = VectorXd::Zero(m);
    Index used = 0;
    for (Index b = 0; b < kBatches; ++b) {
        if (batchCounts[b] == 0) continue;
        acc += (batchSums.col(b) / batchCounts[b] - fit.thetaMean).cwiseAbs2();
        ++used;
    }
    fit.thetaMcse = used > 1 ? VectorXd((acc / static_cast<double>(used * (used - 1))).cwiseSqrt())
                             : VectorXd::Constant(m, std::numeric_limits<double>::quiet_NaN());
    return fit;
}

VectorXd predict_probit(const ProbitFit& fit, const MatrixXd& Znew) {
    require(Znew.cols() == fit.thetaMean.size(), ErrorKind::dimension, "Znew column count does not match theta");
    const VectorXd score = Znew * fit.thetaMean;
    return score.unaryExpr([](double s) { return dist::normal_cdf(s); });
}

VectorXd predict_probit_averaged(const ProbitFit& fit, const MatrixXd& Znew) {
    require(fit.thetaDraws.cols() > 0, ErrorKind::parameter, "posterior averaging needs retained draws");
    require(Znew.cols() == fit.thetaDraws.rows(), ErrorKind::dimension, "Znew column count does not match theta");
    const MatrixXd scores = Znew * fit.thetaDraws;
    return scores.unaryExpr([](double s) { return dist::normal_cdf(s); }).rowwise().mean();
}

}  // namespace tarp
