#include "tarp/posterior.hpp"

#include "tarp/distributions.hpp"
#include "tarp/error.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <numbers>

namespace tarp {

void PriorHyper::validate() const {
    require(aSigma > 0.0 && bSigma > 0.0 && thetaScale > 0.0, ErrorKind::parameter,
            "prior hyperparameters must be strictly positive");
}

CompressedPosterior fit_compressed(const MatrixXd& Z, const VectorXd& y, const PriorHyper& prior) {
    prior.validate();
    const Index n = Z.rows();
    const Index m = Z.cols();
    require(n >= 1 && m >= 1, ErrorKind::dimension, "fit needs n >= 1 and m >= 1");
    require(y.size() == n, ErrorKind::dimension, "response length does not match Z rows");
    require(Z.allFinite() && y.allFinite(), ErrorKind::ingestion, "non-finite input to fit");

    MatrixXd precision = MatrixXd::Identity(m, m) / (prior.thetaScale * prior.thetaScale);
    precision.selfadjointView<Eigen::Lower>().rankUpdate(Z.transpose());
    precision.triangularView<Eigen::StrictlyUpper>() = precision.transpose();
    const Eigen::LLT<MatrixXd> llt(precision);
    require(llt.info() == Eigen::Success, ErrorKind::internal, "I + Z'Z is not positive definite");

    CompressedPosterior post;
    post.n = n;
    post.prior = prior;
    post.muT = llt.solve(Z.transpose() * y);
    post.W = llt.solve(MatrixXd::Identity(m, m));
    post.W = 0.5 * (post.W + post.W.transpose()).eval();
    post.logDetW = -2.0 * llt.matrixLLT().diagonal().array().log().sum();
    post.df = static_cast<double>(n) + 2.0 * prior.aSigma;
    post.scaleFactor = y.squaredNorm() - post.muT.dot(precision * post.muT) + 2.0 * prior.bSigma;
    require(post.scaleFactor > 0.0 && std::isfinite(post.scaleFactor), ErrorKind::internal,
            "posterior scale factor is not positive");
    return post;
}

Sigma2Posterior sigma2_posterior(const CompressedPosterior& post) {
    return {post.prior.aSigma + 0.5 * static_cast<double>(post.n), 0.5 * post.scaleFactor};
}

PredictiveSummary predict(const CompressedPosterior& post, const MatrixXd& Znew, double level) {
    require(Znew.cols() == post.m(), ErrorKind::dimension,
            "Znew has " + std::to_string(Znew.cols()) + " columns, expected " + std::to_string(post.m()));
    require(level > 0.0 && level < 1.0, ErrorKind::parameter, "interval level must lie in (0,1)");

    PredictiveSummary out;
    out.df = post.df;
    out.level = level;
    out.mean = Znew * post.muT;
    // diag(Znew W Znew') without forming the n_new x n_new matrix
    const VectorXd quad = (Znew * post.W).cwiseProduct(Znew).rowwise().sum();
    out.marginalScale = ((1.0 + quad.array()) * (post.scaleFactor / post.df)).sqrt();
    const double tq = dist::student_t_quantile(0.5 * (1.0 + level), post.df);
    out.lower = out.mean - tq * out.marginalScale;
    out.upper = out.mean + tq * out.marginalScale;
    return out;
}

double log_marginal_likelihood(const CompressedPosterior& post) {
    const auto& pr = post.prior;
    const double n = static_cast<double>(post.n);
    const double m = static_cast<double>(post.m());
    return 0.5 * post.logDetW - m * std::log(pr.thetaScale) - 0.5 * post.df * std::log(0.5 * post.scaleFactor) +
           std::lgamma(0.5 * post.df) - std::lgamma(pr.aSigma) + pr.aSigma * std::log(pr.bSigma) -
           0.5 * n * std::log(2.0 * std::numbers::pi);
}

double log_marginal_likelihood(const MatrixXd& Z, const VectorXd& y, const PriorHyper& prior) {
    return log_marginal_likelihood(fit_compressed(Z, y, prior));
}

}  // namespace tarp
