#pragma once

// Conjugate Normal-Inverse-Gamma inference on compressed features:
//   y = Z theta + e,  e ~ N(0, sigma^2 I),  theta | sigma^2 ~ N(0, sigma^2 s^2 I),
//   sigma^2 ~ InvGamma(a_sigma, b_sigma),
// plus a probit Gibbs sampler for binary responses.

#include "tarp/data.hpp"
#include "tarp/rng.hpp"

namespace tarp {

struct PriorHyper {
    double aSigma = 0.02;
    double bSigma = 0.02;
    double thetaScale = 1.0;  // prior sd multiplier s

    void validate() const;
};

struct CompressedPosterior {
    VectorXd muT;          // posterior location of theta
    MatrixXd W;            // (Z'Z + I/s^2)^{-1}
    double df = 0.0;       // n + 2 a_sigma
    double scaleFactor = 0.0;  // y'y - mu' W^{-1} mu + 2 b_sigma
    double logDetW = 0.0;  // from the same Cholesky factor
    Index n = 0;
    PriorHyper prior;

    Index m() const noexcept { return muT.size(); }
};

struct Sigma2Posterior {
    double shape = 0.0;
    double rate = 0.0;
};

/// Per-point marginals of the multivariate-t posterior predictive.
struct PredictiveSummary {
    VectorXd mean;
    VectorXd marginalScale;  // t scale parameter per point
    double df = 0.0;
    VectorXd lower;
    VectorXd upper;
    double level = 0.0;
};

CompressedPosterior fit_compressed(const MatrixXd& Z, const VectorXd& y, const PriorHyper& prior);

/// Shape a + n/2 and rate scaleFactor/2.
Sigma2Posterior sigma2_posterior(const CompressedPosterior& post);

/// Mean Znew mu and central `level` intervals mean +- t_{(1+level)/2, df} * scale.
PredictiveSummary predict(const CompressedPosterior& post, const MatrixXd& Znew, double level);

/// Log evidence p(y | Z) of the conjugate model.
double log_marginal_likelihood(const CompressedPosterior& post);
double log_marginal_likelihood(const MatrixXd& Z, const VectorXd& y, const PriorHyper& prior);

// ---------------------------------------------------------------------------
// Probit regression by data augmentation: y*_i ~ N(z_i' theta, 1), y_i = 1 iff y*_i > 0,
// theta ~ N(0, s^2 I).

struct ProbitOptions {
    Index iterations = 2000;
    Index burnin = 500;
    bool keepDraws = false;
};

struct ProbitFit {
    VectorXd thetaMean;
    VectorXd thetaMcse;  // batch-means Monte Carlo standard error
    Index draws = 0;     // retained (post burn-in) draws
    Index burnin = 0;
    MatrixXd thetaDraws;  // m x draws when keepDraws
};

/// One draw of N(0,1) truncated to [lower, inf); exponential-proposal rejection in the tail.
double truncated_standard_normal(double lower, Rng& rng);

ProbitFit probit_gibbs(const MatrixXd& Z, const VectorXd& y, const ProbitOptions& options, Rng& rng,
                       const PriorHyper& prior = {});

/// Plug-in probabilities Phi(Znew * thetaMean).
VectorXd predict_probit(const ProbitFit& fit, const MatrixXd& Znew);
/// Posterior-predictive probabilities averaged over the retained draws (needs keepDraws).
VectorXd predict_probit_averaged(const ProbitFit& fit, const MatrixXd& Znew);

}  // namespace tarp
