#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tarp/error.hpp"
#include "tarp/metrics.hpp"
#include "tarp/posterior.hpp"
#include "test_util.hpp"

#include <cmath>

using namespace tarp;

namespace {

VectorXd vec(std::initializer_list<double> v) {
    VectorXd out(static_cast<Index>(v.size()));
    Index i = 0;
    for (double x : v) out[i++] = x;
    return out;
}

/// P(score+ > score-) + P(tie)/2 over all pairs.
double auc_brute(const VectorXd& s, const VectorXd& y) {
    double num = 0, den = 0;
    for (Index i = 0; i < s.size(); ++i)
        for (Index j = 0; j < s.size(); ++j)
            if (y[i] == 1 && y[j] == 0) {
                den += 1;
                num += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
            }
    return num / den;
}

}  // namespace

TEST_CASE("mspe") {
    const VectorXd y = vec({1, -2, 3});
    CHECK(mspe(y, y) == 0.0);
    CHECK(mspe((y.array() + 2).matrix(), y) == 4.0);
    CHECK(mspe(vec({1, 2}), vec({0, 0})) == 2.5);
    CHECK(mspe(vec({1, 2.5}), vec({0, 0})) > 0.0);
    CHECK_THROWS_AS(mspe(vec({1}), vec({1, 2})), Error);
}

TEST_CASE("coverage and width") {
    const VectorXd y = vec({0, 1, 2});
    auto c = ecp_width(vec({-1, 0, 1}), vec({1, 2, 3}), y);
    CHECK(c.ecp == 1.0);
    CHECK(c.meanWidth == 2.0);
    c = ecp_width(y, y, y);  // closed intervals of zero width
    CHECK(c.ecp == 1.0);
    CHECK(c.meanWidth == 0.0);
    c = ecp_width(vec({-1, 5, 5}), vec({1, 6, 6}), y);
    CHECK(c.ecp == doctest::Approx(1.0 / 3.0));
    CHECK_THROWS_AS(ecp_width(vec({1, 0, 0}), vec({0, 0, 0}), y), Error);
}

TEST_CASE("misclassification") {
    const VectorXd y = vec({0, 1, 1, 0});
    CHECK(misclass(y, y) == 0.0);
    CHECK(misclass((1.0 - y.array()).matrix(), y) == 1.0);
    CHECK(misclass(VectorXd::Constant(4, 0.5), y) == 0.5);  // ties go to class 1: the zeros are wrong
    CHECK_THROWS_AS(misclass(vec({0.2, 0.3}), vec({0, 2})), Error);
    CHECK_THROWS_AS(misclass(vec({1.2, 0.3}), vec({0, 1})), Error);
}

TEST_CASE("ROC AUC") {
    CHECK(roc_auc(vec({0.1, 0.2, 0.8, 0.9}), vec({0, 0, 1, 1})) == 1.0);
    CHECK(roc_auc(VectorXd::Constant(5, 0.3), vec({0, 1, 0, 1, 1})) == 0.5);
    CHECK(roc_auc(vec({0.1, 0.4, 0.35, 0.8}), vec({0, 0, 1, 1})) == 0.75);
    CHECK_THROWS_AS(roc_auc(vec({0.1, 0.2}), vec({1, 1})), Error);

    // Random scores with ties: rank formula equals the pairwise definition,
    // is invariant to monotone transforms, and flips under negation.
    Rng rng(5);
    VectorXd s(60), y(60);
    for (Index i = 0; i < 60; ++i) {
        s[i] = std::round(rng.normal() * 3) / 3;
        y[i] = rng.bernoulli(0.4) ? 1 : 0;
    }
    const double a = roc_auc(s, y);
    CHECK(a == doctest::Approx(auc_brute(s, y)).epsilon(1e-14));
    CHECK(roc_auc(s.array().exp().matrix(), y) == doctest::Approx(a).epsilon(1e-14));
    CHECK(roc_auc((3 * s.array() + 1).matrix(), y) == doctest::Approx(a).epsilon(1e-14));
    CHECK(a + roc_auc((-s).eval(), y) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("calibration MSD") {
    CHECK(calibration_msd(VectorXd::Constant(4, 0.05), VectorXd::Zero(4)) == doctest::Approx(0.0025).epsilon(1e-12));
    CHECK(calibration_msd(VectorXd::Constant(4, 0.95), VectorXd::Zero(4)) == doctest::Approx(0.9025).epsilon(1e-12));
    // Rate equals the midpoint in every non-empty bin: 1 of 2 in [0.5, 0.6) is not a midpoint,
    // so use bins [0.2, 0.3) with 1/4 positives and [0.7, 0.8) with 3/4.
    const VectorXd p = vec({0.22, 0.23, 0.27, 0.29, 0.71, 0.72, 0.78, 0.79});
    const VectorXd y = vec({1, 0, 0, 0, 1, 1, 1, 0});
    CHECK(calibration_msd(p, y) < 1e-15);
    CHECK(calibration_msd(vec({1.0}), vec({1})) == doctest::Approx(0.0025));
    CHECK_THROWS_AS(calibration_msd(VectorXd(0), VectorXd(0)), Error);
}

TEST_CASE("coverage of conjugate intervals approaches the level on well-specified data") {
    // Draw data from the conjugate model itself; 50% intervals should cover about half.
    const Index n = 400, m = 3, nTest = 20000;
    Rng rng(9);
    const MatrixXd Z = testutil::gaussian(n + nTest, m, 10);
    const VectorXd theta = VectorXd::LinSpaced(m, -1, 1);
    VectorXd y = Z * theta;
    for (Index i = 0; i < y.size(); ++i) y[i] += rng.normal();
    const CompressedPosterior post = fit_compressed(Z.topRows(n), y.head(n), PriorHyper{});
    const PredictiveSummary pred = predict(post, Z.bottomRows(nTest), 0.5);
    const Coverage c = ecp_width(pred.lower, pred.upper, y.tail(nTest));
    CHECK(std::abs(c.ecp - 0.5) < 4.0 * std::sqrt(0.25 / nTest) + 0.01);
}
