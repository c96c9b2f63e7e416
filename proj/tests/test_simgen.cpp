#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tarp/error.hpp"
#include "tarp/simgen.hpp"

#include <Eigen/SVD>

#include <cmath>

using namespace tarp;

namespace {

double corr(const VectorXd& a, const VectorXd& b) {
    const VectorXd da = a.array() - a.mean();
    const VectorXd db = b.array() - b.mean();
    return da.dot(db) / std::sqrt(da.squaredNorm() * db.squaredNorm());
}

double cov(const VectorXd& a, const VectorXd& b) {
    return ((a.array() - a.mean()) * (b.array() - b.mean())).sum() / double(a.size() - 1);
}

SchemeSpec big(Scheme s, Index n, Index p) {
    SchemeSpec spec;
    spec.scheme = s;
    spec.n = n;
    spec.p = p;
    spec.nTest = 0;
    spec.nActive = std::min<Index>(spec.nActive, p);
    spec.seed = 12345;
    return spec;
}

}  // namespace

TEST_CASE("scheme I: AR(1) correlation") {
    const SimulatedData d = gen_scheme1(big(Scheme::ar1, 100000, 5));
    CHECK(std::abs(corr(d.train.X.col(0), d.train.X.col(2)) - 0.09) < 0.01);
    CHECK(std::abs(corr(d.train.X.col(1), d.train.X.col(2)) - 0.3) < 0.01);
    CHECK(std::abs(d.train.X.col(4).squaredNorm() / 100000 - 1.0) < 0.02);

    SchemeSpec s = big(Scheme::ar1, 20000, 6);
    s.rho = 0.0;
    const SimulatedData iid = gen_scheme1(s);
    for (Index a = 0; a < 6; ++a)
        for (Index b = a + 1; b < 6; ++b)
            CHECK(std::abs(corr(iid.train.X.col(a), iid.train.X.col(b))) < 4.0 / std::sqrt(20000.0));

    s.rho = 1.0;
    CHECK_THROWS_AS(gen_scheme1(s), Error);
}

TEST_CASE("scheme I: active set and noiseless response") {
    SchemeSpec s;
    s.n = 30;
    s.p = 400;
    s.noiseSd = 0.0;
    s.seed = 5;
    const SimulatedData d = gen_scheme1(s);
    CHECK(d.activeIdx.size() == 50);
    CHECK((d.trueBeta.array() == 0.0 || d.trueBeta.array() == 1.0).all());
    CHECK(d.train.y == d.train.X * d.trueBeta);
    CHECK(d.testX.rows() == 30);
    CHECK(d.testY == d.testX * d.trueBeta);
}

TEST_CASE("scheme II: block correlations and active placement") {
    SchemeSpec s = big(Scheme::blockDiag, 100000, 60);
    s.blockSize = 10;
    s.nIndependent = 20;
    s.nActive = 5;
    const SimulatedData d = gen_scheme2(s);
    const MatrixXd& X = d.train.X;
    // Blocks 0,1 are at 0.3 and 2,3 at 0.9; columns 40..59 are independent.
    CHECK(std::abs(corr(X.col(1), X.col(7)) - 0.3) < 0.01);
    CHECK(std::abs(corr(X.col(21), X.col(28)) - 0.9) < 0.01);
    CHECK(std::abs(corr(X.col(21), X.col(31))) < 0.01);
    CHECK(std::abs(corr(X.col(5), X.col(45))) < 0.01);
    CHECK(std::abs(corr(X.col(44), X.col(45))) < 0.01);

    SchemeSpec full;
    full.scheme = Scheme::blockDiag;
    full.n = 10;
    full.p = 2000;
    full.seed = 8;
    const SimulatedData e = gen_scheme2(full);
    CHECK(e.activeIdx.size() == 50);
    // 18 blocks: 9 at 0.3 (columns < 900), 9 at 0.9 (900..1799), independent tail from 1800.
    int high = 0, tail = 0;
    for (Index j : e.activeIdx) {
        if (j >= 900 && j < 1800) ++high;
        if (j >= 1800) ++tail;
    }
    CHECK(high == 49);
    CHECK(tail == 1);
    full.blockSize = 700;
    CHECK_THROWS_AS(gen_scheme2(full), Error);
}

TEST_CASE("scheme III: rank-3 structure") {
    SchemeSpec s = big(Scheme::pcrScheme, 10000, 50);
    s.nOutliers = 0;
    s.noiseSd = 0.0;
    const SimulatedData d = gen_scheme3(s);
    CHECK(d.outlierRows.empty());
    const MatrixXd P = scheme3_loadings(50, s.seed);
    CHECK((P.transpose() * P - MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-10);
    Eigen::BDCSVD<MatrixXd> svd(d.train.X);
    const VectorXd sv = svd.singularValues();
    const double root = std::sqrt(10000.0);
    CHECK(std::abs(sv[0] / (root * 15) - 1) < 0.05);
    CHECK(std::abs(sv[1] / (root * 10) - 1) < 0.05);
    CHECK(std::abs(sv[2] / (root * 7) - 1) < 0.05);
    CHECK(sv[3] < 1e-8 * sv[0]);
    CHECK((d.trueBeta - P.col(0)).cwiseAbs().maxCoeff() == 0.0);
    CHECK(d.train.y == d.train.X * d.trueBeta);
}

TEST_CASE("scheme III: outliers sit in training rows and follow the model") {
    SchemeSpec s;
    s.scheme = Scheme::pcrScheme;
    s.n = 40;
    s.p = 30;
    s.noiseSd = 0.0;
    s.seed = 2;
    const SimulatedData d = gen_scheme3(s);
    CHECK(d.outlierRows.size() == 5);
    for (Index i : d.outlierRows) {
        CHECK(i < 40);
        CHECK(d.train.X.row(i).norm() > 20.0);  // about 10 * sqrt(30)
        CHECK(d.train.y[i] == doctest::Approx(d.train.X.row(i).dot(d.trueBeta)));
    }
    s.nOutliers = 40;
    CHECK_THROWS_AS(gen_scheme3(s), Error);
}

TEST_CASE("scheme IV: Brownian bridge moments") {
    const Index p = 39;  // interior points t = 10 (j+1) / 40
    const Index n = 100000;
    const SimulatedData d = gen_scheme4(big(Scheme::brownianBridge, n, p));
    const MatrixXd& X = d.train.X;
    VectorXd var(p);
    for (Index j = 0; j < p; ++j) {
        var[j] = cov(X.col(j), X.col(j));
        CHECK(std::abs(X.col(j).mean()) < 4.0 * std::sqrt(var[j] / n));
    }
    // Variance scale^2 t (1 - t/T) rises to the midpoint and falls back.
    for (Index j = 1; j <= 19; ++j) CHECK(var[j] > var[j - 1]);
    for (Index j = 20; j < p; ++j) CHECK(var[j] < var[j - 1]);
    CHECK(std::abs(std::sqrt(var[19]) / 2.5 - 1.0) < 0.02);
    const double theory = 2.5 * 2.5 * (1.0 - 7.5 / 10.0);  // scale^2 s (1 - t/T) at (2.5, 7.5)
    CHECK(std::abs(cov(X.col(9), X.col(29)) / theory - 1.0) < 0.05);
}

TEST_CASE("make_response") {
    Rng rng(1);
    const MatrixXd X = MatrixXd::Random(20000, 3);
    const VectorXd y = make_response(X, VectorXd::Zero(3), 2.0, rng);
    const double v = (y.array() - y.mean()).square().sum() / 19999.0;
    CHECK(std::abs(v / 4.0 - 1.0) < 0.05);
    Rng rng2(2);
    const VectorXd beta = VectorXd::LinSpaced(3, 1, 3);
    CHECK(make_response(X, beta, 0.0, rng2) == X * beta);
    CHECK_THROWS_AS(make_response(X, VectorXd::Zero(2), 1.0, rng2), Error);
}

TEST_CASE("generators are deterministic, seed-sensitive, and train/test share a law") {
    for (Scheme sc : {Scheme::ar1, Scheme::blockDiag, Scheme::pcrScheme, Scheme::brownianBridge, Scheme::twoClusters}) {
        SchemeSpec s;
        s.scheme = sc;
        s.n = 400;
        s.p = sc == Scheme::blockDiag ? 400 : 120;
        s.nTest = 400;
        s.nOutliers = 0;
        s.seed = 77;
        const SimulatedData a = simulate(s);
        const SimulatedData b = simulate(s);
        CHECK(a.train.X == b.train.X);
        CHECK(a.train.y == b.train.y);
        CHECK(a.testY == b.testY);
        s.seed = 78;
        CHECK(simulate(s).train.X != a.train.X);

        // Two-sample z test on column 7 at alpha = 0.01.
        const VectorXd tr = a.train.X.col(7), te = a.testX.col(7);
        const double se = std::sqrt(cov(tr, tr) / tr.size() + cov(te, te) / te.size());
        CHECK(std::abs(tr.mean() - te.mean()) / se < 2.576);
    }
}

TEST_CASE("two clusters") {
    SchemeSpec s;
    s.scheme = Scheme::twoClusters;
    s.n = 20000;
    s.p = 20;
    s.nTest = 0;
    s.seed = 4;
    const SimulatedData d = gen_two_clusters(s);
    CHECK(d.train.responseKind == ResponseKind::binary);
    CHECK(d.activeIdx.size() == 5);
    VectorXd m1 = VectorXd::Zero(20), m0 = VectorXd::Zero(20);
    double n1 = 0, n0 = 0;
    for (Index i = 0; i < s.n; ++i) {
        if (d.train.y[i] == 1.0) {
            m1 += d.train.X.row(i).transpose();
            ++n1;
        } else {
            m0 += d.train.X.row(i).transpose();
            ++n0;
        }
    }
    CHECK(std::abs(n1 / s.n - 0.5) < 0.02);
    CHECK(std::abs((m1 / n1 - m0 / n0).norm() - 4.0) < 0.1);
}

TEST_CASE("scheme names") {
    CHECK(parse_scheme("ar1") == Scheme::ar1);
    CHECK(parse_scheme("IV") == Scheme::brownianBridge);
    CHECK_THROWS_AS(parse_scheme("V"), Error);
}
