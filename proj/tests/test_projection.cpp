#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tarp/error.hpp"
#include "tarp/projection.hpp"
#include "test_util.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <set>

using namespace tarp;

namespace {

/// Z computed straight from the definition X[:, map] R'.
MatrixXd compress_reference(const MatrixXd& X, const ProjectionMatrix& proj) {
    MatrixXd Xg(X.rows(), proj.p_gamma());
    for (Index c = 0; c < proj.p_gamma(); ++c) Xg.col(c) = X.col(proj.columnMap[c]);
    return Xg * proj.entries.transpose();
}

struct Moments {
    double mean = 0.0;
    double var = 0.0;
};

Moments moments(const std::vector<double>& v) {
    Moments m;
    for (double x : v) m.mean += x;
    m.mean /= static_cast<double>(v.size());
    for (double x : v) m.var += (x - m.mean) * (x - m.mean);
    m.var /= static_cast<double>(v.size() - 1);
    return m;
}

}  // namespace

TEST_CASE("three-point RP law") {
    SUBCASE("psi = 0.5 has no zeros") {
        Rng rng(1);
        const ProjectionMatrix R = gen_rp_matrix(100, 50, 0.5, rng);
        CHECK((R.entries.array().abs() == 1.0).all());
    }
    SUBCASE("entries take only the three values") {
        Rng rng(2);
        const ProjectionMatrix R = gen_rp_matrix(80, 30, 0.17, rng);
        const double v = 1.0 / std::sqrt(2.0 * 0.17);
        CHECK((R.entries.array() == 0.0 || R.entries.array() == v || R.entries.array() == -v).all());
        CHECK(R.ternary());
        CHECK(R.magnitude == v);
    }
    SUBCASE("second moment 1 and zero fraction 1 - 2 psi over 1e6 draws") {
        for (double psi : {0.1, 0.25, 0.4}) {
            Rng rng(3);
            const ProjectionMatrix R = gen_rp_matrix(1000, 1000, psi, rng);
            const double second = R.entries.array().square().mean();
            const double zeros = (R.entries.array() == 0.0).cast<double>().mean();
            CHECK(std::abs(second - 1.0) < 0.01);
            if (psi == 0.25) CHECK(std::abs(zeros - 0.5) < 0.005);
            CHECK(std::abs(zeros - (1 - 2 * psi)) < 0.005);
        }
    }
    SUBCASE("psi outside (0, 0.5] is rejected") {
        Rng rng(4);
        CHECK_THROWS_AS(gen_rp_matrix(10, 5, 0.0, rng), Error);
        CHECK_THROWS_AS(gen_rp_matrix(10, 5, 0.51, rng), Error);
    }
    SUBCASE("same seed gives the same matrix") {
        Rng a(5), b(5);
        CHECK(gen_rp_matrix(40, 12, 0.3, a).entries == gen_rp_matrix(40, 12, 0.3, b).entries);
    }
}

TEST_CASE("sparse RP law") {
    Rng rng(6);
    const Index n = 100;
    const Index m = 10;
    const ProjectionMatrix R = gen_sparse_rp_matrix(100000, m, 0.5, n, rng);
    const double v = std::pow(double(n), 0.25) / std::sqrt(double(m));
    CHECK((R.entries.array() == 0.0 || R.entries.array().abs() == v).all());
    const double nonzero = (R.entries.array() != 0.0).cast<double>().mean();
    CHECK(std::abs(nonzero - 0.1) < 0.003);
    CHECK(std::abs(R.entries.array().square().mean() - 0.1) < 0.005);
    CHECK(density(R) == doctest::Approx(nonzero));
    CHECK_THROWS_AS(gen_sparse_rp_matrix(10, 5, 0.0, n, rng), Error);
    CHECK_THROWS_AS(gen_sparse_rp_matrix(10, 5, 1.0, n, rng), Error);
}

TEST_CASE("RP norm moments: mean m |x|^2 and the corrected variance") {
    // For one row, E (r.x)^4 = sum x^4 / (2 psi) + 3 (|x|^4 - sum x^4), so
    // Var |Rx|^2 = m (2 |x|^4 + (1/(2 psi) - 3) sum x^4).
    const Index p = 100, m = 50;
    const double psi = 0.25;
    const VectorXd x = testutil::gaussian_vec(p, 10).array() * VectorXd::LinSpaced(p, 0.2, 3.0).array();
    const double n2 = x.squaredNorm();
    const double s4 = x.array().pow(4).sum();
    Rng rng(11);
    std::vector<double> ratio, norms;
    const int draws = 40000;
    for (int d = 0; d < draws; ++d) {
        const ProjectionMatrix R = gen_rp_matrix(p, m, psi, rng);
        const double v = (R.entries * x).squaredNorm();
        norms.push_back(v);
        ratio.push_back(v / (m * n2));
    }
    const Moments mr = moments(ratio);
    CHECK(std::abs(mr.mean - 1.0) < 4.0 * std::sqrt(mr.var / draws));
    const double corrected = m * (2 * n2 * n2 + (1 / (2 * psi) - 3) * s4);
    CHECK(std::abs(moments(norms).var / corrected - 1.0) < 0.05);
}

TEST_CASE("RP concentration sd shrinks by sqrt(2) when (m, p) doubles") {
    // Var of |R_g x|^2 / (m p) is about (2/m + c/p) for bounded standardized x,
    // so doubling both halves the variance and shrinks the sd by sqrt(2).
    auto sd_for = [](Index m, Index p, std::uint64_t seed) {
        Rng rng(seed);
        VectorXd x(p);
        for (Index j = 0; j < p; ++j) x[j] = (j % 2 ? 1.0 : -1.0) * (0.5 + (j % 3) * 0.5);
        std::vector<double> v;
        for (int d = 0; d < 1500; ++d) {
            VectorXd xg = VectorXd::Zero(p);
            for (Index j = 0; j < p; ++j)
                if (rng.bernoulli(0.5)) xg[j] = x[j];
            const ProjectionMatrix R = gen_rp_matrix(p, m, 0.25, rng);
            v.push_back((R.entries * xg).squaredNorm() / double(m * p));
        }
        return std::sqrt(moments(v).var);
    };
    const double ratio = sd_for(25, 400, 1) / sd_for(50, 800, 2);
    CHECK(ratio == doctest::Approx(std::sqrt(2.0)).epsilon(0.1));
}

TEST_CASE("PCR projection") {
    SUBCASE("diagonal example") {
        MatrixXd X(2, 2);
        X << 3, 0, 0, 2;
        const ProjectionMatrix R = gen_pcr_matrix(X, 1);
        CHECK(R.m == 1);
        CHECK(std::abs(R.entries(0, 0) - 1.0) < 1e-14);
        CHECK(std::abs(R.entries(0, 1)) < 1e-14);
    }
    SUBCASE("full rank m = pGamma gives orthonormal rows") {
        const MatrixXd X = testutil::gaussian(30, 12, 4);
        const ProjectionMatrix R = gen_pcr_matrix(X, 12);
        CHECK((R.entries * R.entries.transpose() - MatrixXd::Identity(12, 12)).cwiseAbs().maxCoeff() < 1e-8);
    }
    SUBCASE("rank deficiency truncates m") {
        MatrixXd X = testutil::gaussian(20, 5, 5);
        X.col(4) = X.col(1);
        const ProjectionMatrix R = gen_pcr_matrix(X, 5);
        CHECK(R.requestedM == 5);
        CHECK(R.m == 4);
        CHECK(R.truncated());
    }
    SUBCASE("compress equals U S up to sign, wide and tall") {
        for (Index pg : {8, 40}) {
            const MatrixXd X = testutil::gaussian(20, pg, 6 + pg);
            const Index m = 6;
            ProjectionMatrix R = gen_pcr_matrix(X, m);
            const MatrixXd Z = compress(X, R);
            Eigen::JacobiSVD<MatrixXd> svd(X, Eigen::ComputeThinU);
            for (Index k = 0; k < m; ++k) {
                const VectorXd us = svd.matrixU().col(k) * svd.singularValues()[k];
                const double dev = std::min((Z.col(k) - us).cwiseAbs().maxCoeff(), (Z.col(k) + us).cwiseAbs().maxCoeff());
                CHECK(dev < 1e-8);
            }
            // Sign convention: largest-|.| entry of each row is positive.
            for (Index k = 0; k < m; ++k) {
                Index piv = 0;
                R.entries.row(k).cwiseAbs().maxCoeff(&piv);
                CHECK(R.entries(k, piv) > 0.0);
            }
        }
    }
    SUBCASE("orthonormal X: Z'Z is diagonal with the squared singular values") {
        Eigen::HouseholderQR<MatrixXd> qr(testutil::gaussian(25, 6, 9));
        const MatrixXd Q = qr.householderQ() * MatrixXd::Identity(25, 6);
        VectorXd s(6);
        s << 6, 5, 4, 3, 2, 1;
        const MatrixXd X = Q * s.asDiagonal();
        const MatrixXd Z = compress(X, gen_pcr_matrix(X, 6));
        const MatrixXd G = Z.transpose() * Z;
        CHECK((G - MatrixXd(s.array().square().matrix().asDiagonal())).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("compress") {
    SUBCASE("scalar case") {
        const MatrixXd X = testutil::gaussian(7, 3, 1);
        ProjectionMatrix R;
        R.kind = ProjectionKind::pcr;
        R.entries = MatrixXd::Constant(1, 1, 2.0);
        R.m = R.requestedM = 1;
        R.columnMap = {1};
        CHECK(compress(X, R).col(0) == 2.0 * X.col(1));
    }
    SUBCASE("zero X gives zero Z") {
        Rng rng(1);
        ProjectionMatrix R = gen_rp_matrix(4, 3, 0.3, rng);
        CHECK(compress(MatrixXd::Zero(5, 4), R).isZero(0.0));
    }
    SUBCASE("ternary path agrees with the dense definition and skips unselected columns") {
        const MatrixXd X = testutil::gaussian(33, 20, 2);
        Rng rng(3);
        ProjectionMatrix R = gen_rp_matrix(6, 9, 0.2, rng);
        const std::vector<Index> map{1, 4, 5, 11, 17, 19};
        bind_columns(R, map);
        const MatrixXd Z = compress(X, R);
        CHECK((Z - compress_reference(X, R)).cwiseAbs().maxCoeff() < 1e-12);
        MatrixXd X2 = X;
        X2.col(0).setConstant(1e300);
        X2.col(2).setConstant(std::nan(""));
        CHECK(compress(X2, R) == Z);
    }
    SUBCASE("column map out of range") {
        Rng rng(4);
        ProjectionMatrix R = gen_rp_matrix(2, 2, 0.3, rng);
        const std::vector<Index> map{0, 7};
        bind_columns(R, map);
        CHECK_THROWS_AS(compress(MatrixXd::Zero(3, 4), R), Error);
    }
}

TEST_CASE("binary dump round trip") {
    const auto dir = testutil::scratch("proj");
    Rng rng(8);
    ProjectionMatrix R = gen_sparse_rp_matrix(10, 4, 0.4, 50, rng);
    const std::vector<Index> map{0, 2, 3, 5, 8, 9, 10, 12, 13, 20};
    bind_columns(R, map);
    write_projection(dir / "r.bin", R);
    const ProjectionMatrix back = read_projection(dir / "r.bin");
    CHECK(back.kind == R.kind);
    CHECK(back.entries == R.entries);
    CHECK(back.columnMap == R.columnMap);
    CHECK(back.kappa == R.kappa);
    CHECK_FALSE(back.psi.has_value());
    std::filesystem::remove_all(dir);
}
