#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tarp/data.hpp"
#include "tarp/error.hpp"
#include "test_util.hpp"

#include <cmath>
#include <fstream>
#include <limits>

using namespace tarp;

namespace {

void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

}  // namespace

TEST_CASE("standardize uses the sample sd") {
    MatrixXd X(2, 1);
    X << 1, -1;
    VectorXd y(2);
    y << 0.5, 1.5;
    const Dataset s = standardize(make_dataset(X, y));
    CHECK(s.colScales[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(s.X(0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(s.X(1, 0) == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(s.y == y);  // response is never touched
}

TEST_CASE("standardized columns have mean 0 and sd 1, and standardize is idempotent") {
    MatrixXd X = testutil::gaussian(50, 6, 11);
    for (Index j = 0; j < 6; ++j) X.col(j) = X.col(j) * (j + 1.5) + VectorXd::Constant(50, 3.0 * j - 4.0);
    const Dataset s = standardize(make_dataset(X, testutil::gaussian_vec(50, 12)));
    for (Index j = 0; j < 6; ++j) {
        const double mean = s.X.col(j).mean();
        const double sd = std::sqrt((s.X.col(j).array() - mean).square().sum() / 49.0);
        CHECK(std::abs(mean) < 1e-10);
        CHECK(std::abs(sd - 1.0) < 1e-8);
    }
    const Dataset twice = standardize(s);
    CHECK((twice.X - s.X).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("constant columns become zero and are flagged") {
    MatrixXd X(3, 2);
    X << 5, 1, 5, 2, 5, 4;
    const Dataset s = standardize(make_dataset(X, VectorXd::Zero(3)));
    CHECK(s.is_constant(0));
    CHECK_FALSE(s.is_constant(1));
    CHECK(s.colScales[0] == 0.0);
    CHECK(s.X.col(0).isZero(0.0));
}

TEST_CASE("standardize rejects fewer than two rows") {
    MatrixXd X(1, 2);
    X << 1, 2;
    CHECK_THROWS_AS(standardize(make_dataset(X, VectorXd::Zero(1))), Error);
}

TEST_CASE("non-finite input is an ingestion error") {
    MatrixXd X = MatrixXd::Ones(3, 2);
    X(1, 1) = std::numeric_limits<double>::quiet_NaN();
    try {
        make_dataset(X, VectorXd::Zero(3));
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ingestion);
    }
}

TEST_CASE("apply_standardization") {
    const Dataset s = standardize(make_dataset(testutil::gaussian(30, 4, 3), testutil::gaussian_vec(30, 4)));
    SUBCASE("training matrix reproduces the standardized matrix exactly") {
        const Dataset raw = make_dataset(testutil::gaussian(30, 4, 3), testutil::gaussian_vec(30, 4));
        CHECK(apply_standardization(s, raw.X) == s.X);
    }
    SUBCASE("row of training means maps to zero") {
        const MatrixXd row = s.colMeans.transpose();
        CHECK(apply_standardization(s, row).cwiseAbs().maxCoeff() < 1e-15);
    }
    SUBCASE("hand value: mean 2, scale 2, value 6 gives 2") {
        Dataset t = s;
        t.colMeans = VectorXd::Constant(4, 2.0);
        t.colScales = VectorXd::Constant(4, 2.0);
        const MatrixXd out = apply_standardization(t, MatrixXd::Constant(1, 4, 6.0));
        CHECK(out(0, 0) == 2.0);
    }
    SUBCASE("identity statistics") {
        Dataset t = s;
        t.colMeans = VectorXd::Zero(4);
        t.colScales = VectorXd::Ones(4);
        const MatrixXd Xn = testutil::gaussian(5, 4, 9);
        CHECK(apply_standardization(t, Xn) == Xn);
    }
    SUBCASE("column mismatch") { CHECK_THROWS_AS(apply_standardization(s, MatrixXd::Zero(2, 3)), Error); }
}

TEST_CASE("random_split gives disjoint non-empty sides") {
    const SplitPlan plan = random_split(20, 5, 42);
    CHECK(plan.testIdx.size() == 5);
    CHECK(plan.trainIdx.size() == 15);
    CHECK_NOTHROW(validate(plan, 20));
    const SplitPlan again = random_split(20, 5, 42);
    CHECK(plan.testIdx == again.testIdx);
    SplitPlan bad = plan;
    bad.testIdx.push_back(bad.trainIdx.front());
    CHECK_THROWS_AS(validate(bad, 20), Error);
}

TEST_CASE("read_csv") {
    const auto dir = testutil::scratch("data");
    SUBCASE("3x3 with header") {
        write_text(dir / "a.csv", "a,b,y\n1,2,3.5\n4,5,6\n7,8,9\n");
        const Dataset d = read_csv(dir / "a.csv");
        CHECK(d.rows() == 3);
        CHECK(d.cols() == 2);
        CHECK(d.y.size() == 3);
        CHECK(d.y[0] == 3.5);
        CHECK(d.columnNames == std::vector<std::string>{"a", "b"});
        CHECK(d.responseKind == ResponseKind::continuous);
    }
    SUBCASE("binary response is detected") {
        write_text(dir / "b.csv", "a,y\n1,0\n2,1\n3,1\n");
        CHECK(read_csv(dir / "b.csv").responseKind == ResponseKind::binary);
    }
    SUBCASE("response by name") {
        write_text(dir / "c.csv", "resp,a,b\n1,2,3\n4,5,6\n");
        CsvOptions opts;
        opts.responseColumn = std::string("resp");
        const Dataset d = read_csv(dir / "c.csv", opts);
        CHECK(d.y[1] == 4.0);
        CHECK(d.columnNames == std::vector<std::string>{"a", "b"});
    }
    SUBCASE("NA cell names row and column") {
        write_text(dir / "d.csv", "a,b,y\n1,2,3\n4,NA,6\n");
        try {
            read_csv(dir / "d.csv");
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::ingestion);
            const std::string msg = e.what();
            CHECK(msg.find("NA") != std::string::npos);
            CHECK(msg.find("row") != std::string::npos);
            CHECK(msg.find("column") != std::string::npos);
        }
    }
    SUBCASE("ragged rows are rejected") {
        write_text(dir / "e.csv", "a,b,y\n1,2,3\n4,5\n");
        CHECK_THROWS_AS(read_csv(dir / "e.csv"), Error);
    }
    SUBCASE("missing named response") {
        write_text(dir / "f.csv", "a,b\n1,2\n3,4\n");
        CsvOptions opts;
        opts.responseColumn = std::string("y");
        CHECK_THROWS_AS(read_csv(dir / "f.csv", opts), Error);
    }
    SUBCASE("quoted header fields") {
        write_text(dir / "g.csv", "\"x, one\",\"y\"\n1,2\n3,4\n");
        const Dataset d = read_csv(dir / "g.csv");
        CHECK(d.columnNames.front() == "x, one");
    }
    SUBCASE("write then read is lossless") {
        const Dataset d = make_dataset(testutil::gaussian(7, 3, 5) * 1e3, testutil::gaussian_vec(7, 6) / 7.0);
        write_dataset_csv(dir / "rt.csv", d);
        const Dataset back = read_csv(dir / "rt.csv");
        CHECK(back.X == d.X);
        CHECK(back.y == d.y);
        CHECK(back.columnNames == d.columnNames);
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("csv_escape follows RFC 4180") {
    CHECK(csv_escape("plain") == "plain");
    CHECK(csv_escape("a,b") == "\"a,b\"");
    CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
}
