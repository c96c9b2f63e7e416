#pragma once

// Seeded simulation designs: AR(1), block equicorrelation, rank-3 principal
// component structure, Brownian bridge, and a binary two-cluster toy.

#include "tarp/data.hpp"
#include "tarp/rng.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace tarp {

enum class Scheme { ar1, blockDiag, pcrScheme, brownianBridge, twoClusters };

std::string_view to_string(Scheme s) noexcept;
/// Accepts ar1|block|pcr|bridge|clusters and the roman-numeral aliases I..IV.
Scheme parse_scheme(std::string_view s);

struct SchemeSpec {
    Scheme scheme = Scheme::ar1;
    Index n = 200;
    Index p = 2000;
    std::optional<Index> nTest;  // default: n
    Index nActive = 50;
    double coefValue = 1.0;
    double noiseSd = 1.0;
    double rho = 0.3;  // ar1
    Index blockSize = 100;  // blockDiag
    double rhoLow = 0.3;
    double rhoHigh = 0.9;
    Index nIndependent = 200;  // blockDiag independent tail
    Index nOutliers = 5;       // pcrScheme, training rows only
    double outlierSd = 10.0;
    double residualSd = 0.0;  // pcrScheme isotropic term
    double tMax = 10.0;       // brownianBridge
    std::optional<double> bridgeScale;  // default sqrt(tMax/4): midpoint sd tMax/4
    double separation = 4.0;  // twoClusters: distance between centers in sd units
    Index nInformative = 5;   // twoClusters
    std::uint64_t seed = 1;

    Index test_count() const noexcept { return nTest ? *nTest : n; }
    void validate() const;
};

struct SimulatedData {
    Dataset train;  // raw, not standardized
    MatrixXd testX;
    VectorXd testY;
    VectorXd trueBeta;
    std::vector<Index> activeIdx;  // nonzero coordinates of trueBeta, ascending
    std::vector<Index> outlierRows;
    SchemeSpec spec;
};

/// y = X beta + noiseSd * N(0, I).
VectorXd make_response(const MatrixXd& X, const VectorXd& beta, double noiseSd, Rng& rng);

SimulatedData gen_scheme1(const SchemeSpec& spec);
SimulatedData gen_scheme2(const SchemeSpec& spec);
SimulatedData gen_scheme3(const SchemeSpec& spec);
SimulatedData gen_scheme4(const SchemeSpec& spec);
SimulatedData gen_two_clusters(const SchemeSpec& spec);
SimulatedData simulate(const SchemeSpec& spec);

/// Loading matrix of the rank-3 design (p x 3, orthonormal columns) for a given seed.
MatrixXd scheme3_loadings(Index p, std::uint64_t seed);

}  // namespace tarp
