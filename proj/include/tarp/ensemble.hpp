#pragma once

// Replicated screen -> project -> fit -> predict, and aggregation of the replicates.

#include "tarp/data.hpp"
#include "tarp/posterior.hpp"
#include "tarp/projection.hpp"
#include "tarp/screening.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tarp {

enum class Backend { risRp, risPcr, sparseRisRp };
enum class Aggregation { simpleAverage, modelAverage, kFoldCv };
/// How per-replicate prediction intervals are combined.
enum class IntervalAggregation { endpointAverage, mixtureQuantile };

std::string_view to_string(Backend b) noexcept;
std::string_view to_string(Aggregation a) noexcept;
std::string_view to_string(IntervalAggregation a) noexcept;
Backend parse_backend(std::string_view s);          // ris-rp | ris-pcr | sparse-ris-rp
Aggregation parse_aggregation(std::string_view s);  // average | model-average | cv
IntervalAggregation parse_interval_aggregation(std::string_view s);  // endpoint | mixture

struct IndexRange {
    Index lo = 0;
    Index hi = 0;
};

struct RealRange {
    double lo = 0.0;
    double hi = 0.0;
};

struct TarpConfig {
    Backend backend = Backend::risRp;
    std::optional<double> delta;  // empty: default_delta(n, p)
    Index nReplicates = 100;
    std::optional<IndexRange> mRange;  // empty: default_m_range(n, p)
    RealRange psiRange{0.1, 0.4};
    std::optional<Index> fixedM;     // overrides the m draw
    std::optional<double> fixedPsi;  // overrides the psi draw
    double kappa = 0.5;              // sparse backend only
    PriorHyper prior;
    Aggregation aggregation = Aggregation::simpleAverage;
    IntervalAggregation intervals = IntervalAggregation::endpointAverage;
    Index kFolds = 5;
    double level = 0.5;
    std::uint64_t seed = 1;
    bool centerY = true;
    unsigned workers = 1;  // 0: hardware concurrency
    ProbitOptions probit;
    bool probitIntercept = true;  // prepend a constant column to Z in the binary path
    bool probitPosteriorAveraging = false;
    bool keepReplicates = true;

    void validate() const;
};

/// [ceil(2 ln p), floor(3n/4)] clipped to [1, p]. Throws when empty.
IndexRange default_m_range(Index n, Index p);

/// Everything computed once per training set and shared read-only by replicates.
struct TarpContext {
    const Dataset* train = nullptr;
    VectorXd yFit;        // centered when centerY
    double yOffset = 0.0;
    UtilityVector utility;
    InclusionProbs probs;  // all ones when every utility is zero
    double delta = 0.0;
    IndexRange mRange;
};

TarpContext prepare(const Dataset& train, const TarpConfig& cfg);

struct ReplicateRecord {
    Index index = 0;
    std::uint64_t seed = 0;
    Index m = 0;  // effective (after any rank truncation)
    std::optional<double> psi;
    Index pGamma = 0;
    std::uint64_t maskHash = 0;
    bool maskForced = false;
    VectorXd yhat;
    VectorXd lower;
    VectorXd upper;
    VectorXd scale;  // predictive t scale per test point
    double df = 0.0;
    std::optional<double> logEvidence;
    std::optional<double> cvMse;
};

struct PhaseTimes {
    double screen = 0.0;
    double project = 0.0;
    double fit = 0.0;
    double predict = 0.0;
};

struct TarpResult {
    VectorXd yhat;
    VectorXd lower;
    VectorXd upper;
    std::vector<ReplicateRecord> perReplicate;  // empty unless keepReplicates
    std::vector<double> weights;                // per replicate, sum 1
    std::optional<Index> selected;              // kFoldCv winner
    TarpConfig config;
    double delta = 0.0;
    IndexRange mRange;
    PhaseTimes phases;
    double wallTime = 0.0;
};

/// Seed of replicate l.
std::uint64_t replicate_seed(std::uint64_t seed, Index l) noexcept;

/// One replicate: draws m, psi, gamma and R from the replicate's own substreams.
ReplicateRecord run_replicate(const TarpContext& ctx, const MatrixXd& Xnew, const TarpConfig& cfg, Index l,
                              PhaseTimes* times = nullptr);

TarpResult run_tarp(const Dataset& train, const MatrixXd& Xnew, const TarpConfig& cfg);

/// exp(v - max v) / sum.
std::vector<double> model_average_weights(const std::vector<double>& logEvidence);

/// Per test point, the `level` central interval of the weighted mixture of
/// per-replicate predictive t distributions.
void mixture_intervals(const std::vector<ReplicateRecord>& reps, const std::vector<double>& weights, double level,
                       VectorXd& lower, VectorXd& upper);

/// Mean over folds of the validation MSE of the conjugate fit on Z.
/// Folds are contiguous blocks of a seeded shuffle; k = n is leave-one-out.
double kfold_mse(const MatrixXd& Z, const VectorXd& y, Index k, const PriorHyper& prior, bool centerY, Rng& rng);

struct BinaryReplicate {
    Index index = 0;
    std::uint64_t seed = 0;
    Index m = 0;
    std::optional<double> psi;
    Index pGamma = 0;
    std::uint64_t maskHash = 0;
    VectorXd prob;
    double maxMcse = 0.0;
};

struct BinaryResult {
    VectorXd prob;
    std::vector<BinaryReplicate> perReplicate;
    TarpConfig config;
    double delta = 0.0;
    IndexRange mRange;
    PhaseTimes phases;
    double wallTime = 0.0;
};

BinaryReplicate run_binary_replicate(const TarpContext& ctx, const MatrixXd& Xnew, const TarpConfig& cfg, Index l,
                                     PhaseTimes* times = nullptr);

/// Probit Gibbs per replicate, probabilities averaged across replicates.
BinaryResult run_tarp_binary(const Dataset& train, const MatrixXd& Xnew, const TarpConfig& cfg);

}  // namespace tarp
