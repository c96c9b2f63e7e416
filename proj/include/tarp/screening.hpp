#pragma once

// Randomized independence screening: marginal utilities, inclusion probabilities
// q_j = |r_j|^delta / max_k |r_k|^delta, and Bernoulli draws of the screening mask.

#include "tarp/data.hpp"
#include "tarp/rng.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace tarp {

/// Per-predictor marginal association with the response; entries in [-1, 1].
struct UtilityVector {
    VectorXd r;
};

struct InclusionProbs {
    VectorXd q;
    double delta = 0.0;
    /// Set when every utility is zero; q is then all zeros and the caller picks a fallback.
    bool degenerate = false;

    /// Expected screened count, sum of q_j.
    double expected_count() const { return q.sum(); }
};

struct GammaMask {
    std::vector<char> gamma;       // length p
    std::vector<Index> selected;   // ascending
    Index pGamma = 0;
    /// Number of redraws spent on empty masks; `forced` marks the argmax fallback.
    int retries = 0;
    bool forced = false;

    std::uint64_t hash() const noexcept;
};

/// Replaceable utility; Pearson correlation is the built-in one.
using UtilityFunction = std::function<UtilityVector(const Dataset&)>;

/// Pearson correlation of each column with y; 0 for constant columns.
UtilityVector marginal_utility(const Dataset& data);

/// max{0, (1 + ln(p/n)) / 2}
double default_delta(Index n, Index p);

InclusionProbs inclusion_probabilities(const UtilityVector& utility, double delta);

inline constexpr int kMaxGammaRetries = 100;

/// Independent Bernoulli(q_j) draws. An empty draw is retried up to kMaxGammaRetries
/// times, after which the highest-q column (first on ties) is forced in.
GammaMask sample_gamma(const InclusionProbs& probs, Rng& rng);

/// Builds a mask directly from a selection, mainly for tests and the CLI.
GammaMask mask_from_selection(Index p, std::vector<Index> selected);

/// Column submatrix X_gamma in selected order.
MatrixXd export_screened(const Dataset& data, const GammaMask& mask);
std::vector<std::string> screened_names(const Dataset& data, const GammaMask& mask);

}  // namespace tarp
