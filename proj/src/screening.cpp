#include "tarp/screening.hpp"

#include "tarp/error.hpp"
#include "tarp/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace tarp {

std::uint64_t GammaMask::hash() const noexcept {
    // FNV-1a over the selected indices.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (Index j : selected) {
        auto v = static_cast<std::uint64_t>(j);
        for (int b = 0; b < 8; ++b) {
            h ^= (v >> (8 * b)) & 0xFFu;
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

UtilityVector marginal_utility(const Dataset& data) {
    const Index n = data.rows();
    require(n >= 3, ErrorKind::dimension, "marginal utilities need at least 3 rows, got " + std::to_string(n));
    require(data.y.size() == n, ErrorKind::dimension, "dataset has no response");

    const auto& k = kernels::active();
    const auto un = static_cast<std::size_t>(n);
    const double yMean = k.sum(data.y.data(), un) / static_cast<double>(n);
    const VectorXd yc = data.y.array() - yMean;
    const double yss = k.sum_sq_dev(yc.data(), 0.0, un);

    UtilityVector out{VectorXd::Zero(data.cols())};
    if (yss <= 0.0) return out;
    for (Index j = 0; j < data.cols(); ++j) {
        if (data.is_constant(j)) continue;
        const double* col = data.X.col(j).data();
        const double xMean = k.sum(col, un) / static_cast<double>(n);
        const double xss = k.sum_sq_dev(col, xMean, un);
        if (xss <= 0.0) continue;
        // sum((x - xbar) * yc) == sum(x * yc) because yc sums to zero
        const double r = k.dot(col, yc.data(), un) / std::sqrt(xss * yss);
        out.r[j] = std::clamp(r, -1.0, 1.0);
    }
    return out;
}

double default_delta(Index n, Index p) {
    require(n >= 1 && p >= 1, ErrorKind::dimension, "n and p must be positive");
    return std::max(0.0, 0.5 * (1.0 + std::log(static_cast<double>(p) / static_cast<double>(n))));
}

InclusionProbs inclusion_probabilities(const UtilityVector& utility, double delta) {
    require(delta >= 0.0 && std::isfinite(delta), ErrorKind::parameter, "delta must be finite and >= 0");
    InclusionProbs out;
    out.delta = delta;
    const VectorXd absR = utility.r.cwiseAbs();
    const double maxAbs = absR.size() ? absR.maxCoeff() : 0.0;
    if (maxAbs <= 0.0) {
        out.q = VectorXd::Zero(absR.size());
        out.degenerate = true;
        return out;
    }
    // Normalizing |r| first keeps |r|^delta from underflowing for large delta.
    out.q = (absR / maxAbs).array().pow(delta);
    // Exact ties at the max are exactly 1 after division; pow keeps them there.
    return out;
}

GammaMask mask_from_selection(Index p, std::vector<Index> selected) {
    std::sort(selected.begin(), selected.end());
    selected.erase(std::unique(selected.begin(), selected.end()), selected.end());
    GammaMask mask;
    mask.gamma.assign(static_cast<std::size_t>(p), 0);
    for (Index j : selected) {
        require(j >= 0 && j < p, ErrorKind::dimension, "selected index out of range");
        mask.gamma[j] = 1;
    }
    mask.pGamma = static_cast<Index>(selected.size());
    mask.selected = std::move(selected);
    return mask;
}

GammaMask sample_gamma(const InclusionProbs& probs, Rng& rng) {
    const Index p = probs.q.size();
    require(p >= 1, ErrorKind::dimension, "empty inclusion probability vector");
    GammaMask mask;
    mask.gamma.assign(static_cast<std::size_t>(p), 0);
    for (int attempt = 0; attempt <= kMaxGammaRetries; ++attempt) {
        mask.selected.clear();
        for (Index j = 0; j < p; ++j) {
            const bool in = rng.bernoulli(probs.q[j]);
            mask.gamma[j] = in ? 1 : 0;
            if (in) mask.selected.push_back(j);
        }
        if (!mask.selected.empty()) {
            mask.retries = attempt;
            mask.pGamma = static_cast<Index>(mask.selected.size());
            return mask;
        }
    }
    Index best = 0;
    probs.q.maxCoeff(&best);
    mask.gamma[best] = 1;
    mask.selected = {best};
    mask.pGamma = 1;
    mask.retries = kMaxGammaRetries;
    mask.forced = true;
    return mask;
}

MatrixXd export_screened(const Dataset& data, const GammaMask& mask) {
    require(static_cast<Index>(mask.gamma.size()) == data.cols(), ErrorKind::dimension,
            "mask length does not match column count");
    require(mask.pGamma > 0, ErrorKind::dimension, "empty screening mask");
    MatrixXd out(data.rows(), mask.pGamma);
    for (Index c = 0; c < mask.pGamma; ++c) out.col(c) = data.X.col(mask.selected[c]);
    return out;
}

std::vector<std::string> screened_names(const Dataset& data, const GammaMask& mask) {
    std::vector<std::string> names;
    names.reserve(mask.selected.size());
    for (Index j : mask.selected)
        names.push_back(data.columnNames.empty() ? "x" + std::to_string(j + 1) : data.columnNames[j]);
    return names;
}

}  // namespace tarp
