#include "tarp/metrics.hpp"

#include "tarp/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace tarp {

namespace {

void require_same_length(const VectorXd& a, const VectorXd& b) {
    require(a.size() == b.size(), ErrorKind::dimension,
            "length mismatch: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
    require(a.size() >= 1, ErrorKind::dimension, "empty input");
}

void require_binary(const VectorXd& y) {
    for (Index i = 0; i < y.size(); ++i)
        require(y[i] == 0.0 || y[i] == 1.0, ErrorKind::parameter, "labels must be 0 or 1");
}

void require_probabilities(const VectorXd& p) {
    for (Index i = 0; i < p.size(); ++i)
        require(p[i] >= 0.0 && p[i] <= 1.0, ErrorKind::parameter, "probabilities must lie in [0,1]");
}

}  // namespace

double mspe(const VectorXd& yhat, const VectorXd& ytrue) {
    require_same_length(yhat, ytrue);
    return (yhat - ytrue).squaredNorm() / static_cast<double>(ytrue.size());
}

Coverage ecp_width(const VectorXd& lower, const VectorXd& upper, const VectorXd& ytrue) {
    require_same_length(lower, ytrue);
    require_same_length(upper, ytrue);
    Index covered = 0;
    double width = 0.0;
    for (Index i = 0; i < ytrue.size(); ++i) {
        require(lower[i] <= upper[i], ErrorKind::parameter, "lower bound exceeds upper bound at index " + std::to_string(i));
        if (lower[i] <= ytrue[i] && ytrue[i] <= upper[i]) ++covered;
        width += upper[i] - lower[i];
    }
    const auto n = static_cast<double>(ytrue.size());
    return {static_cast<double>(covered) / n, width / n};
}

double misclass(const VectorXd& probs, const VectorXd& ytrue, double threshold) {
    require_same_length(probs, ytrue);
    require_probabilities(probs);
    require_binary(ytrue);
    Index wrong = 0;
    for (Index i = 0; i < probs.size(); ++i)
        if ((probs[i] >= threshold ? 1.0 : 0.0) != ytrue[i]) ++wrong;
    return static_cast<double>(wrong) / static_cast<double>(probs.size());
}

double roc_auc(const VectorXd& scores, const VectorXd& ytrue) {
    require_same_length(scores, ytrue);
    require_binary(ytrue);
    const Index n = scores.size();
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(), [&](Index a, Index b) { return scores[a] < scores[b]; });

    double positiveRankSum = 0.0;
    Index nPos = 0;
    for (Index i = 0; i < n;) {
        Index j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        const double avgRank = 0.5 * static_cast<double>(i + 1 + j);  // ranks i+1..j
        for (Index k = i; k < j; ++k)
            if (ytrue[order[k]] == 1.0) {
                positiveRankSum += avgRank;
                ++nPos;
            }
        i = j;
    }
    const Index nNeg = n - nPos;
    require(nPos > 0 && nNeg > 0, ErrorKind::parameter, "AUC needs both classes present");
    const double u = positiveRankSum - 0.5 * static_cast<double>(nPos) * static_cast<double>(nPos + 1);
    return u / (static_cast<double>(nPos) * static_cast<double>(nNeg));
}

double calibration_msd(const VectorXd& probs, const VectorXd& ytrue) {
    require_same_length(probs, ytrue);
    require_probabilities(probs);
    require_binary(ytrue);
    constexpr int kBins = 10;
    double count[kBins] = {};
    double positives[kBins] = {};
    for (Index i = 0; i < probs.size(); ++i) {
        const int b = std::min(kBins - 1, static_cast<int>(std::floor(probs[i] * kBins)));
        count[b] += 1.0;
        positives[b] += ytrue[i];
    }
    double total = 0.0;
    int used = 0;
    for (int b = 0; b < kBins; ++b) {
        if (count[b] == 0.0) continue;
        const double mid = (b + 0.5) / kBins;
        const double d = positives[b] / count[b] - mid;
        total += d * d;
        ++used;
    }
    return total / used;
}

RegressionMetrics regression_metrics(const VectorXd& yhat, const VectorXd& lower, const VectorXd& upper,
                                     const VectorXd& ytrue, double level) {
    const Coverage c = ecp_width(lower, upper, ytrue);
    return {mspe(yhat, ytrue), c.ecp, c.meanWidth, level};
}

ClassificationMetrics classification_metrics(const VectorXd& probs, const VectorXd& ytrue) {
    return {misclass(probs, ytrue), roc_auc(probs, ytrue), calibration_msd(probs, ytrue)};
}

}  // namespace tarp
