#pragma once

#include "tarp/data.hpp"

namespace tarp {

struct RegressionMetrics {
    double mspe = 0.0;
    double ecp = 0.0;  // fraction in [0,1]
    double meanWidth = 0.0;
    double level = 0.0;
};

struct ClassificationMetrics {
    double misclassRate = 0.0;
    double auc = 0.0;
    double calibrationMsd = 0.0;
};

struct Coverage {
    double ecp = 0.0;
    double meanWidth = 0.0;
};

double mspe(const VectorXd& yhat, const VectorXd& ytrue);
/// Coverage uses closed intervals.
Coverage ecp_width(const VectorXd& lower, const VectorXd& upper, const VectorXd& ytrue);
/// A probability equal to the threshold is classified as 1.
double misclass(const VectorXd& probs, const VectorXd& ytrue, double threshold = 0.5);
/// Mann-Whitney AUC with average ranks for ties.
double roc_auc(const VectorXd& scores, const VectorXd& ytrue);
/// Ten equal bins on [0,1]; empty bins are left out of the mean.
double calibration_msd(const VectorXd& probs, const VectorXd& ytrue);

RegressionMetrics regression_metrics(const VectorXd& yhat, const VectorXd& lower, const VectorXd& upper,
                                     const VectorXd& ytrue, double level);
ClassificationMetrics classification_metrics(const VectorXd& probs, const VectorXd& ytrue);

}  // namespace tarp
