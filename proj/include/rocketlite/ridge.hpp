#pragma once

#include <span>
#include <string>
#include <vector>

#include "rocketlite/window.hpp"

namespace rkl {

struct LinearClassifier {
    int feature_count = 0;  // T
    int class_count = 0;    // K
    std::vector<double> weights;  // T x K, feature-major: weights[t*K + k]
    std::vector<double> biases;   // K
    std::vector<std::string> class_labels;
    double lambda = 0.0;

    double weight(int t, int k) const {
        return weights[static_cast<std::size_t>(t) * class_count + k];
    }
    bool operator==(const LinearClassifier&) const = default;
};

struct RidgeOptions {
    // Candidates scored by leave-one-out generalized cross-validation.
    std::vector<double> lambda_grid = {1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0, 1000.0};
    std::vector<std::string> class_labels;  // optional display names
};

// One-vs-all ridge regression against +-1 targets with an intercept column.
// features is row-major N x T; labels are class indices 0..K-1.
LinearClassifier train_ridge(std::span<const float> features, int sample_count,
                             int feature_count, std::span<const int> labels,
                             const RidgeOptions& options = {});

struct Prediction {
    int class_index = 0;
    std::vector<double> scores;
};

// scores[k] = sum_t t[t] * W[t][k] + b[k], accumulated ascending t in double,
// bias added last; argmax ties broken by lowest class index.
Prediction predict_float(std::span<const float> features, const LinearClassifier& model);
Prediction predict_float(const FeatureVector& features, const LinearClassifier& model);

}  // namespace rkl
