#include "rocketlite/ridge.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "rocketlite/errors.hpp"

namespace rkl {

LinearClassifier train_ridge(std::span<const float> features, int sample_count,
                             int feature_count, std::span<const int> labels,
                             const RidgeOptions& options) {
    const int n = sample_count;
    const int t = feature_count;
    if (n < 1 || t < 1) throw InvalidArgument("empty training set");
    if (features.size() != static_cast<std::size_t>(n) * t)
        throw InvalidArgument("feature matrix size mismatch");
    if (labels.size() != static_cast<std::size_t>(n)) throw InvalidArgument("label count mismatch");
    if (options.lambda_grid.empty()) throw InvalidArgument("empty lambda grid");

    int k_count = options.class_labels.empty() ? 0 : static_cast<int>(options.class_labels.size());
    for (int label : labels) {
        if (label < 0) throw InvalidArgument("negative class label");
        k_count = std::max(k_count, label + 1);
    }
    std::vector<int> histogram(k_count, 0);
    for (int label : labels) ++histogram[label];
    if (k_count < 2 || std::find(histogram.begin(), histogram.end(), 0) != histogram.end())
        throw InvalidArgument("class absent from training data");
    if (n < k_count) throw InvalidArgument("fewer samples than classes");

    // Augmented design matrix [X | 1]; the intercept is ridge-penalized like
    // any other coefficient, which keeps training arithmetic identical to
    // the centering-free deployment path.
    const int ta = t + 1;
    Eigen::MatrixXd xa(n, ta);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < t; ++j)
            xa(i, j) = static_cast<double>(features[static_cast<std::size_t>(i) * t + j]);
        xa(i, t) = 1.0;
    }
    Eigen::MatrixXd y = Eigen::MatrixXd::Constant(n, k_count, -1.0);
    for (int i = 0; i < n; ++i) y(i, labels[i]) = 1.0;

    const Eigen::MatrixXd gram = xa.transpose() * xa;
    const Eigen::MatrixXd xty = xa.transpose() * y;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    if (eig.info() != Eigen::Success) throw NumericError("eigendecomposition failed");
    const Eigen::VectorXd ev = eig.eigenvalues();  // ascending
    const Eigen::MatrixXd z = eig.eigenvectors().transpose() * xty;

    // Leave-one-out GCV over the grid; first strict minimum wins ties.
    double best_lambda = 0.0;
    double best_score = std::numeric_limits<double>::infinity();
    bool any_valid = false;
    const double ev_max = ev(ta - 1);
    for (double lambda : options.lambda_grid) {
        if (lambda < 0.0) throw InvalidArgument("negative lambda");
        bool conditioned = true;
        for (int i = 0; i < ta; ++i) {
            if (ev(i) + lambda <= 1e-12 * (ev_max + lambda)) {
                conditioned = false;
                break;
            }
        }
        if (!conditioned) continue;

        double trace_h = 0.0;
        for (int i = 0; i < ta; ++i) trace_h += ev(i) / (ev(i) + lambda);
        const double dof = 1.0 - trace_h / n;
        if (dof <= 0.0) continue;

        double rss = 0.0;
        for (int k = 0; k < k_count; ++k) {
            double fit2 = 0.0, shrink = 0.0;
            for (int i = 0; i < ta; ++i) {
                const double zi = z(i, k);
                fit2 += zi * zi / (ev(i) + lambda);
                shrink += ev(i) * zi * zi / ((ev(i) + lambda) * (ev(i) + lambda));
            }
            rss += std::max(0.0, static_cast<double>(n) - 2.0 * fit2 + shrink);
        }
        const double score = rss / (n * dof * dof);
        any_valid = true;
        if (score < best_score) {
            best_score = score;
            best_lambda = lambda;
        }
    }
    if (!any_valid) throw NumericError("ill-conditioned: provide lambda > 0");

    // Solve through the same eigendecomposition so the result is a pure
    // function of (inputs, grid).
    Eigen::VectorXd inv(ta);
    for (int i = 0; i < ta; ++i) inv(i) = 1.0 / (ev(i) + best_lambda);
    const Eigen::MatrixXd w_aug = eig.eigenvectors() * inv.asDiagonal() * z;

    LinearClassifier model;
    model.feature_count = t;
    model.class_count = k_count;
    model.lambda = best_lambda;
    model.weights.resize(static_cast<std::size_t>(t) * k_count);
    model.biases.resize(k_count);
    for (int j = 0; j < t; ++j)
        for (int k = 0; k < k_count; ++k)
            model.weights[static_cast<std::size_t>(j) * k_count + k] = w_aug(j, k);
    for (int k = 0; k < k_count; ++k) model.biases[k] = w_aug(t, k);
    if (!options.class_labels.empty()) {
        if (static_cast<int>(options.class_labels.size()) != k_count)
            throw InvalidArgument("class label count mismatch");
        model.class_labels = options.class_labels;
    } else {
        for (int k = 0; k < k_count; ++k) model.class_labels.push_back("class" + std::to_string(k));
    }
    return model;
}

Prediction predict_float(std::span<const float> features, const LinearClassifier& model) {
    if (features.size() != static_cast<std::size_t>(model.feature_count))
        throw InvalidArgument("feature dimension mismatch");

    Prediction p;
    p.scores.resize(model.class_count);
    for (int k = 0; k < model.class_count; ++k) {
        double acc = 0.0;
        for (int j = 0; j < model.feature_count; ++j)
            acc += static_cast<double>(features[j]) *
                   model.weights[static_cast<std::size_t>(j) * model.class_count + k];
        p.scores[k] = acc + model.biases[k];
    }
    p.class_index = 0;
    for (int k = 1; k < model.class_count; ++k)
        if (p.scores[k] > p.scores[p.class_index]) p.class_index = k;
    return p;
}

Prediction predict_float(const FeatureVector& features, const LinearClassifier& model) {
    if (features.mode != FeatureMode::Float)
        throw InvalidArgument("quantized features require predict_q");
    return predict_float(std::span<const float>(features.values), model);
}

}  // namespace rkl
