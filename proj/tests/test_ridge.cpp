#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "rocketlite/errors.hpp"
#include "rocketlite/ridge.hpp"
#include "rocketlite/rng.hpp"
#include "support/linalg_oracle.hpp"

using namespace rkl;

namespace {

struct Problem {
    std::vector<float> x;
    std::vector<int> labels;
    int n;
    int t;
    int k;
};

// Class-dependent means plus noise, so the problem is learnable but not
// degenerate.
Problem random_problem(int n, int t, int k, std::uint64_t seed) {
    Rng rng(seed);
    Problem p{{}, {}, n, t, k};
    p.x.resize(static_cast<std::size_t>(n) * t);
    p.labels.resize(n);
    for (int i = 0; i < n; ++i) {
        const int label = i % k;  // every class present
        p.labels[i] = label;
        for (int j = 0; j < t; ++j)
            p.x[static_cast<std::size_t>(i) * t + j] =
                static_cast<float>(0.1 * label * (j % 3) + 0.5 + 0.2 * rng.gaussian());
    }
    return p;
}

void check_close(double got, double want, double rel = 1e-8) {
    const double scale = std::max({1.0, std::abs(got), std::abs(want)});
    CHECK(std::abs(got - want) <= rel * scale);
}

}  // namespace

TEST_CASE("solution matches the normal-equations oracle at a pinned lambda") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        const Problem p = random_problem(40, 6, 3, seed);
        RidgeOptions opt;
        opt.lambda_grid = {0.5};
        const LinearClassifier model = train_ridge(p.x, p.n, p.t, p.labels, opt);
        CHECK_EQ(model.lambda, 0.5);
        CHECK_EQ(model.feature_count, 6);
        CHECK_EQ(model.class_count, 3);

        const oracle::RidgeSolution ref = oracle::ridge_solve(p.x, p.n, p.t, p.labels, 3, 0.5);
        for (std::size_t i = 0; i < ref.weights.size(); ++i)
            check_close(model.weights[i], ref.weights[i]);
        for (int k = 0; k < 3; ++k) check_close(model.biases[k], ref.biases[k]);
    }
}

TEST_CASE("grid selection still solves the chosen lambda exactly") {
    const Problem p = random_problem(60, 8, 2, 9);
    const LinearClassifier model = train_ridge(p.x, p.n, p.t, p.labels);

    const std::vector<double> grid = RidgeOptions{}.lambda_grid;
    CHECK(std::find(grid.begin(), grid.end(), model.lambda) != grid.end());

    const oracle::RidgeSolution ref = oracle::ridge_solve(p.x, p.n, p.t, p.labels, 2, model.lambda);
    for (std::size_t i = 0; i < ref.weights.size(); ++i) check_close(model.weights[i], ref.weights[i]);
    for (int k = 0; k < 2; ++k) check_close(model.biases[k], ref.biases[k]);
}

TEST_CASE("binary targets are mirrored, so the two columns negate each other") {
    const Problem p = random_problem(30, 5, 2, 4);
    RidgeOptions opt;
    opt.lambda_grid = {1.0};
    const LinearClassifier model = train_ridge(p.x, p.n, p.t, p.labels, opt);
    for (int j = 0; j < p.t; ++j) check_close(model.weight(j, 0), -model.weight(j, 1), 1e-9);
    check_close(model.biases[0], -model.biases[1], 1e-9);
}

TEST_CASE("training is deterministic") {
    const Problem p = random_problem(50, 7, 3, 6);
    const LinearClassifier a = train_ridge(p.x, p.n, p.t, p.labels);
    const LinearClassifier b = train_ridge(p.x, p.n, p.t, p.labels);
    CHECK(a == b);
}

TEST_CASE("separable clusters are classified correctly") {
    // Three tight clusters at distinct corners.
    std::vector<float> x;
    std::vector<int> labels;
    Rng rng(12);
    const float centers[3][2] = {{0.0f, 0.0f}, {1.0f, 0.0f}, {0.0f, 1.0f}};
    for (int i = 0; i < 60; ++i) {
        const int k = i % 3;
        labels.push_back(k);
        x.push_back(centers[k][0] + static_cast<float>(0.02 * rng.gaussian()));
        x.push_back(centers[k][1] + static_cast<float>(0.02 * rng.gaussian()));
    }
    const LinearClassifier model = train_ridge(x, 60, 2, labels);
    int correct = 0;
    for (int i = 0; i < 60; ++i) {
        const Prediction pred = predict_float(std::span<const float>(x).subspan(i * 2, 2), model);
        correct += pred.class_index == labels[i];
        CHECK_EQ(pred.scores.size(), 3);
    }
    CHECK_EQ(correct, 60);
}

TEST_CASE("class labels") {
    const Problem p = random_problem(20, 3, 2, 8);
    SUBCASE("default names are positional") {
        const LinearClassifier model = train_ridge(p.x, p.n, p.t, p.labels);
        CHECK_EQ(model.class_labels, std::vector<std::string>({"class0", "class1"}));
    }
    SUBCASE("supplied names are kept and must match the class count") {
        RidgeOptions opt;
        opt.class_labels = {"transportation", "usage"};
        const LinearClassifier model = train_ridge(p.x, p.n, p.t, p.labels, opt);
        CHECK_EQ(model.class_labels[1], "usage");

        opt.class_labels = {"a", "b", "c"};
        CHECK_THROWS_AS(train_ridge(p.x, p.n, p.t, p.labels, opt), InvalidArgument);
    }
}

TEST_CASE("prediction accumulates ascending and breaks ties low") {
    LinearClassifier model;
    model.feature_count = 2;
    model.class_count = 3;
    model.weights = {0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    model.biases = {1.0, 1.0, 1.0};
    model.class_labels = {"a", "b", "c"};
    const std::vector<float> x{0.5f, 0.25f};
    CHECK_EQ(predict_float(x, model).class_index, 0);

    model.biases = {1.0, 2.0, 2.0};
    CHECK_EQ(predict_float(x, model).class_index, 1);

    SUBCASE("feature vector overloads") {
        FeatureVector fv;
        fv.mode = FeatureMode::Float;
        fv.values = {0.5f, 0.25f};
        CHECK_EQ(predict_float(fv, model).class_index, 1);

        fv.mode = FeatureMode::Quantized;
        fv.counts = {1, 2};
        CHECK_THROWS_AS(predict_float(fv, model), InvalidArgument);
    }
    SUBCASE("dimension mismatch") {
        const std::vector<float> bad{0.5f};
        CHECK_THROWS_AS(predict_float(bad, model), InvalidArgument);
    }
}

TEST_CASE("degenerate inputs are rejected") {
    const Problem p = random_problem(10, 3, 2, 5);

    CHECK_THROWS_AS(train_ridge({}, 0, 0, {}), InvalidArgument);
    CHECK_THROWS_AS(train_ridge(p.x, p.n, p.t + 1, p.labels), InvalidArgument);

    std::vector<int> short_labels(p.labels.begin(), p.labels.end() - 1);
    CHECK_THROWS_AS(train_ridge(p.x, p.n, p.t, short_labels), InvalidArgument);

    std::vector<int> negative = p.labels;
    negative[0] = -1;
    CHECK_THROWS_AS(train_ridge(p.x, p.n, p.t, negative), InvalidArgument);

    std::vector<int> one_class(p.labels.size(), 0);
    CHECK_THROWS_AS(train_ridge(p.x, p.n, p.t, one_class), InvalidArgument);

    std::vector<int> sparse = p.labels;
    sparse[0] = 5;  // classes 2..4 have no samples
    CHECK_THROWS_AS(train_ridge(p.x, p.n, p.t, sparse), InvalidArgument);

    RidgeOptions opt;
    opt.lambda_grid = {};
    CHECK_THROWS_AS(train_ridge(p.x, p.n, p.t, p.labels, opt), InvalidArgument);

    opt.lambda_grid = {-1.0};
    CHECK_THROWS_AS(train_ridge(p.x, p.n, p.t, p.labels, opt), InvalidArgument);
}

TEST_CASE("a singular system with lambda zero is reported, not returned") {
    // Two distinct rows padded with duplicates: rank 2 in a 4-wide augmented
    // design, so lambda = 0 leaves a null space.
    std::vector<float> x{1.0f, 2.0f, 3.0f, 1.0f, 2.0f, 3.0f, 2.0f, 4.0f, 6.0f, 2.0f, 4.0f, 6.0f};
    std::vector<int> labels{0, 0, 1, 1};
    RidgeOptions opt;
    opt.lambda_grid = {0.0};
    CHECK_THROWS_AS(train_ridge(x, 4, 3, labels, opt), NumericError);

    SUBCASE("a positive lambda on the same grid rescues it") {
        opt.lambda_grid = {0.0, 0.1};
        const LinearClassifier model = train_ridge(x, 4, 3, labels, opt);
        CHECK_EQ(model.lambda, 0.1);
    }
}
