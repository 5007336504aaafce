#pragma once

#include <span>

namespace rkl {

struct BinaryMetrics {
    int true_positive = 0;
    int false_positive = 0;
    int true_negative = 0;
    int false_negative = 0;
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

// Accuracy over all classes; precision/recall/F1 against positive_class.
BinaryMetrics binary_metrics(std::span<const int> truth, std::span<const int> predicted,
                             int positive_class = 1);

}  // namespace rkl
