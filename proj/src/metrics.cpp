#include "rocketlite/metrics.hpp"

#include "rocketlite/errors.hpp"

namespace rkl {

BinaryMetrics binary_metrics(std::span<const int> truth, std::span<const int> predicted,
                             int positive_class) {
    if (truth.size() != predicted.size()) throw InvalidArgument("metric input size mismatch");

    BinaryMetrics m;
    int correct = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const bool actual = truth[i] == positive_class;
        const bool guess = predicted[i] == positive_class;
        if (truth[i] == predicted[i]) ++correct;
        if (actual && guess) ++m.true_positive;
        else if (!actual && guess) ++m.false_positive;
        else if (actual && !guess) ++m.false_negative;
        else ++m.true_negative;
    }
    const double n = static_cast<double>(truth.size());
    m.accuracy = n > 0 ? correct / n : 0.0;
    const int pp = m.true_positive + m.false_positive;
    const int ap = m.true_positive + m.false_negative;
    m.precision = pp > 0 ? static_cast<double>(m.true_positive) / pp : 0.0;
    m.recall = ap > 0 ? static_cast<double>(m.true_positive) / ap : 0.0;
    m.f1 = (m.precision + m.recall) > 0.0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    return m;
}

}  // namespace rkl
