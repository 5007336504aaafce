#include "rocketlite/quantize.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "rocketlite/errors.hpp"
#include "rocketlite/metrics.hpp"

namespace rkl {

namespace {

std::int64_t bit_limit(int bit_width) {
    if (bit_width < 8 || bit_width > 64) throw InvalidArgument("bit width must be in [8, 64]");
    if (bit_width == 64) return std::numeric_limits<std::int64_t>::max();
    return (std::int64_t{1} << (bit_width - 1)) - 1;
}

// Round to nearest, ties away from zero (the documented convention).
std::int64_t round_away(double x) { return std::llround(x); }

std::int64_t checked(double scaled, std::int64_t limit) {
    const std::int64_t v = round_away(scaled);
    if (v > limit || v < -limit) throw NumericError("quantization overflow (calibration bug)");
    return v;
}

}  // namespace

std::int64_t calibrate_s1(const KernelSet& model, std::int32_t input_clamp_mg, int bit_width) {
    if (!model.fitted()) throw StateError("model not fitted");
    if (input_clamp_mg <= 0) throw InvalidArgument("input clamp must be positive");
    const std::int64_t limit = bit_limit(bit_width);

    std::int64_t footprint = 0;
    for (const auto& channels : model.channel_assignments)
        footprint = std::max<std::int64_t>(footprint,
                                           kWeightFootprint * static_cast<std::int64_t>(channels.size()));
    double max_abs_bias = 0.0;
    for (float b : model.biases) max_abs_bias = std::max(max_abs_bias, std::abs(double{b}));

    const std::int64_t input_bound = footprint * input_clamp_mg;
    std::int64_t s1;
    if (static_cast<double>(input_bound) >= max_abs_bias) {
        s1 = limit / input_bound;
    } else {
        // floor(limit / B_m) with an exact fixup; B_m is not an integer.
        s1 = static_cast<std::int64_t>(static_cast<double>(limit) / max_abs_bias);
        const auto fits = [&](std::int64_t v) {
            return static_cast<long double>(v) * max_abs_bias <= static_cast<long double>(limit);
        };
        while (s1 > 0 && !fits(s1)) --s1;
        while (fits(s1 + 1)) ++s1;
    }
    if (s1 < 1) throw NumericError("bit width insufficient for input range");
    return s1;
}

std::int64_t calibrate_s2(const LinearClassifier& classifier, int bit_width) {
    if (classifier.class_count < 1 || classifier.feature_count < 1)
        throw InvalidArgument("empty classifier");
    const std::int64_t limit = bit_limit(bit_width);

    double f_max = 0.0;
    for (int k = 0; k < classifier.class_count; ++k) {
        double pos = 0.0, neg = 0.0;
        for (int t = 0; t < classifier.feature_count; ++t) {
            const double w = classifier.weight(t, k);
            if (!std::isfinite(w)) throw InvalidArgument("non-finite classifier weight");
            if (w > 0) pos += w;
            else neg += w;
        }
        const double ab = std::abs(classifier.biases[k]);
        if (!std::isfinite(ab)) throw InvalidArgument("non-finite classifier bias");
        f_max = std::max({f_max, pos + ab, -neg + ab});
    }
    if (f_max == 0.0) throw NumericError("degenerate classifier: cannot calibrate");

    // Largest integer s with s^2 * f_max <= limit, found by fixup around the
    // floating-point estimate.
    const auto fits = [&](std::int64_t s) {
        return static_cast<long double>(s) * s * f_max <= static_cast<long double>(limit);
    };
    auto s2 = static_cast<std::int64_t>(std::sqrt(static_cast<double>(limit) / f_max));
    while (s2 > 0 && !fits(s2)) --s2;
    while (fits(s2 + 1)) ++s2;
    if (s2 < 1) throw NumericError("bit width insufficient for classifier range");
    return s2;
}

QuantizationCalibration calibrate(const KernelSet& model, const LinearClassifier& classifier,
                                  std::int32_t input_clamp_mg, int bit_width) {
    QuantizationCalibration cal;
    cal.bit_width = bit_width;
    cal.input_clamp_mg = input_clamp_mg;
    cal.s1 = calibrate_s1(model, input_clamp_mg, bit_width);
    cal.s2 = calibrate_s2(classifier, bit_width);
    std::int64_t footprint = 0;
    for (const auto& channels : model.channel_assignments)
        footprint = std::max<std::int64_t>(footprint,
                                           kWeightFootprint * static_cast<std::int64_t>(channels.size()));
    cal.max_footprint = footprint;
    double max_abs_bias = 0.0;
    for (float b : model.biases) max_abs_bias = std::max(max_abs_bias, std::abs(double{b}));
    cal.max_abs_bias = max_abs_bias;
    return cal;
}

QuantizedModel quantize_model(const KernelSet& model, const LinearClassifier& classifier,
                              const QuantizationCalibration& calibration) {
    if (!model.fitted()) throw StateError("model not fitted");
    if (classifier.feature_count != model.feature_count)
        throw InvalidArgument("classifier/transform feature count mismatch");
    if (calibration.s1 < 1 || calibration.s2 < 1)
        throw InvalidArgument("calibration not computed");
    const std::int64_t limit = calibration.limit();
    const std::int64_t s1 = calibration.s1;
    const std::int64_t s2 = calibration.s2;

    QuantizedModel q;
    q.calibration = calibration;
    q.biases_q.reserve(model.biases.size());
    for (float b : model.biases)
        q.biases_q.push_back(checked(static_cast<double>(s1) * b, limit));

    const int k_count = classifier.class_count;
    q.weights_q.resize(classifier.weights.size());
    for (std::size_t i = 0; i < classifier.weights.size(); ++i)
        q.weights_q[i] = checked(static_cast<double>(s2) * classifier.weights[i], limit);
    q.clf_biases_q.reserve(k_count);
    const double s2sq = static_cast<double>(s2) * static_cast<double>(s2);
    for (double b : classifier.biases) q.clf_biases_q.push_back(checked(s2sq * b, limit));

    // Inference-intermediate bounds that rounding could, in principle, push
    // past the calibration margin. Checked here so runtime needs no checks.
    std::int32_t max_ck = 0;
    for (std::int32_t c : model.comparison_counts) max_ck = std::max(max_ck, c);
    if (s2 > (limit - max_ck / 2) / max_ck)
        throw NumericError("quantization overflow (calibration bug)");
    for (int k = 0; k < k_count; ++k) {
        std::int64_t pos = 0, neg = 0;
        for (int t = 0; t < classifier.feature_count; ++t) {
            const std::int64_t w = q.weights_q[static_cast<std::size_t>(t) * k_count + k];
            if (w > 0) pos += w;
            else neg += w;
        }
        const std::int64_t bq = q.clf_biases_q[k];
        // Scores accumulate from b^q upward; prefix extremes are b^q + S2*pos
        // and b^q + S2*neg.
        if (bq + s2 * pos > limit || bq + s2 * neg < -limit)
            throw NumericError("quantization overflow (calibration bug)");
    }
    return q;
}

std::vector<std::int64_t> quantize_input(const Window& window,
                                         const QuantizationCalibration& calibration) {
    const float clamp = static_cast<float>(calibration.input_clamp_mg);
    const double s1 = static_cast<double>(calibration.s1);
    std::vector<std::int64_t> out(window.samples.size());
    for (std::size_t i = 0; i < window.samples.size(); ++i) {
        const float x = std::clamp(window.samples[i], -clamp, clamp);
        out[i] = std::llround(s1 * static_cast<double>(x));
    }
    return out;
}

FeatureVector transform_q(const Window& window, const KernelSet& model,
                          const QuantizedModel& qmodel) {
    if (window.channels != model.channel_count) throw InvalidArgument("channel count mismatch");
    if (window.length != model.window_length) throw InvalidArgument("window length mismatch");
    if (static_cast<int>(qmodel.biases_q.size()) != model.feature_count)
        throw InvalidArgument("quantized model mismatch");

    const std::vector<std::int64_t> xq = quantize_input(window, qmodel.calibration);
    const int len = window.length;

    FeatureVector out;
    out.mode = FeatureMode::Quantized;
    out.counts.resize(model.feature_count);

    for (int di = 0; di < model.dilation_count(); ++di) {
        const int d = model.dilations[di];
        const int offset = 4 * d;
        for (int k = 0; k < kKernelCount; ++k) {
            const int pair = model.pair_index(di, k);
            const WeightPattern& pattern = model.weight_patterns[k];
            const auto& channels = model.channel_assignments[pair];
            const bool padded = model.paddings[pair] != 0;
            const int begin = model.feature_begin(di, k);
            const int reps = model.features_per_kernel[di];

            std::int64_t weights[kKernelLength];
            for (int tap = 0; tap < kKernelLength; ++tap) weights[tap] = pattern.weight(tap);

            const int p_end = padded ? len : len - 8 * d;
            for (int p = 0; p < p_end; ++p) {
                // All values provably fit the configured bit width; 64-bit
                // registers hold them without changing any result.
                std::int64_t acc = 0;
                for (const std::uint16_t c : channels) {
                    const std::int64_t* x = xq.data() + static_cast<std::size_t>(c) * len;
                    if (padded) {
                        for (int tap = 0; tap < kKernelLength; ++tap) {
                            const int idx = p + tap * d - offset;
                            if (idx >= 0 && idx < len) acc += weights[tap] * x[idx];
                        }
                    } else {
                        for (int tap = 0; tap < kKernelLength; ++tap)
                            acc += weights[tap] * x[p + tap * d];
                    }
                }
                for (int r = 0; r < reps; ++r)
                    out.counts[begin + r] += acc > qmodel.biases_q[begin + r];
            }
        }
    }
    return out;
}

QuantPrediction predict_q(const FeatureVector& counts, const KernelSet& model,
                          const QuantizedModel& qmodel) {
    if (counts.mode != FeatureMode::Quantized)
        throw InvalidArgument("float features require predict_float");
    if (static_cast<int>(counts.counts.size()) != model.feature_count)
        throw InvalidArgument("feature dimension mismatch");

    const std::int64_t s2 = qmodel.calibration.s2;
    const int t_count = model.feature_count;
    const int k_count = static_cast<int>(qmodel.clf_biases_q.size());

    QuantPrediction p;
    p.features_q.resize(t_count);
    for (int t = 0; t < t_count; ++t) {
        const std::int64_t c = model.comparison_counts[t];
        const std::int64_t count = counts.counts[t];
        assert(count >= 0 && c > 0);  // "\" never sees negative operands
        p.features_q[t] = (s2 * count + c / 2) / c;
    }

    p.scores.resize(k_count);
    for (int k = 0; k < k_count; ++k) {
        std::int64_t acc = qmodel.clf_biases_q[k];
        for (int t = 0; t < t_count; ++t)
            acc += p.features_q[t] * qmodel.weights_q[static_cast<std::size_t>(t) * k_count + k];
        p.scores[k] = acc;
    }
    p.class_index = 0;
    for (int k = 1; k < k_count; ++k)
        if (p.scores[k] > p.scores[p.class_index]) p.class_index = k;
    return p;
}

double score_slack(const QuantizedModel& qmodel, const LinearClassifier& classifier,
                   int class_index) {
    // With equal comparison counts on both paths:
    //   |t^q - S2*t| <= 1,  |W^q - S2*W| <= 0.5,  |b^q - S2^2*b| <= 0.5
    // so |score_q - S2^2 * score_float|
    //   <= sum_t (|W^q| + 0.5*S2) + 0.5
    //   <= S2 * (sum_t |W| + T/2) + T/2 + 0.5   (quantized-score units).
    const double s2 = static_cast<double>(qmodel.calibration.s2);
    const int t_count = classifier.feature_count;
    double abs_w = 0.0;
    for (int t = 0; t < t_count; ++t) abs_w += std::abs(classifier.weight(t, class_index));
    return s2 * (abs_w + t_count / 2.0) + t_count / 2.0 + 0.5;
}

AgreementReport validate_pair(const KernelSet& model, const LinearClassifier& classifier,
                              const QuantizedModel& qmodel, std::span<const Window> windows) {
    if (windows.empty()) throw InvalidArgument("nothing to validate");

    AgreementReport report;
    report.window_count = static_cast<int>(windows.size());

    std::vector<int> truth, pred_f, pred_q;
    for (std::size_t i = 0; i < windows.size(); ++i) {
        const Window& w = windows[i];
        const Prediction pf = predict_float(transform(w, model), classifier);
        const QuantPrediction pq = predict_q(transform_q(w, model, qmodel), model, qmodel);
        if (pf.class_index == pq.class_index) {
            ++report.agreeing;
        } else {
            double top = pf.scores[pf.class_index];
            double second = -std::numeric_limits<double>::infinity();
            for (int k = 0; k < classifier.class_count; ++k)
                if (k != pf.class_index) second = std::max(second, pf.scores[k]);
            report.disagreements.push_back(
                {static_cast<int>(i), pf.class_index, pq.class_index, top - second});
        }
        if (w.label >= 0) {
            truth.push_back(w.label);
            pred_f.push_back(pf.class_index);
            pred_q.push_back(pq.class_index);
        }
    }
    report.agreement_rate = static_cast<double>(report.agreeing) / report.window_count;
    if (!truth.empty()) {
        const BinaryMetrics mf = binary_metrics(truth, pred_f);
        const BinaryMetrics mq = binary_metrics(truth, pred_q);
        report.accuracy_float = mf.accuracy;
        report.accuracy_quant = mq.accuracy;
        report.f1_float = mf.f1;
        report.f1_quant = mq.f1;
    }
    return report;
}

}  // namespace rkl
