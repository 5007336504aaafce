#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rocketlite/kernels.hpp"
#include "rocketlite/ridge.hpp"
#include "rocketlite/window.hpp"

namespace rkl {

struct QuantizationCalibration {
    int bit_width = 32;               // b
    std::int32_t input_clamp_mg = 16000;  // I_m
    std::int64_t max_footprint = 0;   // N_m = 12 * max assigned channels
    double max_abs_bias = 0.0;        // B_m
    std::int64_t s1 = 0;
    std::int64_t s2 = 0;

    std::int64_t limit() const { return (std::int64_t{1} << (bit_width - 1)) - 1; }
    bool operator==(const QuantizationCalibration&) const = default;
};

// Quantized parameters. Structure (patterns, dilations, paddings, channels,
// C_k) stays in the KernelSet the model was built from; inference takes both.
// Values are proven to fit the calibrated bit width; the containers are
// 64-bit so bit widths above 32 work too.
struct QuantizedModel {
    std::vector<std::int64_t> biases_q;      // per feature, round(S1 * B_j)
    std::vector<std::int64_t> weights_q;     // T x K, round(S2 * W)
    std::vector<std::int64_t> clf_biases_q;  // K, round(S2^2 * b)
    QuantizationCalibration calibration;

    bool operator==(const QuantizedModel&) const = default;
};

// S1 = floor((2^(b-1) - 1) / max(I_m * N_m, B_m)), evaluated in exact integer
// arithmetic. N_m is the conservative weighted footprint 12 * channels.
std::int64_t calibrate_s1(const KernelSet& model, std::int32_t input_clamp_mg, int bit_width);

// S2 = floor(sqrt((2^(b-1) - 1) / max_k f(k))) with
// f(k) = max(w+_k + |b_k|, -w-_k + |b_k|) over per-class positive/negative
// weight sums; integer square root, no floating-point rounding.
std::int64_t calibrate_s2(const LinearClassifier& classifier, int bit_width);

QuantizationCalibration calibrate(const KernelSet& model, const LinearClassifier& classifier,
                                  std::int32_t input_clamp_mg = 16000, int bit_width = 32);

// Rounds S1*B_j, S2*W, S2^2*b to integers (ties away from zero) and verifies
// every stored value and every inference intermediate bound fits the bit
// width.
QuantizedModel quantize_model(const KernelSet& model, const LinearClassifier& classifier,
                              const QuantizationCalibration& calibration);

// clamp(x, +-I_m) then round(S1 * x), per channel. Values fit the calibrated
// bit width; the container is 64-bit for the same reason as the parameters.
// Exposed for golden vectors and the widened-oracle tests.
std::vector<std::int64_t> quantize_input(const Window& window,
                                         const QuantizationCalibration& calibration);

// Integer transform: quantized input, integer convolution, count of positions
// with conv > bias_q. Returns a FeatureVector in Quantized mode with counts
// in [0, C_k].
FeatureVector transform_q(const Window& window, const KernelSet& model,
                          const QuantizedModel& qmodel);

struct QuantPrediction {
    int class_index = 0;                  // k*
    std::vector<std::int64_t> scores;     // K, each within the bit width
    std::vector<std::int64_t> features_q; // t^q, in [0, S2]
};

// t^q = (S2 * count + C_k div 2) div C_k; scores = t^q W^q + b^q accumulated
// from b^q upward so every prefix respects the S2 bound; lowest-index argmax.
QuantPrediction predict_q(const FeatureVector& counts, const KernelSet& model,
                          const QuantizedModel& qmodel);

struct Disagreement {
    int window_index = 0;
    int class_float = 0;
    int class_quant = 0;
    double float_margin = 0.0;  // top-2 float score gap
};

struct AgreementReport {
    int window_count = 0;
    int agreeing = 0;
    double agreement_rate = 0.0;
    double accuracy_float = 0.0;
    double accuracy_quant = 0.0;
    double f1_float = 0.0;   // binary F1 on the positive class
    double f1_quant = 0.0;
    std::vector<Disagreement> disagreements;
};

// Runs both paths over labeled windows and reports argmax agreement plus
// per-path metrics. F1 is computed against class index 1 when K = 2.
AgreementReport validate_pair(const KernelSet& model, const LinearClassifier& classifier,
                              const QuantizedModel& qmodel, std::span<const Window> windows);

// Analytic rounding slack: |score_float gap| above which the two paths must
// agree. Used by the margin-based agreement property test.
double score_slack(const QuantizedModel& qmodel, const LinearClassifier& classifier,
                   int class_index);

}  // namespace rkl
