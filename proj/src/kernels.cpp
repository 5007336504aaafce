#include "rocketlite/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "rocketlite/errors.hpp"
#include "rocketlite/rng.hpp"

namespace rkl {

std::vector<WeightPattern> build_kernels() {
    std::vector<WeightPattern> patterns;
    patterns.reserve(kKernelCount);
    for (std::uint8_t i = 0; i < kKernelLength; ++i)
        for (std::uint8_t j = i + 1; j < kKernelLength; ++j)
            for (std::uint8_t k = j + 1; k < kKernelLength; ++k)
                patterns.push_back(WeightPattern{{i, j, k}});
    return patterns;
}

DilationPlan plan_dilations(int window_length, int feature_count) {
    if (window_length < kKernelLength) throw InvalidArgument("window too short");
    if (feature_count < kKernelCount || feature_count % kKernelCount != 0)
        throw InvalidArgument("feature count must be multiple of kernel count");

    const int per_kernel = feature_count / kKernelCount;
    const int max_dilation = (window_length - 1) / 8;
    const double max_exponent = std::log2((window_length - 1) / 8.0);

    DilationPlan plan;
    for (int i = 0; i < per_kernel; ++i) {
        const double x = per_kernel == 1 ? 0.0 : max_exponent * i / (per_kernel - 1);
        int d = static_cast<int>(std::floor(std::exp2(x)));
        d = std::clamp(d, 1, max_dilation);
        if (!plan.dilations.empty() && plan.dilations.back() == d) {
            ++plan.features_per_kernel.back();
        } else {
            plan.dilations.push_back(d);
            plan.features_per_kernel.push_back(1);
        }
    }
    return plan;
}

int KernelSet::feature_begin(int dilation_index, int kernel_index) const {
    int offset = 0;
    for (int di = 0; di < dilation_index; ++di) offset += kKernelCount * features_per_kernel[di];
    return offset + kernel_index * features_per_kernel[dilation_index];
}

KernelSet build_kernel_set(int window_length, int channel_count, int feature_count,
                           std::uint64_t seed) {
    if (channel_count < 1) throw InvalidArgument("channel count must be positive");

    KernelSet model;
    model.weight_patterns = build_kernels();
    model.window_length = window_length;
    model.channel_count = channel_count;
    model.feature_count = feature_count;
    model.seed = seed;

    DilationPlan plan = plan_dilations(window_length, feature_count);
    model.dilations = plan.dilations;
    model.features_per_kernel = plan.features_per_kernel;

    Rng rng(seed, "channels");
    model.channel_assignments.reserve(model.pair_count());
    model.paddings.reserve(model.pair_count());
    for (int di = 0; di < model.dilation_count(); ++di) {
        for (int k = 0; k < kKernelCount; ++k) {
            const int subset = 1 + static_cast<int>(rng.below(channel_count));
            std::vector<std::uint16_t> pool(channel_count);
            for (int c = 0; c < channel_count; ++c) pool[c] = static_cast<std::uint16_t>(c);
            for (int c = 0; c < subset; ++c) {
                const int pick = c + static_cast<int>(rng.below(channel_count - c));
                std::swap(pool[c], pool[pick]);
            }
            pool.resize(subset);
            std::sort(pool.begin(), pool.end());
            model.channel_assignments.push_back(std::move(pool));
            model.paddings.push_back((k + di) % 2 == 0 ? 1 : 0);
        }
    }

    model.comparison_counts.resize(feature_count);
    for (int di = 0; di < model.dilation_count(); ++di) {
        const int d = model.dilations[di];
        for (int k = 0; k < kKernelCount; ++k) {
            const bool padded = model.paddings[model.pair_index(di, k)] != 0;
            const std::int32_t c = padded ? window_length : window_length - 8 * d;
            const int begin = model.feature_begin(di, k);
            for (int r = 0; r < model.features_per_kernel[di]; ++r)
                model.comparison_counts[begin + r] = c;
        }
    }
    return model;
}

namespace {

void check_window(const Window& w, const KernelSet& model) {
    if (w.channels != model.channel_count) throw InvalidArgument("channel count mismatch");
    if (w.length != model.window_length) throw InvalidArgument("window length mismatch");
}

// Core of the transform: convolution of one kernel-dilation pair followed by
// bias comparisons for each of the pair's features. Keeping the conv value
// in a local and comparing immediately avoids materializing the output array
// in the batch path.
template <typename Consumer>
void convolve_visit(const Window& w, const WeightPattern& pattern, int dilation,
                    std::span<const std::uint16_t> channels, bool padding, Consumer&& consume) {
    if (channels.empty()) throw InvalidArgument("no channels assigned");

    float weights[kKernelLength];
    for (int tap = 0; tap < kKernelLength; ++tap)
        weights[tap] = static_cast<float>(pattern.weight(tap));

    const int len = w.length;
    const int d = dilation;
    const int offset = 4 * d;  // center tap

    if (!padding) {
        // Full overlap only: position p covers samples p .. p+8d.
        const int out_len = len - 8 * d;
        for (int p = 0; p < out_len; ++p) {
            float acc = 0.0f;
            for (const std::uint16_t c : channels) {
                const float* x = w.samples.data() + static_cast<std::size_t>(c) * len + p;
                for (int tap = 0; tap < kKernelLength; ++tap) acc += weights[tap] * x[tap * d];
            }
            consume(p, acc);
        }
        return;
    }

    for (int p = 0; p < len; ++p) {
        float acc = 0.0f;
        for (const std::uint16_t c : channels) {
            const float* x = w.samples.data() + static_cast<std::size_t>(c) * len;
            for (int tap = 0; tap < kKernelLength; ++tap) {
                const int idx = p + tap * d - offset;
                if (idx >= 0 && idx < len) acc += weights[tap] * x[idx];
            }
        }
        consume(p, acc);
    }
}

}  // namespace

std::vector<float> convolve(const Window& window, const WeightPattern& pattern, int dilation,
                            std::span<const std::uint16_t> channels, bool padding) {
    const int out_len = padding ? window.length : window.length - 8 * dilation;
    if (out_len < 1) throw InvalidArgument("window too short for dilated span");
    std::vector<float> out(static_cast<std::size_t>(out_len));
    convolve_visit(window, pattern, dilation, channels, padding,
                   [&](int p, float v) { out[p] = v; });
    return out;
}

namespace {

// Low-discrepancy quantile position for global feature index k.
double golden_quantile(int k) {
    const double phi = 0.6180339887498949;
    const double q = (k + 1) * phi;
    return q - std::floor(q);
}

// Type-7 empirical quantile (linear interpolation between order statistics).
float empirical_quantile(std::vector<float> values, double q) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n == 1) return values[0];
    const double h = (n - 1) * q;
    const std::size_t lo = static_cast<std::size_t>(h);
    const double frac = h - static_cast<double>(lo);
    if (lo + 1 >= n) return values[n - 1];
    return static_cast<float>(values[lo] + frac * (values[lo + 1] - values[lo]));
}

}  // namespace

std::vector<float> fit_biases(const KernelSet& model, std::span<const Window> training_windows,
                              QuantilePolicy policy, std::uint64_t seed) {
    (void)policy;  // GoldenRatio is the only policy
    if (training_windows.empty()) throw InvalidArgument("cannot calibrate biases");
    for (const Window& w : training_windows) check_window(w, model);

    Rng rng(seed, "bias");
    std::vector<float> biases(model.feature_count);
    for (int di = 0; di < model.dilation_count(); ++di) {
        const int d = model.dilations[di];
        for (int k = 0; k < kKernelCount; ++k) {
            const int pair = model.pair_index(di, k);
            const Window& w = training_windows[rng.below(training_windows.size())];
            // Quantiles are taken over the full-overlap region regardless of
            // the pair's padding flag, so constant inputs yield zero biases.
            std::vector<float> conv = convolve(w, model.weight_patterns[k], d,
                                               model.channel_assignments[pair], false);
            const int begin = model.feature_begin(di, k);
            for (int r = 0; r < model.features_per_kernel[di]; ++r) {
                const int f = begin + r;
                biases[f] = empirical_quantile(conv, golden_quantile(f));
            }
        }
    }
    return biases;
}

void fit(KernelSet& model, std::span<const Window> training_windows) {
    model.biases = fit_biases(model, training_windows, QuantilePolicy::GoldenRatio, model.seed);
}

FeatureVector transform(const Window& window, const KernelSet& model) {
    if (!model.fitted()) throw StateError("model not fitted");
    check_window(window, model);

    FeatureVector out;
    out.mode = FeatureMode::Float;
    out.values.resize(model.feature_count);

    const int max_reps =
        *std::max_element(model.features_per_kernel.begin(), model.features_per_kernel.end());
    std::vector<int> counts(max_reps);

    for (int di = 0; di < model.dilation_count(); ++di) {
        const int d = model.dilations[di];
        for (int k = 0; k < kKernelCount; ++k) {
            const int pair = model.pair_index(di, k);
            const bool padded = model.paddings[pair] != 0;
            const int begin = model.feature_begin(di, k);
            const int reps = model.features_per_kernel[di];

            std::fill(counts.begin(), counts.begin() + reps, 0);
            const float* bias = model.biases.data() + begin;
            convolve_visit(window, model.weight_patterns[k], d, model.channel_assignments[pair],
                           padded, [&](int, float v) {
                               for (int r = 0; r < reps; ++r) counts[r] += v > bias[r];
                           });
            for (int r = 0; r < reps; ++r) {
                out.values[begin + r] = static_cast<float>(counts[r]) /
                                        static_cast<float>(model.comparison_counts[begin + r]);
            }
        }
    }
    return out;
}

std::vector<float> transform_batch(std::span<const Window> windows, const KernelSet& model) {
    std::vector<float> rows(windows.size() * static_cast<std::size_t>(model.feature_count));
    for (std::size_t i = 0; i < windows.size(); ++i) {
        FeatureVector f = transform(windows[i], model);
        std::copy(f.values.begin(), f.values.end(),
                  rows.begin() + i * static_cast<std::size_t>(model.feature_count));
    }
    return rows;
}

}  // namespace rkl
