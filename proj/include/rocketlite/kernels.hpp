#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "rocketlite/window.hpp"

namespace rkl {

inline constexpr int kKernelLength = 9;
inline constexpr int kKernelCount = 84;  // C(9,3)
inline constexpr int kPositiveWeight = 2;
inline constexpr int kNegativeWeight = -1;
// Largest per-position weighted footprint of one kernel: 3*|2| + 6*|-1|.
inline constexpr int kWeightFootprint = 12;

// One kernel: the 3 tap positions carrying weight +2; the other 6 taps carry
// weight -1, so every kernel sums to zero.
struct WeightPattern {
    std::array<std::uint8_t, 3> positive_taps;

    int weight(int tap) const {
        for (auto t : positive_taps)
            if (t == tap) return kPositiveWeight;
        return kNegativeWeight;
    }
    bool operator==(const WeightPattern&) const = default;
};

// All 84 distinct 3-of-9 patterns in lexicographic order of the tap triple.
std::vector<WeightPattern> build_kernels();

struct DilationPlan {
    std::vector<int> dilations;             // ascending, unique
    std::vector<int> features_per_kernel;   // per dilation: repetitions of each kernel
};

// Exponential dilation schedule: floor(2^x) for feature_count/84 exponents
// uniformly spaced in [0, log2((L-1)/8)], deduplicated; collisions stack
// extra features onto the smaller dilations.
DilationPlan plan_dilations(int window_length, int feature_count);

// The full transform model. Structure (patterns, dilations, channels,
// paddings) is fixed at build time; biases arrive with fit().
//
// Feature layout is dilation-major: for each dilation (ascending), for each
// kernel (0..83), features_per_kernel[di] consecutive features. Features of
// one kernel-dilation pair share the convolution and differ by quantile.
struct KernelSet {
    int kernel_length = kKernelLength;
    std::vector<WeightPattern> weight_patterns;       // 84
    int window_length = 0;
    int channel_count = 1;
    int feature_count = 0;
    std::vector<int> dilations;
    std::vector<int> features_per_kernel;             // parallel to dilations
    std::vector<std::vector<std::uint16_t>> channel_assignments;  // [pair], ascending
    std::vector<std::uint8_t> paddings;               // [pair], 1 = zero-padded
    std::vector<float> biases;                        // [feature], empty until fitted
    std::vector<std::int32_t> comparison_counts;      // [feature], C_k
    std::uint64_t seed = 0;

    int dilation_count() const { return static_cast<int>(dilations.size()); }
    int pair_count() const { return dilation_count() * kKernelCount; }
    int pair_index(int dilation_index, int kernel_index) const {
        return dilation_index * kKernelCount + kernel_index;
    }
    // Global index of the first feature of a kernel-dilation pair.
    int feature_begin(int dilation_index, int kernel_index) const;
    bool fitted() const { return !biases.empty(); }

    bool operator==(const KernelSet&) const = default;
};

// Builds the unfitted structure: plans dilations, assigns channels (seeded
// subsets of size 1..channel_count per pair), fixes paddings and C_k.
KernelSet build_kernel_set(int window_length, int channel_count, int feature_count,
                           std::uint64_t seed);

// Dilated correlation of one kernel over the assigned channels, centered at
// tap 4. Accumulates in float32, ascending channel then ascending tap, so the
// output is bit-reproducible. Padded output has window-length positions with
// out-of-range samples contributing zero; unpadded output has
// length - 8*dilation positions (full overlap only).
std::vector<float> convolve(const Window& window, const WeightPattern& pattern, int dilation,
                            std::span<const std::uint16_t> channels, bool padding);

enum class QuantilePolicy { GoldenRatio };

// Fits one bias per feature: each kernel-dilation pair convolves one
// seeded-randomly chosen training window (full-overlap region only, so a
// constant window yields all-zero biases) and each feature of the pair takes
// a low-discrepancy quantile of that output.
std::vector<float> fit_biases(const KernelSet& model, std::span<const Window> training_windows,
                              QuantilePolicy policy, std::uint64_t seed);

// fit_biases with the model's own seed, stored into the model.
void fit(KernelSet& model, std::span<const Window> training_windows);

// PPV features: feature k = |{p : conv_k(p) > B_k}| / C_k.
FeatureVector transform(const Window& window, const KernelSet& model);

// Row-major N x feature_count matrix of PPV features.
std::vector<float> transform_batch(std::span<const Window> windows, const KernelSet& model);

}  // namespace rkl
