#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rocketlite/window.hpp"

namespace rkl {

// Class indices are fixed across the library: windows labeled 0 are
// Transportation, 1 are Usage.
inline constexpr int kTransportationClass = 0;
inline constexpr int kUsageClass = 1;
inline const char* const kClassNames[2] = {"transportation", "usage"};

struct Recording {
    std::string id;        // unique within a corpus (file stem on disk)
    std::string brand;
    std::string family;
    std::string activity;  // dominant activity, informational
    double source_rate_hz = 0.0;
    int channels = 0;
    std::vector<float> samples;         // channel-major [c * n + i], milli-g
    std::vector<std::uint16_t> labels;  // per sample: class index

    std::size_t sample_count() const {
        return channels ? samples.size() / channels : 0;
    }
    float at(int c, std::size_t i) const { return samples[c * sample_count() + i]; }
};

// Linear-phase windowed-sinc (Hamming) low-pass with cutoff 0.45*target_rate,
// normalized to unit DC gain. taps must be odd and >= 11.
std::vector<double> design_fir_lowpass(double target_rate_hz, double source_rate_hz, int taps);

// Polyphase rational resampler (filter-then-decimate generalized to L/M).
// Group delay is compensated, labels follow the nearest source timestamp,
// identity rate is a no-op. The rate pair must reduce to a rational ratio
// with integer terms.
Recording resample(const Recording& rec, double target_rate_hz, int taps = 101);

// Tri-axial |x|+|y|+|z| fusion; labels preserved.
Recording l1_norm(const Recording& rec);

struct DatasetSplit {
    std::vector<Window> train;
    std::vector<Window> validation;
    std::vector<Window> test;
    std::string policy;
    std::vector<std::string> warnings;
};

struct WindowingOptions {
    int window_len = 80;
    int train_count = 0;
    int val_count = 0;
    std::uint64_t seed = 0;
};

// All non-overlapping pure-label windows of a recording, in order.
std::vector<Window> enumerate_pure_windows(const Recording& rec, int window_len);

// Enumerates non-overlapping candidate windows across the recordings, drops
// mixed-label ones, then draws train/validation sets with an exact 50/50
// class balance, disjoint and seeded.
DatasetSplit window_dataset(std::span<const Recording> recordings, const WindowingOptions& opt);

// Brand-held-out split: train/validation windows come from train_brand only,
// test contains every pure window of every other brand.
DatasetSplit split_by_brand(std::span<const Recording> recordings, const std::string& train_brand,
                            const WindowingOptions& opt);

}  // namespace rkl
