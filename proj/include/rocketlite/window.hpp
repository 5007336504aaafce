#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rkl {

// A fixed-length snippet of a recording, ready for the transform. Samples are
// channel-major: samples[c * length + i]. Values are in milli-g.
struct Window {
    std::vector<float> samples;
    int channels = 1;
    int length = 0;
    double sample_rate_hz = 0.0;
    int label = -1;  // -1 = unlabeled

    // Provenance, kept so splits can be audited for leakage.
    std::string recording_id;
    std::string brand;
    std::int64_t start_sample = 0;

    float at(int c, int i) const { return samples[static_cast<std::size_t>(c) * length + i]; }
    float& at(int c, int i) { return samples[static_cast<std::size_t>(c) * length + i]; }
};

enum class FeatureMode { Float, Quantized };

// Output of the transform. Float mode carries PPV fractions in [0, 1];
// quantized mode carries the raw comparison counts, one per feature, still
// in window units (scaling to t^q happens inside the quantized classifier).
struct FeatureVector {
    FeatureMode mode = FeatureMode::Float;
    std::vector<float> values;        // Float mode
    std::vector<std::int32_t> counts; // Quantized mode

    std::size_t size() const {
        return mode == FeatureMode::Float ? values.size() : counts.size();
    }
};

}  // namespace rkl
