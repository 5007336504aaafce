#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rocketlite/signal.hpp"

namespace rkl {

// Tool brand as the generator models it. Usage vibration sits at a
// brand-specific fundamental; brand differences are frequency/amplitude
// offsets, so a brand-held-out split is non-trivial but learnable.
struct BrandSpec {
    std::string name;
    std::string family;        // grinder | drill | saw
    double fundamental_hz = 55.0;  // 40..120
    double amplitude_mg = 900.0;   // usage burst scale
    double duration_s = 120.0;     // total simulated time for this brand
    double recording_s = 600.0;    // split into recordings of at most this
};

struct SynthConfig {
    double source_rate_hz = 800.0;
    double mean_segment_s = 6.0;  // alternating usage/transport segments
    std::vector<BrandSpec> brands;
};

// Six brands across three families, 120 s each at 800 Hz.
SynthConfig default_synth_config();

// The 12-activity taxonomy carried as metadata (7 usage, 5 transportation).
std::span<const char* const> usage_activities();
std::span<const char* const> transport_activities();

// Labeled tri-axial corpus. Usage segments are harmonic bursts at the brand
// fundamental plus impact noise (AC energy concentrated above 20 Hz);
// transportation segments are sub-5 Hz random-walk motion with gravity
// orientation drift and sparse jolts. Deterministic under seed.
std::vector<Recording> synth_generate(const SynthConfig& config, std::uint64_t seed);

struct ScenarioSegment {
    double t_start_s = 0.0;
    double t_end_s = 0.0;
    std::string activity;  // taxonomy name, "usage", "transportation" or "none"
};

// Renders a scenario segment list into a tri-axial signal at the given rate,
// for driving the device simulator. Gaps and "none" segments are motionless.
Recording synth_scenario_signal(std::span<const ScenarioSegment> segments, double rate_hz,
                                double duration_s, std::uint64_t seed);

}  // namespace rkl
