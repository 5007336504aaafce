#include "rocketlite/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "rocketlite/errors.hpp"
#include "rocketlite/rng.hpp"

namespace rkl {

namespace {

constexpr const char* kUsageActivities[] = {"grinding",  "drilling",  "cutting", "screwdriving",
                                            "sanding",   "hammering", "chiseling"};
constexpr const char* kTransportActivities[] = {"van_transport", "truck_transport", "carrying",
                                                "trolley", "site_walk"};
constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Axes {
    float* x;
    float* y;
    float* z;
};

// Multiplicative tweak per activity so the same brand sounds slightly
// different across activities; stays within [0.92, 1.05] to keep every
// fundamental below the 200 Hz pipeline's filter cutoff.
double activity_factor(int activity_index) { return 0.92 + 0.0217 * activity_index; }

// Usage: harmonic bursts at the brand fundamental, a mid-band structural
// resonance, impact noise, light gravity wobble. AC energy sits above 20 Hz.
void render_usage(Axes a, std::int64_t n0, std::int64_t n1, double fs, Rng& rng,
                  double fundamental_hz, double amplitude_mg, int brand_index,
                  int activity_index) {
    const double f0 = std::clamp(fundamental_hz * activity_factor(activity_index), 40.0, 88.0);
    const double amp = amplitude_mg * rng.uniform(0.8, 1.2);
    const double gains[3] = {rng.uniform(0.55, 1.0), rng.uniform(0.55, 1.0),
                             rng.uniform(0.55, 1.0)};
    const double harmonic_amp[3] = {1.0, 0.5, 0.25};
    double phase[3][3];
    for (auto& per_axis : phase)
        for (double& p : per_axis) p = rng.uniform(0.0, kTwoPi);

    const double resonance_hz = 26.0 + 1.7 * brand_index;  // 26..34.5
    const double resonance_amp = 0.35 * amp;
    const double resonance_phase[3] = {rng.uniform(0.0, kTwoPi), rng.uniform(0.0, kTwoPi),
                                       rng.uniform(0.0, kTwoPi)};

    const double burst_period = rng.uniform(0.9, 1.7);
    const double burst_duty = rng.uniform(0.6, 0.85);
    const double edge_s = 0.04;
    const double am_hz = rng.uniform(0.5, 2.0);
    const double am_phase = rng.uniform(0.0, kTwoPi);
    const double wobble_phase = rng.uniform(0.0, kTwoPi);

    const std::int64_t len = n1 - n0;
    const double fade_s = 0.02;

    for (std::int64_t i = 0; i < len; ++i) {
        const double t = static_cast<double>(i) / fs;
        // burst gate with raised-cosine edges and a non-zero floor
        const double ph = std::fmod(t, burst_period) / burst_period;
        double gate;
        const double edge = edge_s / burst_period;
        if (ph < burst_duty - edge) gate = 1.0;
        else if (ph < burst_duty) gate = 0.5 * (1.0 + std::cos(std::numbers::pi * (ph - (burst_duty - edge)) / edge));
        else if (ph > 1.0 - edge) gate = 0.5 * (1.0 - std::cos(std::numbers::pi * (ph - (1.0 - edge)) / edge));
        else gate = 0.0;
        gate = 0.12 + 0.88 * gate;
        const double am = 1.0 + 0.2 * std::sin(kTwoPi * am_hz * t + am_phase);
        const double fade = std::min({1.0, t / fade_s, (static_cast<double>(len - 1 - i) / fs) / fade_s});
        const double env = gate * am * std::max(fade, 0.0);

        double v[3];
        for (int ax = 0; ax < 3; ++ax) {
            double s = 0.0;
            for (int h = 0; h < 3; ++h)
                s += harmonic_amp[h] * std::sin(kTwoPi * f0 * (h + 1) * t + phase[ax][h]);
            s = s * amp * gains[ax] + resonance_amp * std::sin(kTwoPi * resonance_hz * t + resonance_phase[ax]);
            v[ax] = s * env + rng.gaussian() * 0.02 * amp;
        }
        a.x[n0 + i] += static_cast<float>(v[0] + 30.0 * std::sin(kTwoPi * 0.25 * t + wobble_phase));
        a.y[n0 + i] += static_cast<float>(v[1]);
        a.z[n0 + i] += static_cast<float>(v[2] + 1000.0 + 40.0 * std::sin(kTwoPi * 0.25 * t + wobble_phase));
    }

    // impacts: short alternating-sign spikes while the burst gate is up
    const double impact_rate = 10.0;  // per second
    double t_next = rng.uniform(0.0, 1.0 / impact_rate);
    while (t_next * fs < static_cast<double>(len)) {
        const auto i0 = static_cast<std::int64_t>(t_next * fs);
        const double ph = std::fmod(t_next, burst_period) / burst_period;
        if (ph < burst_duty) {
            const int spike_len = 4 + static_cast<int>(rng.below(5));
            double spike = amp * rng.uniform(0.5, 1.2);
            const int axis = static_cast<int>(rng.below(3));
            float* dst = axis == 0 ? a.x : axis == 1 ? a.y : a.z;
            for (int s = 0; s < spike_len && i0 + s < len; ++s) {
                dst[n0 + i0 + s] += static_cast<float>(s % 2 == 0 ? spike : -spike);
                spike *= 0.8;
            }
        }
        t_next += -std::log(1.0 - rng.unit()) / impact_rate;
    }
}

// Transportation: one-pole random-walk motion under 5 Hz, slow gravity
// orientation drift, sparse sharp jolts so the motion gate has something to
// see, and a little sensor noise.
void render_transport(Axes a, std::int64_t n0, std::int64_t n1, double fs, Rng& rng) {
    const double pole_hz = 1.3;
    const double rho = std::exp(-kTwoPi * pole_hz / fs);
    const double base_rms = rng.uniform(130.0, 260.0);

    double state[3] = {0.0, 0.0, 0.0};
    double sigma[3];
    for (int ax = 0; ax < 3; ++ax)
        sigma[ax] = base_rms * rng.uniform(0.7, 1.3) * std::sqrt(1.0 - rho * rho);

    const double tilt_amp[3] = {rng.uniform(120.0, 250.0), rng.uniform(120.0, 250.0),
                                rng.uniform(60.0, 140.0)};
    const double tilt_hz = rng.uniform(0.08, 0.38);
    const double tilt_phase[3] = {rng.uniform(0.0, kTwoPi), rng.uniform(0.0, kTwoPi),
                                  rng.uniform(0.0, kTwoPi)};

    const std::int64_t len = n1 - n0;
    const double fade_s = 0.02;
    for (std::int64_t i = 0; i < len; ++i) {
        const double t = static_cast<double>(i) / fs;
        const double fade =
            std::max(0.0, std::min({1.0, t / fade_s, (static_cast<double>(len - 1 - i) / fs) / fade_s}));
        double v[3];
        for (int ax = 0; ax < 3; ++ax) {
            state[ax] = rho * state[ax] + sigma[ax] * rng.gaussian();
            v[ax] = (state[ax] + tilt_amp[ax] * std::sin(kTwoPi * tilt_hz * t + tilt_phase[ax])) * fade +
                    rng.gaussian() * 2.5;
        }
        a.x[n0 + i] += static_cast<float>(v[0]);
        a.y[n0 + i] += static_cast<float>(v[1]);
        a.z[n0 + i] += static_cast<float>(v[2] + 1000.0);
    }

    // jolts: curb hits and hand-offs, 3..8 samples long
    const double jolt_rate = 0.4;
    double t_next = rng.uniform(0.0, 2.0 / jolt_rate);
    while (t_next * fs < static_cast<double>(len)) {
        const auto i0 = static_cast<std::int64_t>(t_next * fs);
        const int spike_len = 3 + static_cast<int>(rng.below(6));
        double spike = rng.uniform(250.0, 500.0) * (rng.below(2) ? 1.0 : -1.0);
        const int axis = static_cast<int>(rng.below(3));
        float* dst = axis == 0 ? a.x : axis == 1 ? a.y : a.z;
        for (int s = 0; s < spike_len && i0 + s < len; ++s) {
            dst[n0 + i0 + s] += static_cast<float>(spike);
            spike *= 0.75;
        }
        t_next += -std::log(1.0 - rng.unit()) / jolt_rate;
    }
}

}  // namespace

SynthConfig default_synth_config() {
    SynthConfig cfg;
    cfg.brands = {
        {"alpha", "grinder", 55.0, 900.0, 120.0, 600.0},
        {"bravo", "drill", 47.0, 850.0, 120.0, 600.0},
        {"charlie", "saw", 64.0, 950.0, 120.0, 600.0},
        {"delta", "grinder", 76.0, 880.0, 120.0, 600.0},
        {"echo", "drill", 85.0, 920.0, 120.0, 600.0},
        {"foxtrot", "saw", 70.0, 860.0, 120.0, 600.0},
    };
    return cfg;
}

std::span<const char* const> usage_activities() { return kUsageActivities; }
std::span<const char* const> transport_activities() { return kTransportActivities; }

std::vector<Recording> synth_generate(const SynthConfig& config, std::uint64_t seed) {
    if (config.source_rate_hz <= 0) throw InvalidArgument("source rate must be positive");
    if (config.mean_segment_s <= 0) throw InvalidArgument("segment length must be positive");

    const double fs = config.source_rate_hz;
    std::vector<Recording> corpus;

    for (std::size_t bi = 0; bi < config.brands.size(); ++bi) {
        const BrandSpec& brand = config.brands[bi];
        if (brand.duration_s <= 0) continue;
        if (brand.fundamental_hz < 40.0 || brand.fundamental_hz > 120.0)
            throw InvalidArgument("brand fundamental must be in [40, 120] Hz");
        if (brand.recording_s <= 0) throw InvalidArgument("recording length must be positive");

        Rng rng(seed, "synth:" + brand.name);
        double remaining = brand.duration_s;
        int rec_index = 0;
        int cls = static_cast<int>(rng.below(2));

        while (remaining > 1e-9) {
            const double rec_s = std::min(remaining, brand.recording_s);
            remaining -= rec_s;
            const auto n = static_cast<std::int64_t>(std::llround(rec_s * fs));
            if (n <= 0) break;

            Recording rec;
            char suffix[16];
            std::snprintf(suffix, sizeof suffix, "-%03d", rec_index++);
            rec.id = brand.name + suffix;
            rec.brand = brand.name;
            rec.family = brand.family;
            rec.activity = "mixed";
            rec.source_rate_hz = fs;
            rec.channels = 3;
            rec.samples.assign(static_cast<std::size_t>(3) * n, 0.0f);
            rec.labels.assign(n, 0);

            Axes axes{rec.samples.data(), rec.samples.data() + n, rec.samples.data() + 2 * n};
            std::int64_t pos = 0;
            while (pos < n) {
                const double seg_s = std::clamp(-config.mean_segment_s * std::log(1.0 - rng.unit()),
                                                2.0, 15.0);
                const std::int64_t seg_end =
                    std::min<std::int64_t>(n, pos + static_cast<std::int64_t>(seg_s * fs));
                if (cls == kUsageClass) {
                    const int activity = static_cast<int>(rng.below(std::size(kUsageActivities)));
                    render_usage(axes, pos, seg_end, fs, rng, brand.fundamental_hz,
                                 brand.amplitude_mg, static_cast<int>(bi), activity);
                    std::fill(rec.labels.begin() + pos, rec.labels.begin() + seg_end,
                              static_cast<std::uint16_t>(kUsageClass));
                } else {
                    (void)rng.below(std::size(kTransportActivities));  // activity, metadata only
                    render_transport(axes, pos, seg_end, fs, rng);
                    std::fill(rec.labels.begin() + pos, rec.labels.begin() + seg_end,
                              static_cast<std::uint16_t>(kTransportationClass));
                }
                cls = 1 - cls;
                pos = seg_end;
            }
            corpus.push_back(std::move(rec));
        }
    }
    return corpus;
}

Recording synth_scenario_signal(std::span<const ScenarioSegment> segments, double rate_hz,
                                double duration_s, std::uint64_t seed) {
    if (rate_hz <= 0) throw InvalidArgument("rate must be positive");
    if (duration_s <= 0) throw InvalidArgument("duration must be positive");

    const auto n = static_cast<std::int64_t>(std::llround(duration_s * rate_hz));
    Recording rec;
    rec.id = "scenario";
    rec.brand = "scenario";
    rec.family = "scenario";
    rec.activity = "scripted";
    rec.source_rate_hz = rate_hz;
    rec.channels = 3;
    rec.samples.assign(static_cast<std::size_t>(3) * n, 0.0f);
    rec.labels.assign(n, static_cast<std::uint16_t>(kTransportationClass));
    // Gravity is always present, even while the device lies still.
    for (std::int64_t i = 0; i < n; ++i) rec.samples[static_cast<std::size_t>(2) * n + i] = 1000.0f;

    Axes axes{rec.samples.data(), rec.samples.data() + n, rec.samples.data() + 2 * n};
    Rng rng(seed, "scenario");

    const auto is_usage = [](const std::string& activity) {
        if (activity == "usage") return true;
        for (const char* name : kUsageActivities)
            if (activity == name) return true;
        return false;
    };
    const auto is_transport = [](const std::string& activity) {
        if (activity == "transportation" || activity == "transport") return true;
        for (const char* name : kTransportActivities)
            if (activity == name) return true;
        return false;
    };

    for (const ScenarioSegment& seg : segments) {
        if (seg.t_end_s <= seg.t_start_s) throw InvalidArgument("scenario segment ends before it starts");
        const auto n0 = std::clamp<std::int64_t>(static_cast<std::int64_t>(seg.t_start_s * rate_hz), 0, n);
        const auto n1 = std::clamp<std::int64_t>(static_cast<std::int64_t>(seg.t_end_s * rate_hz), 0, n);
        if (n1 <= n0) continue;

        if (is_usage(seg.activity)) {
            // The scenario z-axis already carries gravity; render adds
            // another 1000, so subtract it again afterwards.
            render_usage(axes, n0, n1, rate_hz, rng, 55.0, 900.0, 0, 0);
            for (std::int64_t i = n0; i < n1; ++i)
                axes.z[i] -= 1000.0f;
            std::fill(rec.labels.begin() + n0, rec.labels.begin() + n1,
                      static_cast<std::uint16_t>(kUsageClass));
        } else if (is_transport(seg.activity)) {
            render_transport(axes, n0, n1, rate_hz, rng);
            for (std::int64_t i = n0; i < n1; ++i)
                axes.z[i] -= 1000.0f;
        } else if (seg.activity != "none" && seg.activity != "idle" && !seg.activity.empty()) {
            throw InvalidArgument("unknown scenario activity: " + seg.activity);
        }
    }
    return rec;
}

}  // namespace rkl
