#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rocketlite/signal.hpp"
#include "rocketlite/synth.hpp"

namespace rkl {

struct ModelBundle;  // model_io.hpp

struct EnergyProfile {
    double idle_power_uw = 4.7;
    double sample_event_uj = 630.0;       // one 80-sample acquisition
    double inference_event_uj = 72.0;
    double advertisement_event_uj = 67.0;
    double advertisement_period_s = 7.0;
    double battery_efficiency = 0.8;      // self-discharge folded in
    double battery_voltage_v = 3.0;
    double motion_threshold_mg = 64.0;
    double acquisition_rate_hz = 200.0;
    int window_samples = 80;

    void validate() const;  // throws InvalidArgument on nonsense values
};

enum class SimEventKind { Wake, Sample, Infer, Advertise, Drop };

const char* to_string(SimEventKind kind);

struct SimEvent {
    double t_s = 0.0;
    SimEventKind kind = SimEventKind::Wake;
    double energy_uj = 0.0;
    int result = -1;  // class index for Infer/Advertise carrying a result
};

struct SimTrace {
    std::vector<SimEvent> events;
    double duration_s = 0.0;
    double idle_energy_uj = 0.0;
    double event_energy_uj = 0.0;
    int inference_count = 0;
    int dropped_wakes = 0;
    // Cumulative active runtime, counted in whole advertisement periods.
    double runtime_estimate_s = 0.0;
    std::vector<std::string> warnings;

    double total_energy_uj() const { return idle_energy_uj + event_energy_uj; }
    double average_power_uw() const {
        return duration_s > 0 ? total_energy_uj() / duration_s : 0.0;
    }
};

// Consecutive-sample delta threshold detector with one-advertisement-period
// hysteresis. Returns wake timestamps.
std::vector<double> motion_gate(const Recording& rec, double threshold_mg, double hysteresis_s);

// Duty-cycle state machine over a tri-axial signal: sleep, wake on motion,
// acquire one window, L1-norm, classify (when a model is given), broadcast
// the result at the next advertisement tick. At most one inference per
// advertisement period; wakes too close to the end of the signal are dropped
// with a warning.
SimTrace simulate(const Recording& scenario_signal, const ModelBundle* model,
                  const EnergyProfile& profile, double duration_s);

// Scenario-list entry point: renders the segments to a signal first.
SimTrace simulate(std::span<const ScenarioSegment> segments, const ModelBundle* model,
                  const EnergyProfile& profile, double duration_s, std::uint64_t seed);

void export_trace_csv(const SimTrace& trace, const std::string& path);

struct BatteryEstimate {
    double years = 0.0;
    double battery_energy_j = 0.0;
    double baseline_power_uw = 0.0;   // idle + advertising
    double baseline_year_j = 0.0;
    double usage_energy_j = 0.0;      // acquisition + inference over all usage hours
};

// Battery life with a fixed total of active-usage hours to cover. The
// baseline (idle + one advertisement per period) runs for the whole life;
// usage hours add one acquisition + inference per advertisement period while
// active. years = (battery energy - usage energy) / baseline-per-year.
BatteryEstimate battery_life(const EnergyProfile& profile, double capacity_mah,
                             double usage_hours);

// Scenario JSON: list of {t_start_s, t_end_s, activity}.
std::vector<ScenarioSegment> load_scenario_json(const std::string& path);
std::vector<ScenarioSegment> parse_scenario_json(const std::string& text);

// Energy profile JSON: any subset of the EnergyProfile fields by name;
// unlisted fields keep their defaults. Empty text gives the default profile.
EnergyProfile parse_energy_profile_json(const std::string& text);

}  // namespace rkl
