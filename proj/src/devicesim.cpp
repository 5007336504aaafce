#include "rocketlite/devicesim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <set>

#include <json.hpp>

#include "rocketlite/detail/binio.hpp"
#include "rocketlite/errors.hpp"
#include "rocketlite/model_io.hpp"

namespace rkl {

void EnergyProfile::validate() const {
    if (idle_power_uw < 0 || sample_event_uj < 0 || inference_event_uj < 0 ||
        advertisement_event_uj < 0)
        throw InvalidArgument("energy figures must be non-negative");
    if (advertisement_period_s <= 0) throw InvalidArgument("advertisement period must be positive");
    if (battery_efficiency <= 0 || battery_efficiency > 1)
        throw InvalidArgument("battery efficiency must be in (0, 1]");
    if (battery_voltage_v <= 0) throw InvalidArgument("battery voltage must be positive");
    if (motion_threshold_mg <= 0) throw InvalidArgument("motion threshold must be positive");
    if (acquisition_rate_hz <= 0) throw InvalidArgument("acquisition rate must be positive");
    if (window_samples < 1) throw InvalidArgument("window sample count must be positive");
}

const char* to_string(SimEventKind kind) {
    switch (kind) {
        case SimEventKind::Wake: return "wake";
        case SimEventKind::Sample: return "sample";
        case SimEventKind::Infer: return "infer";
        case SimEventKind::Advertise: return "advertise";
        case SimEventKind::Drop: return "drop";
    }
    return "?";
}

namespace {

// Wake sample indices: any-axis consecutive delta above threshold, then
// suppressed for hysteresis_s.
std::vector<std::int64_t> wake_indices(const Recording& rec, double threshold_mg,
                                       double hysteresis_s) {
    const std::int64_t n = rec.sample_count();
    const auto hold = static_cast<std::int64_t>(std::ceil(hysteresis_s * rec.source_rate_hz));
    std::vector<std::int64_t> wakes;
    std::int64_t next_allowed = 1;
    for (std::int64_t i = 1; i < n; ++i) {
        if (i < next_allowed) continue;
        bool trip = false;
        for (int c = 0; c < rec.channels && !trip; ++c)
            trip = std::abs(rec.at(c, i) - rec.at(c, i - 1)) > threshold_mg;
        if (trip) {
            wakes.push_back(i);
            next_allowed = i + hold;
        }
    }
    return wakes;
}

}  // namespace

std::vector<double> motion_gate(const Recording& rec, double threshold_mg, double hysteresis_s) {
    if (threshold_mg <= 0) throw InvalidArgument("motion threshold must be positive");
    if (hysteresis_s < 0) throw InvalidArgument("hysteresis must be non-negative");
    std::vector<double> times;
    for (std::int64_t i : wake_indices(rec, threshold_mg, hysteresis_s))
        times.push_back(static_cast<double>(i) / rec.source_rate_hz);
    return times;
}

SimTrace simulate(const Recording& scenario_signal, const ModelBundle* model,
                  const EnergyProfile& profile, double duration_s) {
    profile.validate();
    if (scenario_signal.sample_count() < 2) throw InvalidArgument("scenario signal too short");

    Recording device_view = scenario_signal;
    if (std::abs(device_view.source_rate_hz - profile.acquisition_rate_hz) >
        1e-9 * profile.acquisition_rate_hz)
        device_view = resample(device_view, profile.acquisition_rate_hz);

    const double fs = device_view.source_rate_hz;
    const double signal_end_s = static_cast<double>(device_view.sample_count()) / fs;
    if (duration_s <= 0) duration_s = signal_end_s;

    const bool univariate_model = model != nullptr && model->kernels.channel_count == 1;
    Recording classified_view;
    if (model != nullptr) {
        if (model->kernels.window_length != profile.window_samples)
            throw InvalidArgument("profile window length does not match the model");
        classified_view = univariate_model && device_view.channels == 3 ? l1_norm(device_view)
                                                                        : device_view;
        if (classified_view.channels != model->kernels.channel_count)
            throw InvalidArgument("channel count mismatch between signal and model");
    }

    SimTrace trace;
    trace.duration_s = duration_s;
    trace.idle_energy_uj = profile.idle_power_uw * duration_s;

    const double window_s = profile.window_samples / fs;
    const double horizon = std::min(duration_s, signal_end_s);
    std::deque<std::pair<double, int>> pending;  // (ready time, class index)
    std::set<std::int64_t> active_periods;
    char msg[128];

    for (std::int64_t i :
         wake_indices(device_view, profile.motion_threshold_mg, profile.advertisement_period_s)) {
        const double t_w = static_cast<double>(i) / fs;
        if (t_w >= duration_s) break;
        trace.events.push_back({t_w, SimEventKind::Wake, 0.0, -1});

        if (t_w + window_s > horizon) {
            trace.events.push_back({t_w, SimEventKind::Drop, 0.0, -1});
            ++trace.dropped_wakes;
            std::snprintf(msg, sizeof msg,
                          "wake at %.2f s dropped: signal ends before the window completes", t_w);
            trace.warnings.push_back(msg);
            continue;
        }

        trace.events.push_back({t_w, SimEventKind::Sample, profile.sample_event_uj, -1});
        int result = -1;
        if (model != nullptr) {
            Window win;
            win.channels = classified_view.channels;
            win.length = profile.window_samples;
            win.sample_rate_hz = fs;
            win.samples.resize(static_cast<std::size_t>(win.channels) * win.length);
            for (int c = 0; c < win.channels; ++c)
                for (int j = 0; j < win.length; ++j)
                    win.samples[static_cast<std::size_t>(c) * win.length + j] =
                        classified_view.at(c, i + j);
            if (model->quantized) {
                const FeatureVector fv = transform_q(win, model->kernels, model->qmodel);
                result = predict_q(fv, model->kernels, model->qmodel).class_index;
            } else {
                const FeatureVector fv = transform(win, model->kernels);
                result = predict_float(fv, model->classifier).class_index;
            }
        }
        const double t_done = t_w + window_s;
        trace.events.push_back({t_done, SimEventKind::Infer, profile.inference_event_uj, result});
        ++trace.inference_count;
        pending.emplace_back(t_done, result);
        active_periods.insert(static_cast<std::int64_t>(t_done / profile.advertisement_period_s));
    }

    const auto tick_count =
        static_cast<std::int64_t>(std::floor(duration_s / profile.advertisement_period_s + 1e-9));
    for (std::int64_t k = 1; k <= tick_count; ++k) {
        const double t_a = static_cast<double>(k) * profile.advertisement_period_s;
        int result = -1;
        if (!pending.empty() && pending.front().first <= t_a) {
            result = pending.front().second;
            pending.pop_front();
        }
        trace.events.push_back({t_a, SimEventKind::Advertise, profile.advertisement_event_uj, result});
    }

    std::stable_sort(trace.events.begin(), trace.events.end(),
                     [](const SimEvent& a, const SimEvent& b) { return a.t_s < b.t_s; });
    for (const SimEvent& e : trace.events) trace.event_energy_uj += e.energy_uj;
    trace.runtime_estimate_s =
        static_cast<double>(active_periods.size()) * profile.advertisement_period_s;
    return trace;
}

SimTrace simulate(std::span<const ScenarioSegment> segments, const ModelBundle* model,
                  const EnergyProfile& profile, double duration_s, std::uint64_t seed) {
    profile.validate();
    if (duration_s <= 0) {
        for (const ScenarioSegment& seg : segments) duration_s = std::max(duration_s, seg.t_end_s);
        if (duration_s <= 0) throw InvalidArgument("scenario duration must be positive");
    }
    const Recording sig =
        synth_scenario_signal(segments, profile.acquisition_rate_hz, duration_s, seed);
    return simulate(sig, model, profile, duration_s);
}

void export_trace_csv(const SimTrace& trace, const std::string& path) {
    std::string text = "t_s,event,energy_uJ,cum_uJ,result\n";
    const double idle_rate =
        trace.duration_s > 0 ? trace.idle_energy_uj / trace.duration_s : 0.0;
    double event_cum = 0.0;
    char line[160];
    for (const SimEvent& e : trace.events) {
        event_cum += e.energy_uj;
        const double cum = idle_rate * e.t_s + event_cum;
        if (e.result >= 0)
            std::snprintf(line, sizeof line, "%.4f,%s,%.3f,%.3f,%d\n", e.t_s, to_string(e.kind),
                          e.energy_uj, cum, e.result);
        else
            std::snprintf(line, sizeof line, "%.4f,%s,%.3f,%.3f,\n", e.t_s, to_string(e.kind),
                          e.energy_uj, cum);
        text += line;
    }
    detail::write_text_file(path, text);
}

BatteryEstimate battery_life(const EnergyProfile& profile, double capacity_mah,
                             double usage_hours) {
    profile.validate();
    if (capacity_mah <= 0) throw InvalidArgument("battery capacity must be positive");
    if (usage_hours < 0) throw InvalidArgument("usage hours must be non-negative");

    BatteryEstimate est;
    est.battery_energy_j =
        capacity_mah / 1000.0 * profile.battery_voltage_v * 3600.0 * profile.battery_efficiency;
    est.baseline_power_uw =
        profile.idle_power_uw + profile.advertisement_event_uj / profile.advertisement_period_s;
    est.baseline_year_j = est.baseline_power_uw * 1e-6 * 3600.0 * 24.0 * 365.25;

    const double usage_uj_per_hour = (profile.sample_event_uj + profile.inference_event_uj) *
                                     3600.0 / profile.advertisement_period_s;
    est.usage_energy_j = usage_hours * usage_uj_per_hour * 1e-6;
    est.years = std::max(0.0, (est.battery_energy_j - est.usage_energy_j) / est.baseline_year_j);
    return est;
}

std::vector<ScenarioSegment> parse_scenario_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw CorruptData(std::string("bad scenario json: ") + e.what());
    }
    const nlohmann::json* list = &doc;
    if (doc.is_object()) {
        if (!doc.contains("segments")) throw CorruptData("bad scenario json: missing segments");
        list = &doc["segments"];
    }
    if (!list->is_array()) throw CorruptData("bad scenario json: expected an array");

    std::vector<ScenarioSegment> segments;
    for (const auto& item : *list) {
        if (!item.is_object() || !item.contains("t_start_s") || !item.contains("t_end_s") ||
            !item.contains("activity"))
            throw CorruptData("bad scenario json: segment needs t_start_s, t_end_s, activity");
        ScenarioSegment seg;
        seg.t_start_s = item["t_start_s"].get<double>();
        seg.t_end_s = item["t_end_s"].get<double>();
        seg.activity = item["activity"].get<std::string>();
        segments.push_back(std::move(seg));
    }
    return segments;
}

std::vector<ScenarioSegment> load_scenario_json(const std::string& path) {
    return parse_scenario_json(detail::read_text_file(path));
}

EnergyProfile parse_energy_profile_json(const std::string& text) {
    EnergyProfile profile;
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) return profile;

    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw CorruptData(std::string("bad profile json: ") + e.what());
    }
    if (!doc.is_object()) throw CorruptData("bad profile json: expected an object");

    for (const auto& [key, value] : doc.items()) {
        if (key == "idle_power_uw") profile.idle_power_uw = value.get<double>();
        else if (key == "sample_event_uj") profile.sample_event_uj = value.get<double>();
        else if (key == "inference_event_uj") profile.inference_event_uj = value.get<double>();
        else if (key == "advertisement_event_uj") profile.advertisement_event_uj = value.get<double>();
        else if (key == "advertisement_period_s") profile.advertisement_period_s = value.get<double>();
        else if (key == "battery_efficiency") profile.battery_efficiency = value.get<double>();
        else if (key == "battery_voltage_v") profile.battery_voltage_v = value.get<double>();
        else if (key == "motion_threshold_mg") profile.motion_threshold_mg = value.get<double>();
        else if (key == "acquisition_rate_hz") profile.acquisition_rate_hz = value.get<double>();
        else if (key == "window_samples") profile.window_samples = value.get<int>();
        else throw InvalidArgument("unknown profile key: " + key);
    }
    profile.validate();
    return profile;
}

}  // namespace rkl
