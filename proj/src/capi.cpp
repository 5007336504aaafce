#include "rocketlite.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rocketlite/dataset_io.hpp"
#include "rocketlite/devicesim.hpp"
#include "rocketlite/errors.hpp"
#include "rocketlite/model_io.hpp"
#include "rocketlite/pipeline.hpp"
#include "rocketlite/quantize.hpp"

struct rkl_corpus {
    std::vector<rkl::Recording> recordings;
};

struct rkl_model {
    rkl::ModelBundle bundle;
};

struct rkl_trace {
    rkl::SimTrace trace;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out != nullptr) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

template <typename Fn>
rkl_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return RKL_OK;
    } catch (const rkl::InvalidArgument& e) {
        g_last_error = e.what();
        return RKL_ERR_INVALID_ARGUMENT;
    } catch (const rkl::IoError& e) {
        g_last_error = e.what();
        return RKL_ERR_IO;
    } catch (const rkl::CorruptData& e) {
        g_last_error = e.what();
        return RKL_ERR_CORRUPT;
    } catch (const rkl::NumericError& e) {
        g_last_error = e.what();
        return RKL_ERR_NUMERIC;
    } catch (const rkl::StateError& e) {
        g_last_error = e.what();
        return RKL_ERR_STATE;
    } catch (const rkl::Unsupported& e) {
        g_last_error = e.what();
        return RKL_ERR_UNSUPPORTED;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return RKL_ERR_UNKNOWN;
    }
}

rkl_status require(bool ok, const char* what) {
    if (ok) return RKL_OK;
    g_last_error = std::string("null argument: ") + what;
    return RKL_ERR_INVALID_ARGUMENT;
}

std::string text_or_empty(const char* s) { return s == nullptr ? std::string() : std::string(s); }

// Windows the corpus with the configuration stored in the bundle; the test
// split when the corpus has held-out brands, the validation split otherwise.
std::pair<std::vector<rkl::Window>, std::string> eval_windows(const rkl::ModelBundle& bundle,
                                                              const rkl_corpus* corpus,
                                                              std::uint64_t seed) {
    rkl::RunConfig cfg = rkl::parse_run_config(bundle.config_text);
    if (seed != 0) cfg.seed = seed;
    rkl::DatasetSplit split = rkl::prepare_dataset(corpus->recordings, cfg);
    if (!split.test.empty()) return {std::move(split.test), "test"};
    return {std::move(split.validation), "validation"};
}

}  // namespace

extern "C" {

const char* rkl_version(void) { return "0.1.0"; }

const char* rkl_last_error(void) { return g_last_error.c_str(); }

void rkl_string_free(char* s) { std::free(s); }

rkl_status rkl_corpus_generate(const char* config_text, uint64_t seed, rkl_corpus** out) {
    if (auto st = require(out != nullptr, "out")) return st;
    return guarded([&] {
        const rkl::SynthConfig cfg = rkl::parse_synth_config(text_or_empty(config_text));
        auto corpus = std::make_unique<rkl_corpus>();
        corpus->recordings = rkl::synth_generate(cfg, seed);
        *out = corpus.release();
    });
}

rkl_status rkl_corpus_load_dir(const char* dir, rkl_corpus** out) {
    if (auto st = require(dir != nullptr, "dir")) return st;
    if (auto st = require(out != nullptr, "out")) return st;
    return guarded([&] {
        auto corpus = std::make_unique<rkl_corpus>();
        corpus->recordings = rkl::load_corpus_dir(dir);
        *out = corpus.release();
    });
}

rkl_status rkl_corpus_save_dir(const rkl_corpus* corpus, const char* dir) {
    if (auto st = require(corpus != nullptr, "corpus")) return st;
    if (auto st = require(dir != nullptr, "dir")) return st;
    return guarded([&] { rkl::save_corpus_dir(corpus->recordings, dir); });
}

rkl_status rkl_corpus_info_json(const rkl_corpus* corpus, char** out_json) {
    if (auto st = require(corpus != nullptr, "corpus")) return st;
    if (auto st = require(out_json != nullptr, "out_json")) return st;
    return guarded([&] {
        nlohmann::json doc;
        doc["recording_count"] = corpus->recordings.size();
        double total_s = 0.0;
        auto recs = nlohmann::json::array();
        for (const rkl::Recording& rec : corpus->recordings) {
            const double dur = rec.source_rate_hz > 0
                                   ? static_cast<double>(rec.sample_count()) / rec.source_rate_hz
                                   : 0.0;
            total_s += dur;
            std::size_t usage = 0;
            for (auto lab : rec.labels) usage += lab == rkl::kUsageClass;
            nlohmann::json r;
            r["id"] = rec.id;
            r["brand"] = rec.brand;
            r["family"] = rec.family;
            r["rate_hz"] = rec.source_rate_hz;
            r["duration_s"] = dur;
            r["usage_fraction"] =
                rec.labels.empty() ? 0.0
                                   : static_cast<double>(usage) / static_cast<double>(rec.labels.size());
            recs.push_back(std::move(r));
        }
        doc["total_duration_s"] = total_s;
        doc["recordings"] = std::move(recs);
        *out_json = dup_string(doc.dump(2));
    });
}

void rkl_corpus_free(rkl_corpus* corpus) { delete corpus; }

rkl_status rkl_train(const rkl_corpus* corpus, const char* config_text, rkl_model** out_model,
                     char** out_report_json) {
    if (auto st = require(corpus != nullptr, "corpus")) return st;
    if (auto st = require(out_model != nullptr, "out_model")) return st;
    return guarded([&] {
        const rkl::RunConfig cfg = rkl::parse_run_config(text_or_empty(config_text));
        rkl::TrainResult trained = rkl::train_model(corpus->recordings, cfg);

        auto model = std::make_unique<rkl_model>();
        model->bundle = std::move(trained.bundle);

        if (out_report_json != nullptr) {
            nlohmann::json doc;
            doc["val_accuracy"] = trained.val_accuracy;
            doc["val_f1"] = trained.val_f1;
            doc["train_windows"] = trained.train_window_count;
            doc["val_windows"] = trained.val_window_count;
            doc["lambda"] = model->bundle.classifier.lambda;
            doc["warnings"] = trained.warnings;
            *out_report_json = dup_string(doc.dump(2));
        }
        *out_model = model.release();
    });
}

rkl_status rkl_model_save(const rkl_model* model, const char* path) {
    if (auto st = require(model != nullptr, "model")) return st;
    if (auto st = require(path != nullptr, "path")) return st;
    return guarded([&] { rkl::save_bundle(model->bundle, path); });
}

rkl_status rkl_model_load(const char* path, rkl_model** out) {
    if (auto st = require(path != nullptr, "path")) return st;
    if (auto st = require(out != nullptr, "out")) return st;
    return guarded([&] {
        auto model = std::make_unique<rkl_model>();
        model->bundle = rkl::load_bundle(path);
        *out = model.release();
    });
}

rkl_status rkl_model_quantize(rkl_model* model, int32_t input_clamp_mg, int bit_width) {
    if (auto st = require(model != nullptr, "model")) return st;
    return guarded([&] {
        rkl::ModelBundle& b = model->bundle;
        b.qmodel = rkl::quantize_model(
            b.kernels, b.classifier,
            rkl::calibrate(b.kernels, b.classifier, input_clamp_mg, bit_width));
        b.quantized = true;
    });
}

rkl_status rkl_model_info_json(const rkl_model* model, char** out_json) {
    if (auto st = require(model != nullptr, "model")) return st;
    if (auto st = require(out_json != nullptr, "out_json")) return st;
    return guarded([&] {
        const rkl::ModelBundle& b = model->bundle;
        char digest[24];
        std::snprintf(digest, sizeof digest, "%016llx",
                      static_cast<unsigned long long>(b.config_digest));
        nlohmann::json doc;
        doc["version"] = b.version;
        doc["window_len"] = b.kernels.window_length;
        doc["channels"] = b.kernels.channel_count;
        doc["feature_count"] = b.kernels.feature_count;
        doc["dilations"] = b.kernels.dilations;
        doc["class_labels"] = b.classifier.class_labels;
        doc["lambda"] = b.classifier.lambda;
        doc["config_digest"] = digest;
        doc["quantized"] = b.quantized;
        if (b.quantized) {
            doc["bit_width"] = b.qmodel.calibration.bit_width;
            doc["s1"] = b.qmodel.calibration.s1;
            doc["s2"] = b.qmodel.calibration.s2;
            doc["input_clamp_mg"] = b.qmodel.calibration.input_clamp_mg;
        }
        *out_json = dup_string(doc.dump(2));
    });
}

rkl_status rkl_model_export_arrays(const rkl_model* model, char** out_source) {
    if (auto st = require(model != nullptr, "model")) return st;
    if (auto st = require(out_source != nullptr, "out_source")) return st;
    return guarded([&] { *out_source = dup_string(rkl::export_static_arrays(model->bundle)); });
}

rkl_status rkl_model_memory_json(const rkl_model* model, char** out_json) {
    if (auto st = require(model != nullptr, "model")) return st;
    if (auto st = require(out_json != nullptr, "out_json")) return st;
    return guarded([&] {
        const rkl::MemoryReport rep = rkl::estimate_memory(model->bundle);
        nlohmann::json doc;
        doc["parameter_bytes"] = rep.parameter_bytes;
        doc["working_buffer_bytes"] = rep.working_buffer_bytes;
        doc["parameter_breakdown"] = rep.parameter_breakdown;
        doc["working_breakdown"] = rep.working_breakdown;
        *out_json = dup_string(doc.dump(2));
    });
}

rkl_status rkl_model_predict(const rkl_model* model, const float* samples, int32_t channels,
                             int32_t length, int use_quantized, int32_t* out_class) {
    if (auto st = require(model != nullptr, "model")) return st;
    if (auto st = require(samples != nullptr, "samples")) return st;
    if (auto st = require(out_class != nullptr, "out_class")) return st;
    return guarded([&] {
        if (channels < 1 || length < 1) throw rkl::InvalidArgument("bad window shape");
        rkl::Window win;
        win.channels = channels;
        win.length = length;
        win.samples.assign(samples, samples + static_cast<std::size_t>(channels) * length);

        // A tri-axial caller against a single-channel model gets the same
        // L1-norm fusion the training pipeline applies.
        if (channels == 3 && model->bundle.kernels.channel_count == 1) {
            std::vector<float> fused(length);
            for (int i = 0; i < length; ++i)
                fused[i] = std::abs(win.samples[i]) + std::abs(win.samples[length + i]) +
                           std::abs(win.samples[2 * static_cast<std::size_t>(length) + i]);
            win.samples = std::move(fused);
            win.channels = 1;
        }

        const rkl::ModelBundle& b = model->bundle;
        if (use_quantized != 0) {
            if (!b.quantized) throw rkl::StateError("model is not quantized");
            const rkl::FeatureVector fv = rkl::transform_q(win, b.kernels, b.qmodel);
            *out_class = rkl::predict_q(fv, b.kernels, b.qmodel).class_index;
        } else {
            const rkl::FeatureVector fv = rkl::transform(win, b.kernels);
            *out_class = rkl::predict_float(fv, b.classifier).class_index;
        }
    });
}

void rkl_model_free(rkl_model* model) { delete model; }

rkl_status rkl_eval(const rkl_model* model, const rkl_corpus* corpus, uint64_t seed,
                    char** out_json) {
    if (auto st = require(model != nullptr, "model")) return st;
    if (auto st = require(corpus != nullptr, "corpus")) return st;
    if (auto st = require(out_json != nullptr, "out_json")) return st;
    return guarded([&] {
        auto [windows, split_name] = eval_windows(model->bundle, corpus, seed);
        const rkl::EvalResult res = rkl::evaluate(model->bundle, windows);
        nlohmann::json doc;
        doc["split"] = split_name;
        doc["window_count"] = res.window_count;
        doc["accuracy_float"] = res.accuracy_float;
        doc["f1_float"] = res.f1_float;
        doc["accuracy_quant"] = res.accuracy_quant;
        doc["f1_quant"] = res.f1_quant;
        doc["agreement"] = res.agreement;
        doc["disagreements"] = res.disagreements;
        *out_json = dup_string(doc.dump(2));
    });
}

rkl_status rkl_golden_emit(const rkl_model* model, const rkl_corpus* corpus, uint64_t seed,
                           int32_t count, const char* path) {
    if (auto st = require(model != nullptr, "model")) return st;
    if (auto st = require(corpus != nullptr, "corpus")) return st;
    if (auto st = require(path != nullptr, "path")) return st;
    return guarded([&] {
        if (count < 1) throw rkl::InvalidArgument("count must be positive");
        auto [windows, split_name] = eval_windows(model->bundle, corpus, seed);
        if (windows.empty()) throw rkl::InvalidArgument("no windows available for golden vectors");
        if (static_cast<std::size_t>(count) < windows.size()) windows.resize(count);
        rkl::emit_golden_vectors(model->bundle, windows, path);
    });
}

rkl_status rkl_golden_replay(const rkl_model* model, const char* path, char** out_json) {
    if (auto st = require(model != nullptr, "model")) return st;
    if (auto st = require(path != nullptr, "path")) return st;
    if (auto st = require(out_json != nullptr, "out_json")) return st;
    return guarded([&] {
        const rkl::GoldenReplayReport rep = rkl::replay_golden_vectors(model->bundle, path);
        nlohmann::json doc;
        doc["total"] = rep.total;
        doc["mismatches"] = rep.mismatches;
        *out_json = dup_string(doc.dump(2));
    });
}

rkl_status rkl_hyperscan(const rkl_corpus* corpus, const char* config_text, char** out_csv) {
    if (auto st = require(corpus != nullptr, "corpus")) return st;
    if (auto st = require(out_csv != nullptr, "out_csv")) return st;
    return guarded([&] {
        const std::string text = text_or_empty(config_text);
        const rkl::RunConfig base = rkl::parse_run_config(text);
        const rkl::HyperscanGrid grid = rkl::parse_hyperscan_grid(text);
        const auto points = rkl::hyperscan(corpus->recordings, grid, base);
        *out_csv = dup_string(rkl::hyperscan_csv(points));
    });
}

rkl_status rkl_simulate(const char* scenario_json, const rkl_model* model,
                        const char* profile_json, double duration_s, uint64_t seed,
                        rkl_trace** out) {
    if (auto st = require(scenario_json != nullptr, "scenario_json")) return st;
    if (auto st = require(out != nullptr, "out")) return st;
    return guarded([&] {
        const auto segments = rkl::parse_scenario_json(scenario_json);
        const rkl::EnergyProfile profile =
            rkl::parse_energy_profile_json(text_or_empty(profile_json));
        auto trace = std::make_unique<rkl_trace>();
        trace->trace = rkl::simulate(segments, model != nullptr ? &model->bundle : nullptr,
                                     profile, duration_s, seed);
        *out = trace.release();
    });
}

rkl_status rkl_trace_summary_json(const rkl_trace* trace, char** out_json) {
    if (auto st = require(trace != nullptr, "trace")) return st;
    if (auto st = require(out_json != nullptr, "out_json")) return st;
    return guarded([&] {
        const rkl::SimTrace& t = trace->trace;
        int wakes = 0, advertisements = 0;
        for (const rkl::SimEvent& e : t.events) {
            wakes += e.kind == rkl::SimEventKind::Wake;
            advertisements += e.kind == rkl::SimEventKind::Advertise;
        }
        nlohmann::json doc;
        doc["duration_s"] = t.duration_s;
        doc["total_energy_uj"] = t.total_energy_uj();
        doc["average_power_uw"] = t.average_power_uw();
        doc["idle_energy_uj"] = t.idle_energy_uj;
        doc["event_energy_uj"] = t.event_energy_uj;
        doc["wake_count"] = wakes;
        doc["advertisement_count"] = advertisements;
        doc["inference_count"] = t.inference_count;
        doc["dropped_wakes"] = t.dropped_wakes;
        doc["runtime_estimate_s"] = t.runtime_estimate_s;
        doc["warnings"] = t.warnings;
        *out_json = dup_string(doc.dump(2));
    });
}

rkl_status rkl_trace_export_csv(const rkl_trace* trace, const char* path) {
    if (auto st = require(trace != nullptr, "trace")) return st;
    if (auto st = require(path != nullptr, "path")) return st;
    return guarded([&] { rkl::export_trace_csv(trace->trace, path); });
}

void rkl_trace_free(rkl_trace* trace) { delete trace; }

rkl_status rkl_battery_life(const char* profile_json, double capacity_mah, double usage_hours,
                            char** out_json) {
    if (auto st = require(out_json != nullptr, "out_json")) return st;
    return guarded([&] {
        const rkl::EnergyProfile profile =
            rkl::parse_energy_profile_json(text_or_empty(profile_json));
        const rkl::BatteryEstimate est = rkl::battery_life(profile, capacity_mah, usage_hours);
        nlohmann::json doc;
        doc["years"] = est.years;
        doc["battery_energy_j"] = est.battery_energy_j;
        doc["baseline_power_uw"] = est.baseline_power_uw;
        doc["baseline_year_j"] = est.baseline_year_j;
        doc["usage_energy_j"] = est.usage_energy_j;
        *out_json = dup_string(doc.dump(2));
    });
}

}  // extern "C"
