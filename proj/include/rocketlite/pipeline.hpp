#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rocketlite/model_io.hpp"
#include "rocketlite/signal.hpp"
#include "rocketlite/synth.hpp"

namespace rkl {

// End-to-end training/evaluation configuration. Parsed from a TOML-like
// key = value file; unknown keys are rejected.
struct RunConfig {
    double sampling_rate_hz = 200.0;  // [10, 3200]
    int window_len = 80;              // [5, 200]
    int feature_count = 84;           // multiple of 84 in [84, 336]
    std::uint64_t seed = 1;
    std::vector<double> lambda_grid = {1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0, 1000.0};
    std::int32_t input_clamp_mg = 16000;
    int bit_width = 32;
    int train_windows = 2000;
    int val_windows = 400;
    std::string train_brand = "alpha";
    int fir_taps = 101;

    void validate() const;           // throws InvalidArgument
    std::string canonical_text() const;  // stable serialization, digested into bundles
};

RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);

// Generator options in the same config file, under [gen].
SynthConfig parse_synth_config(const std::string& text);

// resample -> l1_norm -> brand-held-out windowing, per the config.
DatasetSplit prepare_dataset(std::span<const Recording> corpus, const RunConfig& config);

struct TrainResult {
    ModelBundle bundle;
    double val_accuracy = 0.0;
    double val_f1 = 0.0;  // binary F1 on the usage class
    int train_window_count = 0;
    int val_window_count = 0;
    std::vector<std::string> warnings;
};

TrainResult train_model(std::span<const Recording> corpus, const RunConfig& config);

struct EvalResult {
    int window_count = 0;
    double accuracy_float = 0.0;
    double f1_float = 0.0;
    double accuracy_quant = 0.0;  // NaN when the bundle is not quantized
    double f1_quant = 0.0;
    double agreement = 0.0;
    int disagreements = 0;
};

// Evaluates the float path, and the quantized path too when present.
EvalResult evaluate(const ModelBundle& bundle, std::span<const Window> windows);

struct HyperscanPoint {
    double sampling_rate_hz = 0.0;
    int window_len = 0;
    int feature_count = 0;
    double val_f1 = 0.0;
    double val_accuracy = 0.0;
    std::int64_t parameter_bytes = 0;
    std::int64_t ops_per_inference = 0;  // transform MACs + classifier MACs
};

struct HyperscanGrid {
    std::vector<double> sampling_rates_hz = {10, 50, 100, 200, 400};
    std::vector<int> feature_counts = {84};
    int train_windows = 2000;
    int val_windows = 400;
    // window_len derived per rate: clamp(round(window_seconds * rate), 9, 200)
    double window_seconds = 0.4;
};

HyperscanGrid parse_hyperscan_grid(const std::string& text);  // [scan] section

std::vector<HyperscanPoint> hyperscan(std::span<const Recording> corpus,
                                      const HyperscanGrid& grid, const RunConfig& base);

std::string hyperscan_csv(std::span<const HyperscanPoint> points);

}  // namespace rkl
