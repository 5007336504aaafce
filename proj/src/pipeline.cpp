#include "rocketlite/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

#include "rocketlite/crc64.hpp"
#include "rocketlite/detail/binio.hpp"
#include "rocketlite/errors.hpp"
#include "rocketlite/metrics.hpp"
#include "rocketlite/quantize.hpp"

namespace rkl {

void RunConfig::validate() const {
    if (sampling_rate_hz < 10.0 || sampling_rate_hz > 3200.0)
        throw InvalidArgument("sampling rate must be in [10, 3200] Hz");
    if (window_len < 5 || window_len > 200)
        throw InvalidArgument("window length must be in [5, 200]");
    if (feature_count < 84 || feature_count > 336 || feature_count % 84 != 0)
        throw InvalidArgument("feature count must be a multiple of 84 in [84, 336]");
    if (fir_taps < 11 || fir_taps % 2 == 0)
        throw InvalidArgument("fir taps must be odd and >= 11");
    if (bit_width < 8 || bit_width > 64) throw InvalidArgument("bit width must be in [8, 64]");
    if (input_clamp_mg <= 0) throw InvalidArgument("input clamp must be positive");
    if (train_windows < 2 || train_windows % 2 != 0 || val_windows < 2 || val_windows % 2 != 0)
        throw InvalidArgument("window counts must be positive and even");
    if (train_brand.empty()) throw InvalidArgument("train brand must not be empty");
    if (lambda_grid.empty()) throw InvalidArgument("lambda grid must not be empty");
}

std::string RunConfig::canonical_text() const {
    char buf[64];
    const auto g = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    std::string text;
    text += "sampling_rate_hz = " + g(sampling_rate_hz) + "\n";
    text += "window_len = " + std::to_string(window_len) + "\n";
    text += "feature_count = " + std::to_string(feature_count) + "\n";
    text += "seed = " + std::to_string(seed) + "\n";
    text += "lambda_grid = ";
    for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
        if (i) text += ", ";
        text += g(lambda_grid[i]);
    }
    text += "\n";
    text += "input_clamp_mg = " + std::to_string(input_clamp_mg) + "\n";
    text += "bit_width = " + std::to_string(bit_width) + "\n";
    text += "train_windows = " + std::to_string(train_windows) + "\n";
    text += "val_windows = " + std::to_string(val_windows) + "\n";
    text += "train_brand = \"" + train_brand + "\"\n";
    text += "fir_taps = " + std::to_string(fir_taps) + "\n";
    return text;
}

namespace {

struct ConfigEntry {
    std::string section;
    std::string key;
    std::string value;
    int line = 0;
};

std::string trim(std::string s) {
    const auto begin = s.find_first_not_of(" \t\r");
    const auto end = s.find_last_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    return s.substr(begin, end - begin + 1);
}

std::vector<ConfigEntry> parse_entries(const std::string& text) {
    std::vector<ConfigEntry> entries;
    std::string section;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string line = text.substr(pos, nl == std::string::npos ? nl : nl - pos);
        pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        // strip comments, respecting quoted strings
        bool in_quote = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') in_quote = !in_quote;
            else if (line[i] == '#' && !in_quote) {
                line.resize(i);
                break;
            }
        }
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                throw InvalidArgument("bad config line " + std::to_string(line_no) + ": " + line);
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidArgument("bad config line " + std::to_string(line_no) + ": " + line);
        ConfigEntry e;
        e.section = section;
        e.key = trim(line.substr(0, eq));
        e.value = trim(line.substr(eq + 1));
        e.line = line_no;
        if (e.key.empty() || e.value.empty())
            throw InvalidArgument("bad config line " + std::to_string(line_no) + ": " + line);
        entries.push_back(std::move(e));
    }
    return entries;
}

double to_double(const ConfigEntry& e) {
    char* end = nullptr;
    const double v = std::strtod(e.value.c_str(), &end);
    if (end != e.value.c_str() + e.value.size())
        throw InvalidArgument("bad number for " + e.key + ": " + e.value);
    return v;
}

long long to_int(const ConfigEntry& e) {
    const double v = to_double(e);
    if (v != std::floor(v)) throw InvalidArgument("expected an integer for " + e.key);
    return static_cast<long long>(v);
}

std::string unquote(const ConfigEntry& e) {
    std::string v = e.value;
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') v = v.substr(1, v.size() - 2);
    return v;
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (pos <= value.size()) {
        const auto comma = value.find(',', pos);
        parts.push_back(trim(value.substr(pos, comma == std::string::npos ? comma : comma - pos)));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return parts;
}

std::vector<double> to_double_list(const ConfigEntry& e) {
    std::vector<double> values;
    for (const std::string& part : split_list(e.value)) {
        ConfigEntry item{e.section, e.key, part, e.line};
        values.push_back(to_double(item));
    }
    return values;
}

}  // namespace

RunConfig parse_run_config(const std::string& text) {
    RunConfig cfg;
    for (const ConfigEntry& e : parse_entries(text)) {
        if (e.section == "gen" || e.section == "scan") continue;  // sibling parsers
        if (!e.section.empty() && e.section != "run")
            throw InvalidArgument("unknown config section: " + e.section);
        if (e.key == "sampling_rate_hz") cfg.sampling_rate_hz = to_double(e);
        else if (e.key == "window_len") cfg.window_len = static_cast<int>(to_int(e));
        else if (e.key == "feature_count") cfg.feature_count = static_cast<int>(to_int(e));
        else if (e.key == "seed") cfg.seed = static_cast<std::uint64_t>(to_int(e));
        else if (e.key == "lambda_grid") cfg.lambda_grid = to_double_list(e);
        else if (e.key == "input_clamp_mg") cfg.input_clamp_mg = static_cast<std::int32_t>(to_int(e));
        else if (e.key == "bit_width") cfg.bit_width = static_cast<int>(to_int(e));
        else if (e.key == "train_windows") cfg.train_windows = static_cast<int>(to_int(e));
        else if (e.key == "val_windows") cfg.val_windows = static_cast<int>(to_int(e));
        else if (e.key == "train_brand") cfg.train_brand = unquote(e);
        else if (e.key == "fir_taps") cfg.fir_taps = static_cast<int>(to_int(e));
        else throw InvalidArgument("unknown config key: " + e.key);
    }
    cfg.validate();
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    return parse_run_config(detail::read_text_file(path));
}

SynthConfig parse_synth_config(const std::string& text) {
    SynthConfig cfg = default_synth_config();
    double duration_s = -1.0;
    double recording_s = -1.0;
    std::vector<std::string> brand_names;

    for (const ConfigEntry& e : parse_entries(text)) {
        if (e.section != "gen") continue;
        if (e.key == "source_rate_hz") cfg.source_rate_hz = to_double(e);
        else if (e.key == "mean_segment_s") cfg.mean_segment_s = to_double(e);
        else if (e.key == "duration_s") duration_s = to_double(e);
        else if (e.key == "recording_s") recording_s = to_double(e);
        else if (e.key == "brands") {
            for (const std::string& part : split_list(e.value)) {
                ConfigEntry item{e.section, e.key, part, e.line};
                brand_names.push_back(unquote(item));
            }
        } else throw InvalidArgument("unknown config key: " + e.key);
    }

    if (!brand_names.empty()) {
        std::vector<BrandSpec> selected;
        for (const std::string& name : brand_names) {
            const auto it = std::find_if(cfg.brands.begin(), cfg.brands.end(),
                                         [&](const BrandSpec& b) { return b.name == name; });
            if (it == cfg.brands.end()) throw InvalidArgument("unknown brand: " + name);
            selected.push_back(*it);
        }
        cfg.brands = std::move(selected);
    }
    for (BrandSpec& b : cfg.brands) {
        if (duration_s >= 0) b.duration_s = duration_s;
        if (recording_s > 0) b.recording_s = recording_s;
    }
    return cfg;
}

HyperscanGrid parse_hyperscan_grid(const std::string& text) {
    HyperscanGrid grid;
    for (const ConfigEntry& e : parse_entries(text)) {
        if (e.section != "scan") continue;
        if (e.key == "rates") grid.sampling_rates_hz = to_double_list(e);
        else if (e.key == "feature_counts") {
            grid.feature_counts.clear();
            for (double v : to_double_list(e)) grid.feature_counts.push_back(static_cast<int>(v));
        } else if (e.key == "train_windows") grid.train_windows = static_cast<int>(to_int(e));
        else if (e.key == "val_windows") grid.val_windows = static_cast<int>(to_int(e));
        else if (e.key == "window_seconds") grid.window_seconds = to_double(e);
        else throw InvalidArgument("unknown config key: " + e.key);
    }
    return grid;
}

DatasetSplit prepare_dataset(std::span<const Recording> corpus, const RunConfig& config) {
    config.validate();
    std::vector<Recording> processed;
    processed.reserve(corpus.size());
    for (const Recording& rec : corpus)
        processed.push_back(l1_norm(resample(rec, config.sampling_rate_hz, config.fir_taps)));

    WindowingOptions opt;
    opt.window_len = config.window_len;
    opt.train_count = config.train_windows;
    opt.val_count = config.val_windows;
    opt.seed = config.seed;
    return split_by_brand(processed, config.train_brand, opt);
}

TrainResult train_model(std::span<const Recording> corpus, const RunConfig& config) {
    DatasetSplit split = prepare_dataset(corpus, config);

    KernelSet kernels = build_kernel_set(config.window_len, 1, config.feature_count, config.seed);
    fit(kernels, split.train);

    const std::vector<float> features = transform_batch(split.train, kernels);
    std::vector<int> labels;
    labels.reserve(split.train.size());
    for (const Window& w : split.train) labels.push_back(w.label);

    RidgeOptions ropt;
    ropt.lambda_grid = config.lambda_grid;
    ropt.class_labels = {kClassNames[kTransportationClass], kClassNames[kUsageClass]};
    LinearClassifier classifier =
        train_ridge(features, static_cast<int>(split.train.size()), config.feature_count, labels,
                    ropt);

    TrainResult result;
    result.bundle.kernels = std::move(kernels);
    result.bundle.classifier = std::move(classifier);
    result.bundle.config_text = config.canonical_text();
    result.bundle.config_digest = crc64(result.bundle.config_text);
    result.train_window_count = static_cast<int>(split.train.size());
    result.val_window_count = static_cast<int>(split.validation.size());
    result.warnings = split.warnings;

    if (!split.validation.empty()) {
        std::vector<int> truth, predicted;
        for (const Window& w : split.validation) {
            const FeatureVector fv = transform(w, result.bundle.kernels);
            predicted.push_back(predict_float(fv, result.bundle.classifier).class_index);
            truth.push_back(w.label);
        }
        const BinaryMetrics m = binary_metrics(truth, predicted, kUsageClass);
        result.val_accuracy = m.accuracy;
        result.val_f1 = m.f1;
    }
    return result;
}

EvalResult evaluate(const ModelBundle& bundle, std::span<const Window> windows) {
    if (windows.empty()) throw InvalidArgument("nothing to evaluate");

    EvalResult result;
    result.window_count = static_cast<int>(windows.size());

    if (bundle.quantized) {
        const AgreementReport rep =
            validate_pair(bundle.kernels, bundle.classifier, bundle.qmodel, windows);
        result.accuracy_float = rep.accuracy_float;
        result.f1_float = rep.f1_float;
        result.accuracy_quant = rep.accuracy_quant;
        result.f1_quant = rep.f1_quant;
        result.agreement = rep.agreement_rate;
        result.disagreements = static_cast<int>(rep.disagreements.size());
        return result;
    }

    std::vector<int> truth, predicted;
    for (const Window& w : windows) {
        const FeatureVector fv = transform(w, bundle.kernels);
        const int cls = predict_float(fv, bundle.classifier).class_index;
        if (w.label >= 0) {
            truth.push_back(w.label);
            predicted.push_back(cls);
        }
    }
    const BinaryMetrics m = binary_metrics(truth, predicted, kUsageClass);
    result.accuracy_float = m.accuracy;
    result.f1_float = m.f1;
    result.accuracy_quant = std::numeric_limits<double>::quiet_NaN();
    result.f1_quant = std::numeric_limits<double>::quiet_NaN();
    result.agreement = std::numeric_limits<double>::quiet_NaN();
    return result;
}

std::vector<HyperscanPoint> hyperscan(std::span<const Recording> corpus,
                                      const HyperscanGrid& grid, const RunConfig& base) {
    if (grid.sampling_rates_hz.empty() || grid.feature_counts.empty())
        throw InvalidArgument("empty grid");
    if (grid.window_seconds <= 0) throw InvalidArgument("window seconds must be positive");

    std::vector<double> rates = grid.sampling_rates_hz;
    std::sort(rates.begin(), rates.end());

    std::vector<HyperscanPoint> points;
    for (double rate : rates) {
        for (int fc : grid.feature_counts) {
            RunConfig cfg = base;
            cfg.sampling_rate_hz = rate;
            cfg.window_len = std::clamp(static_cast<int>(std::llround(grid.window_seconds * rate)),
                                        9, 200);
            cfg.feature_count = fc;
            cfg.train_windows = grid.train_windows;
            cfg.val_windows = grid.val_windows;

            TrainResult trained = train_model(corpus, cfg);
            ModelBundle& bundle = trained.bundle;
            bundle.qmodel = quantize_model(
                bundle.kernels, bundle.classifier,
                calibrate(bundle.kernels, bundle.classifier, cfg.input_clamp_mg, cfg.bit_width));
            bundle.quantized = true;

            HyperscanPoint p;
            p.sampling_rate_hz = rate;
            p.window_len = cfg.window_len;
            p.feature_count = fc;
            p.val_f1 = trained.val_f1;
            p.val_accuracy = trained.val_accuracy;
            p.parameter_bytes = estimate_memory(bundle).parameter_bytes;

            const KernelSet& k = bundle.kernels;
            std::int64_t ops = 0;
            for (int di = 0; di < k.dilation_count(); ++di) {
                for (int ki = 0; ki < kKernelCount; ++ki) {
                    const int pair = k.pair_index(di, ki);
                    const int positions = k.paddings[pair]
                                              ? k.window_length
                                              : k.window_length - 8 * k.dilations[di];
                    ops += static_cast<std::int64_t>(positions) * k.kernel_length *
                           static_cast<std::int64_t>(k.channel_assignments[pair].size());
                }
            }
            ops += static_cast<std::int64_t>(k.feature_count) * bundle.classifier.class_count;
            p.ops_per_inference = ops;
            points.push_back(p);
        }
    }
    return points;
}

std::string hyperscan_csv(std::span<const HyperscanPoint> points) {
    std::string text = "rate_hz,window_len,feature_count,val_f1,val_accuracy,param_bytes,ops_per_inference\n";
    char line[160];
    for (const HyperscanPoint& p : points) {
        std::snprintf(line, sizeof line, "%g,%d,%d,%.4f,%.4f,%lld,%lld\n", p.sampling_rate_hz,
                      p.window_len, p.feature_count, p.val_f1, p.val_accuracy,
                      static_cast<long long>(p.parameter_bytes),
                      static_cast<long long>(p.ops_per_inference));
        text += line;
    }
    return text;
}

}  // namespace rkl
