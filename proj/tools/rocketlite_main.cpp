#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include <rocketlite.h>

namespace {

struct CorpusDeleter {
    void operator()(rkl_corpus* p) const { rkl_corpus_free(p); }
};
struct ModelDeleter {
    void operator()(rkl_model* p) const { rkl_model_free(p); }
};
struct TraceDeleter {
    void operator()(rkl_trace* p) const { rkl_trace_free(p); }
};
using CorpusPtr = std::unique_ptr<rkl_corpus, CorpusDeleter>;
using ModelPtr = std::unique_ptr<rkl_model, ModelDeleter>;
using TracePtr = std::unique_ptr<rkl_trace, TraceDeleter>;

struct JsonText {
    char* text = nullptr;
    ~JsonText() { rkl_string_free(text); }
};

bool ok(rkl_status st) {
    if (st == RKL_OK) return true;
    std::cerr << "error: " << rkl_last_error() << '\n';
    return false;
}

// Empty path gives an empty config (library defaults).
bool read_config(const std::string& path, std::string& out) {
    if (path.empty()) {
        out.clear();
        return true;
    }
    std::ifstream in(path);
    if (!in) {
        std::cerr << "error: cannot open " << path << '\n';
        return false;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    out = ss.str();
    return true;
}

bool write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    out << text;
    out.flush();
    if (!out) {
        std::cerr << "error: cannot write " << path << '\n';
        return false;
    }
    return true;
}

int cmd_gen_data(const std::string& config_path, std::uint64_t seed, const std::string& out_dir) {
    std::string config;
    if (!read_config(config_path, config)) return 1;

    rkl_corpus* corpus_raw = nullptr;
    if (!ok(rkl_corpus_generate(config.c_str(), seed, &corpus_raw))) return 1;
    CorpusPtr corpus(corpus_raw);
    if (!ok(rkl_corpus_save_dir(corpus.get(), out_dir.c_str()))) return 1;

    JsonText info;
    if (!ok(rkl_corpus_info_json(corpus.get(), &info.text))) return 1;
    const auto doc = nlohmann::json::parse(info.text);
    std::cout << "wrote " << doc["recording_count"] << " recordings ("
              << doc["total_duration_s"].get<double>() << " s) to " << out_dir << '\n';
    return 0;
}

int cmd_train(const std::string& data_dir, const std::string& config_path,
              const std::string& out_path) {
    std::string config;
    if (!read_config(config_path, config)) return 1;

    rkl_corpus* corpus_raw = nullptr;
    if (!ok(rkl_corpus_load_dir(data_dir.c_str(), &corpus_raw))) return 1;
    CorpusPtr corpus(corpus_raw);

    rkl_model* model_raw = nullptr;
    JsonText report;
    if (!ok(rkl_train(corpus.get(), config.c_str(), &model_raw, &report.text))) return 1;
    ModelPtr model(model_raw);
    if (!ok(rkl_model_save(model.get(), out_path.c_str()))) return 1;
    std::cout << report.text << '\n';
    return 0;
}

int cmd_quantize(const std::string& model_path, const std::string& out_path, int clamp_mg,
                 int bits) {
    rkl_model* model_raw = nullptr;
    if (!ok(rkl_model_load(model_path.c_str(), &model_raw))) return 1;
    ModelPtr model(model_raw);
    if (!ok(rkl_model_quantize(model.get(), clamp_mg, bits))) return 1;
    if (!ok(rkl_model_save(model.get(), out_path.c_str()))) return 1;

    JsonText info;
    if (!ok(rkl_model_info_json(model.get(), &info.text))) return 1;
    std::cout << info.text << '\n';
    return 0;
}

int cmd_eval(const std::string& model_path, const std::string& data_dir, std::uint64_t seed) {
    rkl_model* model_raw = nullptr;
    if (!ok(rkl_model_load(model_path.c_str(), &model_raw))) return 1;
    ModelPtr model(model_raw);

    rkl_corpus* corpus_raw = nullptr;
    if (!ok(rkl_corpus_load_dir(data_dir.c_str(), &corpus_raw))) return 1;
    CorpusPtr corpus(corpus_raw);

    JsonText report;
    if (!ok(rkl_eval(model.get(), corpus.get(), seed, &report.text))) return 1;
    std::cout << report.text << '\n';
    return 0;
}

int cmd_export(const std::string& model_path, const std::string& arrays_path, bool memory,
               const std::string& golden_path, const std::string& data_dir, int golden_count,
               std::uint64_t seed, const std::string& replay_path) {
    rkl_model* model_raw = nullptr;
    if (!ok(rkl_model_load(model_path.c_str(), &model_raw))) return 1;
    ModelPtr model(model_raw);

    if (!arrays_path.empty()) {
        JsonText source;
        if (!ok(rkl_model_export_arrays(model.get(), &source.text))) return 1;
        if (!write_text(arrays_path, source.text)) return 1;
        std::cout << "wrote " << arrays_path << '\n';
    }
    if (memory) {
        JsonText report;
        if (!ok(rkl_model_memory_json(model.get(), &report.text))) return 1;
        std::cout << report.text << '\n';
    }
    if (!golden_path.empty()) {
        rkl_corpus* corpus_raw = nullptr;
        if (!ok(rkl_corpus_load_dir(data_dir.c_str(), &corpus_raw))) return 1;
        CorpusPtr corpus(corpus_raw);
        if (!ok(rkl_golden_emit(model.get(), corpus.get(), seed, golden_count,
                                golden_path.c_str())))
            return 1;
        std::cout << "wrote " << golden_count << " golden vectors to " << golden_path << '\n';
    }
    if (!replay_path.empty()) {
        JsonText report;
        if (!ok(rkl_golden_replay(model.get(), replay_path.c_str(), &report.text))) return 1;
        std::cout << report.text << '\n';
        const auto doc = nlohmann::json::parse(report.text);
        if (doc["mismatches"].get<int>() != 0) return 1;
    }
    return 0;
}

int cmd_simulate(const std::string& scenario_path, const std::string& model_path,
                 const std::string& profile_path, double duration_s, std::uint64_t seed,
                 const std::string& trace_path) {
    std::string scenario;
    if (!read_config(scenario_path, scenario)) return 1;
    std::string profile;
    if (!read_config(profile_path, profile)) return 1;

    ModelPtr model;
    if (!model_path.empty()) {
        rkl_model* model_raw = nullptr;
        if (!ok(rkl_model_load(model_path.c_str(), &model_raw))) return 1;
        model.reset(model_raw);
    }

    rkl_trace* trace_raw = nullptr;
    if (!ok(rkl_simulate(scenario.c_str(), model.get(),
                         profile_path.empty() ? nullptr : profile.c_str(), duration_s, seed,
                         &trace_raw)))
        return 1;
    TracePtr trace(trace_raw);

    if (!trace_path.empty() && !ok(rkl_trace_export_csv(trace.get(), trace_path.c_str())))
        return 1;

    JsonText summary;
    if (!ok(rkl_trace_summary_json(trace.get(), &summary.text))) return 1;
    std::cout << summary.text << '\n';
    return 0;
}

int cmd_battery(const std::string& profile_path, double capacity_mah, double usage_hours) {
    std::string profile;
    if (!read_config(profile_path, profile)) return 1;

    JsonText report;
    if (!ok(rkl_battery_life(profile_path.empty() ? nullptr : profile.c_str(), capacity_mah,
                             usage_hours, &report.text)))
        return 1;
    std::cout << report.text << '\n';
    return 0;
}

int cmd_hyperscan(const std::string& data_dir, const std::string& config_path,
                  const std::string& out_path) {
    std::string config;
    if (!read_config(config_path, config)) return 1;

    rkl_corpus* corpus_raw = nullptr;
    if (!ok(rkl_corpus_load_dir(data_dir.c_str(), &corpus_raw))) return 1;
    CorpusPtr corpus(corpus_raw);

    JsonText csv;
    if (!ok(rkl_hyperscan(corpus.get(), config.c_str(), &csv.text))) return 1;
    if (!out_path.empty()) {
        if (!write_text(out_path, csv.text)) return 1;
        std::cout << "wrote " << out_path << '\n';
    } else {
        std::cout << csv.text;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string("rocketlite ") + rkl_version() +
                 " - accelerometer time-series classification toolkit"};
    app.require_subcommand(1);

    std::string config_path, data_dir, out_path, model_path;
    std::uint64_t seed = 1;

    auto* gen = app.add_subcommand("gen-data", "generate a labeled synthetic corpus");
    gen->add_option("--config", config_path, "run configuration file ([gen] section)");
    gen->add_option("--seed", seed, "generator seed");
    gen->add_option("--out", out_path, "output corpus directory")->required();

    auto* train = app.add_subcommand("train", "train a model on a corpus directory");
    train->add_option("--data", data_dir, "corpus directory")->required();
    train->add_option("--config", config_path, "run configuration file");
    train->add_option("--out", out_path, "output model bundle path")->required();

    int clamp_mg = 16000, bits = 32;
    auto* quant = app.add_subcommand("quantize", "add the integer inference path to a bundle");
    quant->add_option("--model", model_path, "model bundle path")->required();
    quant->add_option("--out", out_path, "output bundle path")->required();
    quant->add_option("--clamp", clamp_mg, "input clamp, milli-g");
    quant->add_option("--bits", bits, "accumulator bit width");

    auto* eval = app.add_subcommand("eval", "evaluate a model on held-out windows");
    eval->add_option("--model", model_path, "model bundle path")->required();
    eval->add_option("--data", data_dir, "corpus directory")->required();
    eval->add_option("--seed", seed, "windowing seed override (0 keeps the bundle seed)");

    std::string arrays_path, golden_path, replay_path;
    bool memory = false;
    int golden_count = 100;
    auto* exp = app.add_subcommand("export", "export firmware artifacts from a bundle");
    exp->add_option("--model", model_path, "model bundle path")->required();
    exp->add_option("--arrays", arrays_path, "write quantized parameters as a C source file");
    exp->add_flag("--memory", memory, "print the flash/RAM footprint report");
    exp->add_option("--golden", golden_path, "write golden inference vectors");
    exp->add_option("--data", data_dir, "corpus directory (for --golden)");
    exp->add_option("--count", golden_count, "golden vector count");
    exp->add_option("--seed", seed, "windowing seed (for --golden)");
    exp->add_option("--replay", replay_path, "replay golden vectors and verify bit-exactness");

    std::string scenario_path, profile_path, trace_path;
    double duration_s = 0.0;
    auto* sim = app.add_subcommand("simulate", "run the duty-cycled device simulator");
    sim->add_option("--scenario", scenario_path, "scenario JSON file")->required();
    sim->add_option("--model", model_path, "model bundle path (optional)");
    sim->add_option("--profile", profile_path, "energy profile JSON file");
    sim->add_option("--duration", duration_s, "simulated seconds (0 = scenario length)");
    sim->add_option("--seed", seed, "scenario rendering seed");
    sim->add_option("--trace", trace_path, "write the event trace as CSV");

    double capacity_mah = 225.0, usage_hours = 0.0;
    auto* batt = app.add_subcommand("battery", "estimate battery life in years");
    batt->add_option("--profile", profile_path, "energy profile JSON file");
    batt->add_option("--capacity-mah", capacity_mah, "battery capacity, mAh")->required();
    batt->add_option("--usage-hours", usage_hours, "active usage hours to cover");

    auto* scan = app.add_subcommand("hyperscan", "grid scan over sampling rates and features");
    scan->add_option("--data", data_dir, "corpus directory")->required();
    scan->add_option("--config", config_path, "run configuration file ([scan] section)");
    scan->add_option("--out", out_path, "write the results table as CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (gen->parsed()) return cmd_gen_data(config_path, seed, out_path);
    if (train->parsed()) return cmd_train(data_dir, config_path, out_path);
    if (quant->parsed()) return cmd_quantize(model_path, out_path, clamp_mg, bits);
    if (eval->parsed()) return cmd_eval(model_path, data_dir, seed);
    if (exp->parsed())
        return cmd_export(model_path, arrays_path, memory, golden_path, data_dir, golden_count,
                          seed, replay_path);
    if (sim->parsed())
        return cmd_simulate(scenario_path, model_path, profile_path, duration_s, seed, trace_path);
    if (batt->parsed()) return cmd_battery(profile_path, capacity_mah, usage_hours);
    if (scan->parsed()) return cmd_hyperscan(data_dir, config_path, out_path);
    return 2;
}
