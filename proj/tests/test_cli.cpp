#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

struct RunResult {
    int exit_code = -1;
    std::string output;  // stdout + stderr
};

const fs::path& work_dir() {
    static const fs::path dir = [] {
        const fs::path d = fs::temp_directory_path() / "rocketlite_test_cli";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

RunResult run_cli(const std::string& args) {
    const fs::path out_file = work_dir() / "cli_output.txt";
    const std::string cmd = std::string(CLI_PATH) + " " + args + " > " + out_file.string() +
                            " 2>&1";
    const int status = std::system(cmd.c_str());
    RunResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(out_file);
    std::ostringstream ss;
    ss << in.rdbuf();
    result.output = ss.str();
    return result;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
    CHECK_EQ(run_cli("").exit_code, 2);
    CHECK_EQ(run_cli("transmogrify").exit_code, 2);
    CHECK_EQ(run_cli("gen-data").exit_code, 2);          // missing required --out
    CHECK_EQ(run_cli("train --frobnicate").exit_code, 2);

    const RunResult help = run_cli("--help");
    CHECK_EQ(help.exit_code, 0);
    CHECK(help.output.find("gen-data") != std::string::npos);
    CHECK(help.output.find("hyperscan") != std::string::npos);
}

TEST_CASE("operational errors exit with 1") {
    const RunResult r = run_cli("train --data /nonexistent_corpus --out " +
                                (work_dir() / "nope.rklm").string());
    CHECK_EQ(r.exit_code, 1);
    CHECK(r.output.find("error:") != std::string::npos);

    CHECK_EQ(run_cli("quantize --model /nonexistent.rklm --out x.rklm").exit_code, 1);
    CHECK_EQ(run_cli("battery --capacity-mah -5").exit_code, 1);
}

TEST_CASE("the full command workflow runs clean") {
    const fs::path dir = work_dir();
    const fs::path cfg = dir / "run.toml";
    write_file(cfg,
               "seed = 3\n"
               "train_windows = 40\n"
               "val_windows = 20\n"
               "[gen]\n"
               "duration_s = 60\n"
               "recording_s = 15\n"
               "brands = \"alpha\", \"bravo\"\n"
               "[scan]\n"
               "rates = 50\n"
               "feature_counts = 84\n"
               "train_windows = 40\n"
               "val_windows = 20\n");

    const fs::path corpus = dir / "corpus";
    const fs::path model = dir / "model.rklm";
    const fs::path model_q = dir / "model_q.rklm";

    const RunResult gen =
        run_cli("gen-data --config " + cfg.string() + " --seed 11 --out " + corpus.string());
    CHECK_EQ(gen.exit_code, 0);
    CHECK(gen.output.find("wrote 8 recordings") != std::string::npos);
    int csv_count = 0, sidecar_count = 0;
    for (const auto& entry : fs::directory_iterator(corpus)) {
        csv_count += entry.path().extension() == ".csv";
        sidecar_count += entry.path().extension() == ".json";
    }
    CHECK_EQ(csv_count, 8);
    CHECK_EQ(sidecar_count, 8);

    const RunResult train = run_cli("train --data " + corpus.string() + " --config " +
                                    cfg.string() + " --out " + model.string());
    CHECK_EQ(train.exit_code, 0);
    CHECK(fs::exists(model));
    CHECK(train.output.find("val_accuracy") != std::string::npos);

    const RunResult quant =
        run_cli("quantize --model " + model.string() + " --out " + model_q.string());
    CHECK_EQ(quant.exit_code, 0);
    CHECK(quant.output.find("\"s1\": 11184") != std::string::npos);

    const RunResult eval =
        run_cli("eval --model " + model_q.string() + " --data " + corpus.string());
    CHECK_EQ(eval.exit_code, 0);
    CHECK(eval.output.find("\"agreement\"") != std::string::npos);
    CHECK(eval.output.find("\"split\": \"test\"") != std::string::npos);

    const fs::path arrays = dir / "params.c";
    const RunResult exp = run_cli("export --model " + model_q.string() + " --arrays " +
                                  arrays.string() + " --memory");
    CHECK_EQ(exp.exit_code, 0);
    CHECK(exp.output.find("parameter_bytes") != std::string::npos);
    const std::string source = read_file(arrays);
    CHECK(source.find("#define RKL_FEATURE_COUNT 84") != std::string::npos);
    CHECK(source.find("rkl_weights_q") != std::string::npos);

    const fs::path golden = dir / "golden.rklv";
    CHECK_EQ(run_cli("export --model " + model_q.string() + " --golden " + golden.string() +
                     " --data " + corpus.string() + " --count 20")
                 .exit_code,
             0);
    const RunResult replay =
        run_cli("export --model " + model_q.string() + " --replay " + golden.string());
    CHECK_EQ(replay.exit_code, 0);
    CHECK(replay.output.find("\"mismatches\": 0") != std::string::npos);

    const fs::path scenario = dir / "scenario.json";
    write_file(scenario, R"([{"t_start_s": 2.0, "t_end_s": 5.0, "activity": "grinding"}])");
    const fs::path trace = dir / "trace.csv";
    const RunResult sim = run_cli("simulate --scenario " + scenario.string() + " --model " +
                                  model_q.string() + " --trace " + trace.string());
    CHECK_EQ(sim.exit_code, 0);
    CHECK(sim.output.find("inference_count") != std::string::npos);
    CHECK(read_file(trace).rfind("t_s,event,energy_uJ,cum_uJ,result", 0) == 0);

    const RunResult batt = run_cli("battery --capacity-mah 225");
    CHECK_EQ(batt.exit_code, 0);
    CHECK(batt.output.find("\"years\": 4.316") != std::string::npos);

    const fs::path scan_csv = dir / "scan.csv";
    const RunResult scan = run_cli("hyperscan --data " + corpus.string() + " --config " +
                                   cfg.string() + " --out " + scan_csv.string());
    CHECK_EQ(scan.exit_code, 0);
    const std::string table = read_file(scan_csv);
    CHECK(table.rfind("rate_hz,window_len,feature_count,", 0) == 0);
    CHECK(table.find("\n50,20,84,") != std::string::npos);

    SUBCASE("a float-only model cannot export arrays") {
        CHECK_EQ(run_cli("export --model " + model.string() + " --arrays " +
                         (dir / "x.c").string())
                     .exit_code,
                 1);
    }
}
