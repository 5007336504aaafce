#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "rocketlite/crc64.hpp"
#include "rocketlite/dataset_io.hpp"
#include "rocketlite/errors.hpp"
#include "rocketlite/kernels.hpp"
#include "rocketlite/model_io.hpp"
#include "rocketlite/quantize.hpp"
#include "rocketlite/ridge.hpp"
#include "rocketlite/rng.hpp"

using namespace rkl;

namespace {

namespace fs = std::filesystem;

fs::path temp_dir() {
    const fs::path dir = fs::temp_directory_path() / "rocketlite_test_model_io";
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

Window random_window(int length, int channels, std::uint64_t seed, float scale = 1.0f) {
    Rng rng(seed);
    Window w;
    w.length = length;
    w.channels = channels;
    w.sample_rate_hz = 200.0;
    w.samples.resize(static_cast<std::size_t>(length) * channels);
    for (float& v : w.samples) v = scale * static_cast<float>(rng.uniform(-1500.0, 1500.0));
    return w;
}

// Fitted transform + trained classifier on an amplitude-scale problem,
// optionally quantized, packed into a bundle.
ModelBundle make_bundle(bool quantized, std::uint64_t seed = 42, int bit_width = 32) {
    ModelBundle bundle;
    bundle.kernels = build_kernel_set(80, 1, 84, seed);
    std::vector<Window> train;
    std::vector<int> labels;
    for (int i = 0; i < 24; ++i) {
        const int label = i % 2;
        Window w = random_window(80, 1, seed * 1000 + i, label ? 3.0f : 1.0f);
        w.label = label;
        train.push_back(std::move(w));
        labels.push_back(label);
    }
    fit(bundle.kernels, train);
    const auto rows = transform_batch(train, bundle.kernels);
    bundle.classifier = train_ridge(rows, static_cast<int>(train.size()), 84, labels);
    if (quantized) {
        const QuantizationCalibration cal =
            calibrate(bundle.kernels, bundle.classifier, 16000, bit_width);
        bundle.qmodel = quantize_model(bundle.kernels, bundle.classifier, cal);
        bundle.quantized = true;
    }
    bundle.config_text = "rate_hz = 200\nwindow_len = 80\nfeature_count = 84\n";
    bundle.config_digest = crc64(bundle.config_text);
    return bundle;
}

// Recomputes the trailing CRC-64 after a deliberate byte patch so the test
// reaches the check behind the digest.
void fix_digest(std::vector<std::uint8_t>& bytes) {
    const std::uint64_t digest = crc64(bytes.data(), bytes.size() - 8);
    std::memcpy(bytes.data() + bytes.size() - 8, &digest, 8);
}

// Byte offset of a section-table entry in a serialized bundle. The table
// starts at byte 12 and holds 20-byte entries (fourcc u32, offset u64,
// size u64).
std::size_t table_entry_offset(const std::vector<std::uint8_t>& bytes, const char (&fourcc)[5]) {
    std::uint32_t count = 0;
    std::memcpy(&count, bytes.data() + 8, 4);
    for (std::uint32_t i = 0; i < count; ++i) {
        const std::size_t at = 12 + static_cast<std::size_t>(i) * 20;
        if (std::memcmp(bytes.data() + at, fourcc, 4) == 0) return at;
    }
    FAIL("section not found in table");
    return 0;
}

Recording make_recording(const std::string& id, double rate, std::int64_t n,
                         std::uint64_t seed = 9) {
    Rng rng(seed);
    Recording rec;
    rec.id = id;
    rec.brand = "alpha";
    rec.family = "grinder";
    rec.activity = "grinding";
    rec.source_rate_hz = rate;
    rec.channels = 3;
    rec.samples.resize(static_cast<std::size_t>(3) * n);
    rec.labels.resize(n);
    for (auto& v : rec.samples) v = static_cast<float>(rng.uniform(-2000.0, 2000.0));
    for (std::int64_t i = 0; i < n; ++i) rec.labels[i] = static_cast<std::uint16_t>((i / 7) % 2);
    return rec;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

}  // namespace

TEST_CASE("crc64 matches the XZ check value and streams consistently") {
    CHECK_EQ(crc64("123456789"), 0x995DC9BBDF1939FAULL);
    CHECK_EQ(crc64(""), 0);

    const std::string text = "the quick brown fox jumps over the lazy dog";
    const std::uint64_t oneshot = crc64(text);
    std::uint64_t state = crc64_init();
    state = crc64_update(state, text.data(), 10);
    state = crc64_update(state, text.data() + 10, 1);
    state = crc64_update(state, text.data() + 11, text.size() - 11);
    CHECK_EQ(crc64_final(state), oneshot);

    std::string flipped = text;
    flipped[17] ^= 1;
    CHECK_NE(crc64(flipped), oneshot);
}

TEST_CASE("model bundles round-trip bit-exactly") {
    SUBCASE("float-only bundle") {
        const ModelBundle bundle = make_bundle(false);
        const auto bytes = encode_bundle(bundle);
        CHECK_EQ(encode_bundle(bundle), bytes);   // byte-stable
        const ModelBundle back = decode_bundle(bytes);
        CHECK(back == bundle);
        CHECK_FALSE(back.quantized);
    }

    SUBCASE("quantized bundle through the filesystem") {
        const ModelBundle bundle = make_bundle(true);
        const fs::path path = temp_dir() / "model.rklm";
        save_bundle(bundle, path.string());
        const ModelBundle back = load_bundle(path.string());
        CHECK(back == bundle);
        CHECK(back.quantized);
        CHECK_EQ(back.qmodel.calibration.s1, bundle.qmodel.calibration.s1);
        CHECK_EQ(back.config_digest, crc64(back.config_text));
    }

    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_bundle("/nonexistent/model.rklm"), IoError);
    }
}

TEST_CASE("corrupted bundles are rejected with specific errors") {
    const ModelBundle bundle = make_bundle(true);
    const auto bytes = encode_bundle(bundle);

    SUBCASE("too short to hold a header and digest") {
        const std::vector<std::uint8_t> stub(bytes.begin(), bytes.begin() + 12);
        CHECK_THROWS_WITH_AS(decode_bundle(stub), "bundle corrupt", CorruptData);
    }

    SUBCASE("payload flip breaks the digest") {
        auto bad = bytes;
        bad[bad.size() / 2] ^= 0x40;
        CHECK_THROWS_WITH_AS(decode_bundle(bad), "bundle digest mismatch", CorruptData);
    }

    SUBCASE("truncation breaks the digest") {
        std::vector<std::uint8_t> bad(bytes.begin(), bytes.end() - 1);
        CHECK_THROWS_WITH_AS(decode_bundle(bad), "bundle digest mismatch", CorruptData);
    }

    SUBCASE("wrong magic") {
        auto bad = bytes;
        bad[0] = 'X';
        fix_digest(bad);
        CHECK_THROWS_WITH_AS(decode_bundle(bad), "not a model bundle", CorruptData);
    }

    SUBCASE("unsupported version") {
        auto bad = bytes;
        bad[4] = 2;
        fix_digest(bad);
        CHECK_THROWS_WITH_AS(decode_bundle(bad), "unsupported bundle version", Unsupported);
    }

    SUBCASE("required section renamed away") {
        auto bad = bytes;
        const std::size_t at = table_entry_offset(bad, "META");
        std::memcpy(bad.data() + at, "ZZZZ", 4);
        fix_digest(bad);
        CHECK_THROWS_WITH_AS(decode_bundle(bad), "bundle missing section", CorruptData);
    }

    SUBCASE("unknown optional section is skipped") {
        auto bad = bytes;
        const std::size_t at = table_entry_offset(bad, "QNTZ");
        std::memcpy(bad.data() + at, "ZZZY", 4);
        fix_digest(bad);
        const ModelBundle back = decode_bundle(bad);
        CHECK_FALSE(back.quantized);
        CHECK(back.kernels == bundle.kernels);
        CHECK(back.classifier == bundle.classifier);
    }

    SUBCASE("section overrunning the payload") {
        auto bad = bytes;
        const std::size_t at = table_entry_offset(bad, "KERN");
        const std::uint64_t huge = 1u << 30;
        std::memcpy(bad.data() + at + 12, &huge, 8);
        fix_digest(bad);
        CHECK_THROWS_WITH_AS(decode_bundle(bad), "bundle corrupt", CorruptData);
    }
}

TEST_CASE("window archives round-trip including unlabeled windows") {
    const fs::path dir = temp_dir();
    const fs::path path = dir / "windows.rklw";

    std::vector<Window> windows;
    for (int i = 0; i < 3; ++i) {
        Window w = random_window(12, 2, 100 + i);
        w.label = i == 1 ? -1 : i;
        w.recording_id = "rec-000";
        w.brand = "alpha";
        w.start_sample = 40 * i;
        windows.push_back(std::move(w));
    }

    save_window_archive(windows, path.string());
    const auto back = load_window_archive(path.string());
    REQUIRE_EQ(back.size(), 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK_EQ(back[i].samples, windows[i].samples);
        CHECK_EQ(back[i].label, windows[i].label);
        CHECK_EQ(back[i].length, 12);
        CHECK_EQ(back[i].channels, 2);
        CHECK_EQ(back[i].sample_rate_hz, 200.0);
        CHECK(back[i].recording_id.empty());  // provenance is in-memory only
        CHECK(back[i].brand.empty());
        CHECK_EQ(back[i].start_sample, 0);
    }

    SUBCASE("empty archive") {
        save_window_archive(std::vector<Window>{}, path.string());
        CHECK(load_window_archive(path.string()).empty());
    }

    SUBCASE("mismatched shapes are rejected before writing") {
        std::vector<Window> bad = windows;
        bad.push_back(random_window(13, 2, 7));
        CHECK_THROWS_WITH_AS(save_window_archive(bad, path.string()), "windows must share shape",
                             InvalidArgument);
    }

    SUBCASE("trailing bytes") {
        std::ofstream app(path, std::ios::binary | std::ios::app);
        app.put('\0');
        app.close();
        CHECK_THROWS_AS(load_window_archive(path.string()), CorruptData);
    }

    SUBCASE("wrong magic") {
        write_text(path, "RKLX garbage");
        CHECK_THROWS_AS(load_window_archive(path.string()), CorruptData);
    }

    SUBCASE("unsupported version") {
        std::fstream f(path, std::ios::binary | std::ios::in | std::ios::out);
        f.seekp(4);
        f.put(9);
        f.close();
        CHECK_THROWS_AS(load_window_archive(path.string()), Unsupported);
    }
}

TEST_CASE("recording CSVs round-trip exactly") {
    const fs::path dir = temp_dir();
    const fs::path path = dir / "rec-001.csv";
    const Recording rec = make_recording("rec-001", 800.0, 50);

    save_recording_csv(rec, path.string());
    const Recording back = load_recording_csv(path.string());

    CHECK_EQ(back.id, "rec-001");
    CHECK_EQ(back.brand, "alpha");
    CHECK_EQ(back.family, "grinder");
    CHECK_EQ(back.activity, "grinding");
    CHECK_EQ(back.source_rate_hz, 800.0);
    CHECK_EQ(back.channels, 3);
    CHECK_EQ(back.samples, rec.samples);  // %.9g keeps float32 exact
    CHECK_EQ(back.labels, rec.labels);

    SUBCASE("non-triaxial or mislabeled recordings are rejected on save") {
        Recording bad = rec;
        bad.channels = 1;
        bad.samples.resize(50);
        CHECK_THROWS_AS(save_recording_csv(bad, path.string()), InvalidArgument);
        Recording bad2 = rec;
        bad2.labels.pop_back();
        CHECK_THROWS_AS(save_recording_csv(bad2, path.string()), InvalidArgument);
    }
}

TEST_CASE("jittered timestamps are interpolated onto the uniform grid") {
    const fs::path dir = temp_dir();
    const fs::path path = dir / "jitter.csv";

    // 100 Hz grid; row 7 is shifted by 0.4*dt and the final row by 0.5*dt,
    // forcing the interpolation path. Samples are linear in t so the
    // interpolated values land back on the grid values exactly.
    std::string text = "t_s,ax_mg,ay_mg,az_mg,label\n";
    char line[160];
    for (int i = 0; i <= 20; ++i) {
        double t = i * 0.01;
        if (i == 7) t += 0.004;
        if (i == 20) t += 0.005;
        std::snprintf(line, sizeof line, "%.6f,%.9g,%.9g,%.9g,%d\n", t, 1000.0 * t, -500.0 * t,
                      1000.0, i < 10 ? 0 : 1);
        text += line;
    }
    write_text(path, text);
    write_text(dir / "jitter.csv.json",
               "{\"brand\":\"bravo\",\"family\":\"drill\",\"activity\":\"drilling\","
               "\"source_rate_hz\":100.0}");

    const Recording rec = load_recording_csv(path.string());
    CHECK_EQ(rec.brand, "bravo");
    const auto n = static_cast<std::int64_t>(rec.sample_count());
    REQUIRE_GE(n, 20);
    for (std::int64_t j = 0; j < n; ++j) {
        CHECK_EQ(rec.at(0, j), doctest::Approx(10.0 * static_cast<double>(j)).epsilon(1e-4));
        CHECK_EQ(rec.at(1, j), doctest::Approx(-5.0 * static_cast<double>(j)).epsilon(1e-4));
        CHECK_EQ(rec.at(2, j), 1000.0f);
        CHECK_EQ(rec.labels[j], j < 10 ? 0 : 1);
    }
}

TEST_CASE("defective CSV inputs raise specific errors") {
    const fs::path dir = temp_dir();
    const Recording rec = make_recording("rec-002", 200.0, 10);

    SUBCASE("missing sidecar") {
        const fs::path path = dir / "nosidecar.csv";
        save_recording_csv(rec, path.string());
        fs::remove(dir / "nosidecar.csv.json");
        CHECK_THROWS_AS(load_recording_csv(path.string()), IoError);
    }

    SUBCASE("malformed sidecar JSON") {
        const fs::path path = dir / "badjson.csv";
        save_recording_csv(rec, path.string());
        write_text(dir / "badjson.csv.json", "{not json");
        CHECK_THROWS_AS(load_recording_csv(path.string()), CorruptData);
    }

    SUBCASE("sidecar without a sample rate") {
        const fs::path path = dir / "norate.csv";
        save_recording_csv(rec, path.string());
        write_text(dir / "norate.csv.json", "{\"brand\":\"alpha\"}");
        CHECK_THROWS_WITH_AS(load_recording_csv(path.string()),
                             ("bad sidecar: missing source_rate_hz"), CorruptData);
    }

    SUBCASE("wrong header") {
        const fs::path path = dir / "badheader.csv";
        write_text(path, "time,x,y,z,label\n0.0,1,2,3,0\n");
        write_text(dir / "badheader.csv.json", "{\"source_rate_hz\":200.0}");
        CHECK_THROWS_AS(load_recording_csv(path.string()), CorruptData);
    }

    SUBCASE("malformed row") {
        const fs::path path = dir / "badrow.csv";
        write_text(path, "t_s,ax_mg,ay_mg,az_mg,label\n0.0,1,2,oops,0\n");
        write_text(dir / "badrow.csv.json", "{\"source_rate_hz\":200.0}");
        CHECK_THROWS_AS(load_recording_csv(path.string()), CorruptData);
    }

    SUBCASE("non-increasing timestamps") {
        const fs::path path = dir / "backwards.csv";
        write_text(path,
                   "t_s,ax_mg,ay_mg,az_mg,label\n"
                   "0.000000,1,2,3,0\n0.010000,1,2,3,0\n0.010000,1,2,3,0\n");
        write_text(dir / "backwards.csv.json", "{\"source_rate_hz\":100.0}");
        CHECK_THROWS_AS(load_recording_csv(path.string()), CorruptData);
    }

    SUBCASE("empty recording") {
        const fs::path path = dir / "empty.csv";
        write_text(path, "t_s,ax_mg,ay_mg,az_mg,label\n");
        write_text(dir / "empty.csv.json", "{\"source_rate_hz\":100.0}");
        CHECK_THROWS_AS(load_recording_csv(path.string()), CorruptData);
    }
}

TEST_CASE("corpus directories save and load in sorted order") {
    const fs::path dir = temp_dir() / "corpus";
    std::vector<Recording> recs;
    recs.push_back(make_recording("charlie-000", 800.0, 30, 1));
    recs.push_back(make_recording("alpha-000", 800.0, 30, 2));
    recs.push_back(make_recording("bravo-000", 800.0, 30, 3));

    save_corpus_dir(recs, dir.string());
    const auto back = load_corpus_dir(dir.string());
    REQUIRE_EQ(back.size(), 3);
    CHECK_EQ(back[0].id, "alpha-000");
    CHECK_EQ(back[1].id, "bravo-000");
    CHECK_EQ(back[2].id, "charlie-000");
    CHECK_EQ(back[0].samples, recs[1].samples);
    CHECK_EQ(back[2].samples, recs[0].samples);

    CHECK_THROWS_AS(load_corpus_dir((dir / "missing").string()), IoError);

    Recording anon = make_recording("", 800.0, 30);
    CHECK_THROWS_AS(save_corpus_dir(std::vector<Recording>{anon}, dir.string()), InvalidArgument);
}

TEST_CASE("static array export is compile-ready and byte-stable") {
    const ModelBundle bundle = make_bundle(true);
    const std::string code = export_static_arrays(bundle);
    CHECK_EQ(export_static_arrays(bundle), code);

    CHECK(code.find("#include <stdint.h>") != std::string::npos);
    CHECK(code.find("#define RKL_FEATURE_COUNT 84") != std::string::npos);
    CHECK(code.find("#define RKL_WINDOW_LENGTH 80") != std::string::npos);
    CHECK(code.find("#define RKL_CLASS_COUNT 2") != std::string::npos);
    CHECK(code.find("#define RKL_BIT_WIDTH 32") != std::string::npos);
    CHECK(code.find("static const int64_t rkl_s1 = 11184LL;") != std::string::npos);
    CHECK(code.find("static const int32_t rkl_bias_q") != std::string::npos);
    CHECK(code.find("rkl_weights_q[RKL_FEATURE_COUNT * RKL_CLASS_COUNT]") != std::string::npos);
    CHECK(code.find("rkl_kernel_taps[RKL_KERNEL_COUNT][3]") != std::string::npos);

    SUBCASE("wide calibrations emit 64-bit arrays") {
        const ModelBundle wide = make_bundle(true, 42, 48);
        const std::string wcode = export_static_arrays(wide);
        CHECK(wcode.find("#define RKL_BIT_WIDTH 48") != std::string::npos);
        CHECK(wcode.find("static const int64_t rkl_bias_q") != std::string::npos);
        CHECK(wcode.find("LL, ") != std::string::npos);
    }

    SUBCASE("refuses a float-only bundle") {
        CHECK_THROWS_AS(export_static_arrays(make_bundle(false)), StateError);
    }
}

TEST_CASE("golden vectors replay bit-for-bit against the emitting model") {
    const fs::path dir = temp_dir();
    const fs::path path = dir / "golden.rklv";
    const ModelBundle bundle = make_bundle(true);

    std::vector<Window> probes;
    for (int i = 0; i < 8; ++i)
        probes.push_back(random_window(80, 1, 7000 + i, i % 2 ? 3.0f : 1.0f));

    emit_golden_vectors(bundle, probes, path.string());
    const GoldenReplayReport rep = replay_golden_vectors(bundle, path.string());
    CHECK_EQ(rep.total, 8);
    CHECK_EQ(rep.mismatches, 0);

    SUBCASE("a different model fails the replay") {
        const ModelBundle other = make_bundle(true, 43);
        const GoldenReplayReport bad = replay_golden_vectors(other, path.string());
        CHECK_EQ(bad.total, 8);
        CHECK_GT(bad.mismatches, 0);
    }

    SUBCASE("corruption is detected") {
        auto bytes = [&] {
            std::ifstream in(path, std::ios::binary);
            return std::vector<char>((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
        }();
        bytes[bytes.size() / 2] ^= 0x10;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.close();
        CHECK_THROWS_WITH_AS(replay_golden_vectors(bundle, path.string()),
                             "golden vector digest mismatch", CorruptData);
    }

    SUBCASE("truncated file") {
        write_text(path, "RKLV");
        CHECK_THROWS_WITH_AS(replay_golden_vectors(bundle, path.string()),
                             "golden vectors corrupt", CorruptData);
    }

    SUBCASE("refuses a float-only bundle") {
        const ModelBundle plain = make_bundle(false);
        CHECK_THROWS_AS(emit_golden_vectors(plain, probes, path.string()), StateError);
        CHECK_THROWS_AS(replay_golden_vectors(plain, path.string()), StateError);
    }
}

TEST_CASE("memory estimate matches the hand-computed footprint") {
    const ModelBundle bundle = make_bundle(true);
    const MemoryReport rep = estimate_memory(bundle);

    // 84 features, window 80, one channel, two classes, 32-bit arithmetic:
    // taps 252 + dilations 8 + paddings 84 + channel table 336 + biases 336
    // + counts 336 + weights 672 + clf biases 8 + scalars 36 = 2068.
    CHECK_EQ(rep.parameter_bytes, 2068);
    // raw + quantized window + conv scratch 3*320, counts 336, t^q 336,
    // scores 8 = 1640.
    CHECK_EQ(rep.working_buffer_bytes, 1640);

    std::int64_t psum = 0, wsum = 0;
    for (const auto& [name, bytes] : rep.parameter_breakdown) psum += bytes;
    for (const auto& [name, bytes] : rep.working_breakdown) wsum += bytes;
    CHECK_EQ(psum, rep.parameter_bytes);
    CHECK_EQ(wsum, rep.working_buffer_bytes);
    CHECK_EQ(rep.parameter_breakdown.at("classifier weights"), 672);
    CHECK_EQ(rep.working_breakdown.at("raw window"), 320);

    SUBCASE("wide arithmetic doubles the integer-valued tables") {
        const MemoryReport wide = estimate_memory(make_bundle(true, 42, 48));
        CHECK_EQ(wide.parameter_breakdown.at("classifier weights"), 1344);
        CHECK_EQ(wide.parameter_bytes, 2068 + 672 + 8);
        CHECK_EQ(wide.working_buffer_bytes, 1640 + 336 + 8);
    }

    SUBCASE("refuses a float-only bundle") {
        CHECK_THROWS_AS(estimate_memory(make_bundle(false)), StateError);
    }
}
