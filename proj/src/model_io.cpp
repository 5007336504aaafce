#include "rocketlite/model_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <functional>

#include "rocketlite/crc64.hpp"
#include "rocketlite/detail/binio.hpp"
#include "rocketlite/errors.hpp"

namespace rkl {

namespace {

using detail::ByteReader;
using detail::ByteWriter;

constexpr std::uint32_t fourcc(const char (&s)[5]) {
    return static_cast<std::uint32_t>(s[0]) | static_cast<std::uint32_t>(s[1]) << 8 |
           static_cast<std::uint32_t>(s[2]) << 16 | static_cast<std::uint32_t>(s[3]) << 24;
}

constexpr std::uint32_t kMagic = fourcc("RKLM");
constexpr std::uint32_t kSecKernels = fourcc("KERN");
constexpr std::uint32_t kSecClassifier = fourcc("CLSF");
constexpr std::uint32_t kSecMeta = fourcc("META");
constexpr std::uint32_t kSecQuantized = fourcc("QNTZ");

void encode_kernels(ByteWriter& w, const KernelSet& k) {
    w.i32(k.kernel_length);
    w.vec(k.weight_patterns, [&](const WeightPattern& p) {
        for (auto t : p.positive_taps) w.u8(t);
    });
    w.i32(k.window_length);
    w.i32(k.channel_count);
    w.i32(k.feature_count);
    w.vec(k.dilations, [&](int d) { w.i32(d); });
    w.vec(k.features_per_kernel, [&](int f) { w.i32(f); });
    w.vec(k.channel_assignments, [&](const std::vector<std::uint16_t>& chans) {
        w.u32(static_cast<std::uint32_t>(chans.size()));
        for (auto c : chans) w.u16(c);
    });
    w.vec(k.paddings, [&](std::uint8_t p) { w.u8(p); });
    w.vec(k.biases, [&](float b) { w.f32(b); });
    w.vec(k.comparison_counts, [&](std::int32_t c) { w.i32(c); });
    w.u64(k.seed);
}

KernelSet decode_kernels(ByteReader& r) {
    KernelSet k;
    k.kernel_length = r.i32();
    k.weight_patterns = r.vec<WeightPattern>([&] {
        WeightPattern p;
        for (auto& t : p.positive_taps) t = r.u8();
        return p;
    });
    k.window_length = r.i32();
    k.channel_count = r.i32();
    k.feature_count = r.i32();
    k.dilations = r.vec<int>([&] { return r.i32(); });
    k.features_per_kernel = r.vec<int>([&] { return r.i32(); });
    k.channel_assignments = r.vec<std::vector<std::uint16_t>>([&] {
        const auto n = r.u32();
        std::vector<std::uint16_t> chans(n);
        for (auto& c : chans) c = r.u16();
        return chans;
    });
    k.paddings = r.vec<std::uint8_t>([&] { return r.u8(); });
    k.biases = r.vec<float>([&] { return r.f32(); });
    k.comparison_counts = r.vec<std::int32_t>([&] { return r.i32(); });
    k.seed = r.u64();
    return k;
}

void encode_classifier(ByteWriter& w, const LinearClassifier& c) {
    w.i32(c.feature_count);
    w.i32(c.class_count);
    w.vec(c.weights, [&](double v) { w.f64(v); });
    w.vec(c.biases, [&](double v) { w.f64(v); });
    w.vec(c.class_labels, [&](const std::string& s) { w.str(s); });
    w.f64(c.lambda);
}

LinearClassifier decode_classifier(ByteReader& r) {
    LinearClassifier c;
    c.feature_count = r.i32();
    c.class_count = r.i32();
    c.weights = r.vec<double>([&] { return r.f64(); });
    c.biases = r.vec<double>([&] { return r.f64(); });
    c.class_labels = r.vec<std::string>([&] { return r.str(); });
    c.lambda = r.f64();
    return c;
}

void encode_quantized(ByteWriter& w, const QuantizedModel& q) {
    w.i32(q.calibration.bit_width);
    w.i32(q.calibration.input_clamp_mg);
    w.i64(q.calibration.max_footprint);
    w.f64(q.calibration.max_abs_bias);
    w.i64(q.calibration.s1);
    w.i64(q.calibration.s2);
    w.vec(q.biases_q, [&](std::int64_t v) { w.i64(v); });
    w.vec(q.weights_q, [&](std::int64_t v) { w.i64(v); });
    w.vec(q.clf_biases_q, [&](std::int64_t v) { w.i64(v); });
}

QuantizedModel decode_quantized(ByteReader& r) {
    QuantizedModel q;
    q.calibration.bit_width = r.i32();
    q.calibration.input_clamp_mg = r.i32();
    q.calibration.max_footprint = r.i64();
    q.calibration.max_abs_bias = r.f64();
    q.calibration.s1 = r.i64();
    q.calibration.s2 = r.i64();
    q.biases_q = r.vec<std::int64_t>([&] { return r.i64(); });
    q.weights_q = r.vec<std::int64_t>([&] { return r.i64(); });
    q.clf_biases_q = r.vec<std::int64_t>([&] { return r.i64(); });
    return q;
}

struct Section {
    std::uint32_t id;
    std::vector<std::uint8_t> payload;
};

}  // namespace

std::vector<std::uint8_t> encode_bundle(const ModelBundle& bundle) {
    std::vector<Section> sections;
    {
        ByteWriter w;
        encode_kernels(w, bundle.kernels);
        sections.push_back({kSecKernels, std::move(w.data())});
    }
    {
        ByteWriter w;
        encode_classifier(w, bundle.classifier);
        sections.push_back({kSecClassifier, std::move(w.data())});
    }
    {
        ByteWriter w;
        w.str(bundle.config_text);
        w.u64(bundle.config_digest);
        sections.push_back({kSecMeta, std::move(w.data())});
    }
    if (bundle.quantized) {
        ByteWriter w;
        encode_quantized(w, bundle.qmodel);
        sections.push_back({kSecQuantized, std::move(w.data())});
    }

    ByteWriter out;
    out.u32(kMagic);
    out.u32(bundle.version);
    out.u32(static_cast<std::uint32_t>(sections.size()));
    std::uint64_t offset = 0;
    for (const Section& s : sections) {
        out.u32(s.id);
        out.u64(offset);
        out.u64(s.payload.size());
        offset += s.payload.size();
    }
    for (const Section& s : sections) out.bytes(s.payload.data(), s.payload.size());
    const std::uint64_t digest = crc64(out.data().data(), out.data().size());
    out.u64(digest);
    return std::move(out.data());
}

ModelBundle decode_bundle(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 20) throw CorruptData("bundle corrupt");
    std::uint64_t stored = 0;
    std::memcpy(&stored, bytes.data() + bytes.size() - 8, 8);
    if (crc64(bytes.data(), bytes.size() - 8) != stored)
        throw CorruptData("bundle digest mismatch");

    ByteReader r(bytes.data(), bytes.size() - 8);
    if (r.u32() != kMagic) throw CorruptData("not a model bundle");
    ModelBundle bundle;
    bundle.version = r.u32();
    if (bundle.version != 1) throw Unsupported("unsupported bundle version");

    try {
        const auto section_count = r.u32();
        struct Entry {
            std::uint32_t id;
            std::uint64_t offset;
            std::uint64_t size;
        };
        std::vector<Entry> table(section_count);
        for (auto& e : table) {
            e.id = r.u32();
            e.offset = r.u64();
            e.size = r.u64();
        }
        const std::size_t payload_base = r.position();
        const std::size_t payload_size = r.remaining();

        bool have_kern = false, have_clsf = false, have_meta = false;
        for (const Entry& e : table) {
            if (e.offset + e.size > payload_size) throw CorruptData("bundle corrupt");
            ByteReader sec(bytes.data() + payload_base + e.offset, static_cast<std::size_t>(e.size));
            if (e.id == kSecKernels) {
                bundle.kernels = decode_kernels(sec);
                have_kern = true;
            } else if (e.id == kSecClassifier) {
                bundle.classifier = decode_classifier(sec);
                have_clsf = true;
            } else if (e.id == kSecMeta) {
                bundle.config_text = sec.str();
                bundle.config_digest = sec.u64();
                have_meta = true;
            } else if (e.id == kSecQuantized) {
                bundle.qmodel = decode_quantized(sec);
                bundle.quantized = true;
            }
            // unknown sections are skipped for forward compatibility
        }
        if (!have_kern || !have_clsf || !have_meta) throw CorruptData("bundle missing section");

        const auto& k = bundle.kernels;
        const auto& c = bundle.classifier;
        const std::size_t pair_count = k.dilations.size() * k.weight_patterns.size();
        if (k.channel_assignments.size() != pair_count || k.paddings.size() != pair_count)
            throw CorruptData("bundle corrupt");
        if (c.weights.size() !=
            static_cast<std::size_t>(c.feature_count) * static_cast<std::size_t>(c.class_count))
            throw CorruptData("bundle corrupt");
        if (bundle.quantized &&
            bundle.qmodel.weights_q.size() != c.weights.size())
            throw CorruptData("bundle corrupt");
    } catch (const CorruptData&) {
        throw;
    } catch (const Error&) {
        throw CorruptData("bundle corrupt");
    }
    return bundle;
}

void save_bundle(const ModelBundle& bundle, const std::string& path) {
    detail::write_file(path, encode_bundle(bundle));
}

ModelBundle load_bundle(const std::string& path) {
    const auto bytes = detail::read_file(path);
    return decode_bundle(bytes);
}

namespace {

void emit_array(std::string& out, const char* ctype, const char* name, const char* dims,
                const std::vector<std::string>& values) {
    out += "static const ";
    out += ctype;
    out += ' ';
    out += name;
    out += dims;
    out += " = {";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i % 12 == 0) out += "\n    ";
        out += values[i];
        if (i + 1 < values.size()) out += ", ";
    }
    out += "\n};\n\n";
}

std::string int_literal(std::int64_t v, bool wide) {
    char buf[32];
    std::snprintf(buf, sizeof buf, wide ? "%" PRId64 "LL" : "%" PRId64, v);
    return buf;
}

}  // namespace

std::string export_static_arrays(const ModelBundle& bundle) {
    if (!bundle.quantized) throw StateError("quantize before export");
    const KernelSet& k = bundle.kernels;
    const QuantizedModel& q = bundle.qmodel;
    const bool wide = q.calibration.bit_width > 32;
    const char* qtype = wide ? "int64_t" : "int32_t";

    std::string out;
    out.reserve(16384);
    out += "/* Quantized inference parameters. Generated file; do not edit. */\n";
    out += "#include <stdint.h>\n\n";

    char line[128];
    const auto define = [&](const char* name, std::int64_t value) {
        std::snprintf(line, sizeof line, "#define %s %" PRId64 "\n", name, value);
        out += line;
    };
    define("RKL_KERNEL_LENGTH", k.kernel_length);
    define("RKL_KERNEL_COUNT", static_cast<std::int64_t>(k.weight_patterns.size()));
    define("RKL_WINDOW_LENGTH", k.window_length);
    define("RKL_CHANNEL_COUNT", k.channel_count);
    define("RKL_FEATURE_COUNT", k.feature_count);
    define("RKL_CLASS_COUNT", bundle.classifier.class_count);
    define("RKL_DILATION_COUNT", k.dilation_count());
    define("RKL_PAIR_COUNT", k.pair_count());
    define("RKL_BIT_WIDTH", q.calibration.bit_width);
    out += '\n';

    std::snprintf(line, sizeof line, "static const int64_t rkl_s1 = %" PRId64 "LL;\n",
                  q.calibration.s1);
    out += line;
    std::snprintf(line, sizeof line, "static const int64_t rkl_s2 = %" PRId64 "LL;\n",
                  q.calibration.s2);
    out += line;
    std::snprintf(line, sizeof line, "static const int32_t rkl_input_clamp_mg = %d;\n\n",
                  q.calibration.input_clamp_mg);
    out += line;

    std::vector<std::string> vals;
    const auto num = [](std::int64_t v) { return int_literal(v, false); };

    vals.clear();
    for (const WeightPattern& p : k.weight_patterns) {
        std::snprintf(line, sizeof line, "{%d, %d, %d}", p.positive_taps[0], p.positive_taps[1],
                      p.positive_taps[2]);
        vals.push_back(line);
    }
    emit_array(out, "uint8_t", "rkl_kernel_taps", "[RKL_KERNEL_COUNT][3]", vals);

    vals.clear();
    for (int d : k.dilations) vals.push_back(num(d));
    emit_array(out, "int32_t", "rkl_dilations", "[RKL_DILATION_COUNT]", vals);

    vals.clear();
    for (int f : k.features_per_kernel) vals.push_back(num(f));
    emit_array(out, "int32_t", "rkl_features_per_kernel", "[RKL_DILATION_COUNT]", vals);

    vals.clear();
    for (auto p : k.paddings) vals.push_back(num(p));
    emit_array(out, "uint8_t", "rkl_paddings", "[RKL_PAIR_COUNT]", vals);

    vals.clear();
    for (const auto& chans : k.channel_assignments) vals.push_back(num(chans.size()));
    emit_array(out, "uint16_t", "rkl_channel_counts", "[RKL_PAIR_COUNT]", vals);

    vals.clear();
    for (const auto& chans : k.channel_assignments)
        for (auto c : chans) vals.push_back(num(c));
    std::snprintf(line, sizeof line, "[%zu]", vals.size());
    emit_array(out, "uint16_t", "rkl_channel_indices", line, vals);

    vals.clear();
    for (auto c : k.comparison_counts) vals.push_back(num(c));
    emit_array(out, "int32_t", "rkl_comparison_counts", "[RKL_FEATURE_COUNT]", vals);

    vals.clear();
    for (auto b : q.biases_q) vals.push_back(int_literal(b, wide));
    emit_array(out, qtype, "rkl_bias_q", "[RKL_FEATURE_COUNT]", vals);

    vals.clear();
    for (auto w : q.weights_q) vals.push_back(int_literal(w, wide));
    emit_array(out, qtype, "rkl_weights_q", "[RKL_FEATURE_COUNT * RKL_CLASS_COUNT]", vals);

    vals.clear();
    for (auto b : q.clf_biases_q) vals.push_back(int_literal(b, wide));
    emit_array(out, qtype, "rkl_clf_bias_q", "[RKL_CLASS_COUNT]", vals);

    return out;
}

void emit_golden_vectors(const ModelBundle& bundle, std::span<const Window> windows,
                         const std::string& path) {
    if (!bundle.quantized) throw StateError("quantize before export");

    ByteWriter w;
    w.u32(fourcc("RKLV"));
    w.u32(1);
    w.u32(static_cast<std::uint32_t>(windows.size()));
    for (const Window& win : windows) {
        const auto xq = quantize_input(win, bundle.qmodel.calibration);
        const FeatureVector fv = transform_q(win, bundle.kernels, bundle.qmodel);
        const QuantPrediction pred = predict_q(fv, bundle.kernels, bundle.qmodel);

        w.i32(win.channels);
        w.i32(win.length);
        w.f64(win.sample_rate_hz);
        w.i32(win.label);
        w.vec(win.samples, [&](float v) { w.f32(v); });
        w.vec(xq, [&](std::int64_t v) { w.i64(v); });
        w.vec(fv.counts, [&](std::int32_t v) { w.i32(v); });
        w.vec(pred.features_q, [&](std::int64_t v) { w.i64(v); });
        w.vec(pred.scores, [&](std::int64_t v) { w.i64(v); });
        w.i32(pred.class_index);
    }
    const std::uint64_t digest = crc64(w.data().data(), w.data().size());
    w.u64(digest);
    detail::write_file(path, w.data());
}

GoldenReplayReport replay_golden_vectors(const ModelBundle& bundle, const std::string& path) {
    if (!bundle.quantized) throw StateError("quantize before export");
    const auto bytes = detail::read_file(path);
    if (bytes.size() < 20) throw CorruptData("golden vectors corrupt");
    std::uint64_t stored = 0;
    std::memcpy(&stored, bytes.data() + bytes.size() - 8, 8);
    if (crc64(bytes.data(), bytes.size() - 8) != stored)
        throw CorruptData("golden vector digest mismatch");

    ByteReader r(bytes.data(), bytes.size() - 8);
    if (r.u32() != fourcc("RKLV")) throw CorruptData("not a golden vector file");
    if (r.u32() != 1) throw Unsupported("unsupported golden vector version");
    const auto count = r.u32();

    GoldenReplayReport report;
    report.total = static_cast<int>(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        Window win;
        win.channels = r.i32();
        win.length = r.i32();
        win.sample_rate_hz = r.f64();
        win.label = r.i32();
        win.samples = r.vec<float>([&] { return r.f32(); });
        const auto xq = r.vec<std::int64_t>([&] { return r.i64(); });
        const auto counts = r.vec<std::int32_t>([&] { return r.i32(); });
        const auto tq = r.vec<std::int64_t>([&] { return r.i64(); });
        const auto scores = r.vec<std::int64_t>([&] { return r.i64(); });
        const auto kstar = r.i32();

        const auto xq2 = quantize_input(win, bundle.qmodel.calibration);
        const FeatureVector fv = transform_q(win, bundle.kernels, bundle.qmodel);
        const QuantPrediction pred = predict_q(fv, bundle.kernels, bundle.qmodel);
        const bool ok = xq2 == xq && fv.counts == counts && pred.features_q == tq &&
                        pred.scores == scores && pred.class_index == kstar;
        if (!ok) ++report.mismatches;
    }
    return report;
}

MemoryReport estimate_memory(const ModelBundle& bundle) {
    if (!bundle.quantized) throw StateError("quantize before export");
    const KernelSet& k = bundle.kernels;
    const int T = k.feature_count;
    const int K = bundle.classifier.class_count;
    const std::int64_t elem = bundle.qmodel.calibration.bit_width > 32 ? 8 : 4;

    std::int64_t channel_index_count = 0;
    for (const auto& chans : k.channel_assignments)
        channel_index_count += static_cast<std::int64_t>(chans.size());

    MemoryReport rep;
    auto& p = rep.parameter_breakdown;
    p["kernel taps"] = static_cast<std::int64_t>(k.weight_patterns.size()) * 3;
    p["dilation table"] = static_cast<std::int64_t>(k.dilations.size()) * 8;
    p["paddings"] = k.pair_count();
    p["channel table"] = k.pair_count() * 2 + channel_index_count * 2;
    p["feature biases"] = std::int64_t{4} * T;
    p["comparison counts"] = std::int64_t{4} * T;
    p["classifier weights"] = elem * T * K;
    p["classifier biases"] = elem * K;
    p["scalars"] = 36;  // S1, S2, clamp, window/channel/feature/class dims

    auto& wk = rep.working_breakdown;
    const std::int64_t window_values = std::int64_t{4} * k.channel_count * k.window_length;
    wk["raw window"] = window_values;
    wk["quantized window"] = window_values;
    wk["convolution output"] = std::int64_t{4} * k.window_length;
    wk["feature counts"] = std::int64_t{4} * T;
    wk["quantized features"] = elem * T;
    wk["scores"] = elem * K;

    for (const auto& [name, bytes] : p) rep.parameter_bytes += bytes;
    for (const auto& [name, bytes] : wk) rep.working_buffer_bytes += bytes;
    return rep;
}

}  // namespace rkl
