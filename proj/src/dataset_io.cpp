#include "rocketlite/dataset_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "rocketlite/detail/binio.hpp"
#include "rocketlite/errors.hpp"

namespace rkl {

namespace detail {

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    in.seekg(0, std::ios::end);
    const auto size = static_cast<std::size_t>(in.tellg());
    in.seekg(0, std::ios::beg);
    std::vector<std::uint8_t> bytes(size);
    if (size > 0) in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size));
    if (!in) throw IoError("cannot read " + path);
    return bytes;
}

void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    if (!bytes.empty())
        out.write(reinterpret_cast<const char*>(bytes.data()),
                  static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw IoError("cannot write " + path);
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) throw IoError("cannot write " + path);
}

std::string read_text_file(const std::string& path) {
    const auto bytes = read_file(path);
    return std::string(reinterpret_cast<const char*>(bytes.data()), bytes.size());
}

}  // namespace detail

namespace {

constexpr char kCsvHeader[] = "t_s,ax_mg,ay_mg,az_mg,label";

std::string sidecar_path(const std::string& csv_path) { return csv_path + ".json"; }

}  // namespace

void save_recording_csv(const Recording& rec, const std::string& csv_path) {
    if (rec.channels != 3) throw InvalidArgument("expected tri-axial recording");
    const std::int64_t n = rec.sample_count();
    if (static_cast<std::int64_t>(rec.labels.size()) != n)
        throw InvalidArgument("label count mismatch");

    std::string text;
    text.reserve(static_cast<std::size_t>(n) * 48 + 32);
    text += kCsvHeader;
    text += '\n';
    char line[160];
    for (std::int64_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / rec.source_rate_hz;
        std::snprintf(line, sizeof line, "%.6f,%.9g,%.9g,%.9g,%d\n", t, rec.at(0, i), rec.at(1, i),
                      rec.at(2, i), static_cast<int>(rec.labels[i]));
        text += line;
    }
    detail::write_text_file(csv_path, text);

    nlohmann::json meta;
    meta["brand"] = rec.brand;
    meta["family"] = rec.family;
    meta["activity"] = rec.activity;
    meta["source_rate_hz"] = rec.source_rate_hz;
    detail::write_text_file(sidecar_path(csv_path), meta.dump(2) + "\n");
}

Recording load_recording_csv(const std::string& csv_path) {
    const std::string text = detail::read_text_file(csv_path);

    Recording rec;
    rec.id = std::filesystem::path(csv_path).stem().string();
    rec.channels = 3;

    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(detail::read_text_file(sidecar_path(csv_path)));
    } catch (const nlohmann::json::exception&) {
        throw CorruptData("bad sidecar: " + sidecar_path(csv_path));
    }
    rec.brand = meta.value("brand", "");
    rec.family = meta.value("family", "");
    rec.activity = meta.value("activity", "");
    rec.source_rate_hz = meta.value("source_rate_hz", 0.0);
    if (rec.source_rate_hz <= 0) throw CorruptData("bad sidecar: missing source_rate_hz");

    std::size_t pos = text.find('\n');
    if (pos == std::string::npos || text.compare(0, pos, kCsvHeader) != 0)
        throw CorruptData("bad csv header: " + csv_path);
    ++pos;

    std::vector<double> t;
    std::vector<float> x, y, z;
    std::vector<std::uint16_t> labels;
    const char* p = text.c_str() + pos;
    const char* end = text.c_str() + text.size();
    while (p < end) {
        if (*p == '\n' || *p == '\r') {
            ++p;
            continue;
        }
        char* next = nullptr;
        double vals[5];
        for (int f = 0; f < 5; ++f) {
            vals[f] = std::strtod(p, &next);
            if (next == p) throw CorruptData("bad csv row: " + csv_path);
            p = next;
            if (f < 4) {
                if (*p != ',') throw CorruptData("bad csv row: " + csv_path);
                ++p;
            }
        }
        t.push_back(vals[0]);
        x.push_back(static_cast<float>(vals[1]));
        y.push_back(static_cast<float>(vals[2]));
        z.push_back(static_cast<float>(vals[3]));
        labels.push_back(static_cast<std::uint16_t>(vals[4]));
        while (p < end && *p != '\n') ++p;
    }

    const std::int64_t n = static_cast<std::int64_t>(t.size());
    if (n == 0) throw CorruptData("empty recording: " + csv_path);
    const double dt = 1.0 / rec.source_rate_hz;
    for (std::int64_t i = 1; i < n; ++i)
        if (t[i] <= t[i - 1]) throw CorruptData("timestamps not increasing: " + csv_path);

    double max_dev = 0.0;
    for (std::int64_t i = 0; i < n; ++i)
        max_dev = std::max(max_dev, std::abs(t[i] - static_cast<double>(i) * dt));

    if (max_dev < 0.25 * dt) {
        rec.samples.resize(static_cast<std::size_t>(3) * n);
        std::copy(x.begin(), x.end(), rec.samples.begin());
        std::copy(y.begin(), y.end(), rec.samples.begin() + n);
        std::copy(z.begin(), z.end(), rec.samples.begin() + 2 * n);
        rec.labels = std::move(labels);
        return rec;
    }

    // Jittered timestamps: resample onto the uniform grid by linear
    // interpolation, nearest-sample labels.
    const auto out_n = static_cast<std::int64_t>(std::floor(t.back() / dt)) + 1;
    rec.samples.resize(static_cast<std::size_t>(3) * out_n);
    rec.labels.resize(out_n);
    std::int64_t i = 0;
    for (std::int64_t j = 0; j < out_n; ++j) {
        const double tj = static_cast<double>(j) * dt;
        while (i + 1 < n && t[i + 1] < tj) ++i;
        if (tj <= t[0]) {
            rec.samples[j] = x[0];
            rec.samples[out_n + j] = y[0];
            rec.samples[2 * out_n + j] = z[0];
            rec.labels[j] = labels[0];
            continue;
        }
        const double u = (tj - t[i]) / (t[i + 1] - t[i]);
        rec.samples[j] = static_cast<float>(x[i] + u * (x[i + 1] - x[i]));
        rec.samples[out_n + j] = static_cast<float>(y[i] + u * (y[i + 1] - y[i]));
        rec.samples[2 * out_n + j] = static_cast<float>(z[i] + u * (z[i + 1] - z[i]));
        rec.labels[j] = labels[u < 0.5 ? i : i + 1];
    }
    return rec;
}

void save_corpus_dir(std::span<const Recording> recordings, const std::string& dir) {
    std::filesystem::create_directories(dir);
    for (const Recording& rec : recordings) {
        if (rec.id.empty()) throw InvalidArgument("recording id must not be empty");
        save_recording_csv(rec, (std::filesystem::path(dir) / (rec.id + ".csv")).string());
    }
}

std::vector<Recording> load_corpus_dir(const std::string& dir) {
    if (!std::filesystem::is_directory(dir)) throw IoError("no such corpus directory: " + dir);
    std::vector<std::string> paths;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".csv")
            paths.push_back(entry.path().string());
    std::sort(paths.begin(), paths.end());
    std::vector<Recording> corpus;
    corpus.reserve(paths.size());
    for (const std::string& path : paths) corpus.push_back(load_recording_csv(path));
    return corpus;
}

void save_window_archive(std::span<const Window> windows, const std::string& path) {
    detail::ByteWriter w;
    w.bytes("RKLW", 4);
    w.u32(1);
    const int len = windows.empty() ? 0 : windows.front().length;
    const int ch = windows.empty() ? 0 : windows.front().channels;
    const double rate = windows.empty() ? 0.0 : windows.front().sample_rate_hz;
    w.u32(static_cast<std::uint32_t>(len));
    w.u32(static_cast<std::uint32_t>(ch));
    w.u32(static_cast<std::uint32_t>(windows.size()));
    w.f64(rate);
    for (const Window& win : windows) {
        if (win.length != len || win.channels != ch)
            throw InvalidArgument("windows must share shape");
        for (float v : win.samples) w.f32(v);
        w.u16(win.label < 0 ? std::uint16_t{0xFFFF} : static_cast<std::uint16_t>(win.label));
    }
    detail::write_file(path, w.data());
}

std::vector<Window> load_window_archive(const std::string& path) {
    const auto bytes = detail::read_file(path);
    detail::ByteReader r(bytes.data(), bytes.size());
    if (std::memcmp(r.take(4), "RKLW", 4) != 0) throw CorruptData("not a window archive: " + path);
    const auto version = r.u32();
    if (version != 1) throw Unsupported("unsupported archive version");
    const auto len = r.u32();
    const auto ch = r.u32();
    const auto count = r.u32();
    const double rate = r.f64();

    std::vector<Window> windows;
    windows.reserve(count);
    for (std::uint32_t k = 0; k < count; ++k) {
        Window win;
        win.length = static_cast<int>(len);
        win.channels = static_cast<int>(ch);
        win.sample_rate_hz = rate;
        win.samples.resize(static_cast<std::size_t>(len) * ch);
        for (float& v : win.samples) v = r.f32();
        const auto lab = r.u16();
        win.label = lab == 0xFFFF ? -1 : static_cast<int>(lab);
        windows.push_back(std::move(win));
    }
    if (r.remaining() != 0) throw CorruptData("trailing bytes in window archive: " + path);
    return windows;
}

}  // namespace rkl
