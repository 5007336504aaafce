#include "rocketlite/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "rocketlite/errors.hpp"
#include "rocketlite/rng.hpp"

namespace rkl {

std::vector<double> design_fir_lowpass(double target_rate_hz, double source_rate_hz, int taps) {
    if (target_rate_hz <= 0 || source_rate_hz <= 0) throw InvalidArgument("rates must be positive");
    if (target_rate_hz >= source_rate_hz) throw Unsupported("upsampling not supported");
    if (taps < 11 || taps % 2 == 0) throw InvalidArgument("taps must be odd and >= 11");

    const double cutoff = 0.45 * target_rate_hz;
    const double fc = cutoff / source_rate_hz;  // cycles per sample
    const int mid = (taps - 1) / 2;

    std::vector<double> h(taps);
    for (int i = 0; i < taps; ++i) {
        const double n = i - mid;
        const double x = 2.0 * fc * n;
        const double sinc = n == 0 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
        const double hamming = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * i / (taps - 1));
        h[i] = 2.0 * fc * sinc * hamming;
    }
    const double sum = std::accumulate(h.begin(), h.end(), 0.0);
    for (double& v : h) v /= sum;
    return h;
}

namespace {

// Reduces a rate pair to an upsample/decimate ratio L/M with small integer
// terms. Rates with up to six decimal places are representable.
struct Ratio {
    std::int64_t up;    // L
    std::int64_t down;  // M
};

Ratio rational_ratio(double target, double source) {
    const double scale = 1e6;
    const auto ti = static_cast<std::int64_t>(std::llround(target * scale));
    const auto si = static_cast<std::int64_t>(std::llround(source * scale));
    if (ti <= 0 || si <= 0 || std::abs(target * scale - ti) > 1e-3 ||
        std::abs(source * scale - si) > 1e-3)
        throw Unsupported("unsupported rate pair");
    const std::int64_t g = std::gcd(ti, si);
    Ratio r{ti / g, si / g};
    if (r.up > 1024 || r.down > 1024) throw Unsupported("unsupported rate pair");
    return r;
}

}  // namespace

Recording resample(const Recording& rec, double target_rate_hz, int taps) {
    if (rec.source_rate_hz <= 0) throw InvalidArgument("recording has no sample rate");
    if (target_rate_hz == rec.source_rate_hz) return rec;

    const Ratio ratio = rational_ratio(target_rate_hz, rec.source_rate_hz);
    const std::int64_t up = ratio.up, down = ratio.down;

    // Anti-alias filter at the upsampled rate, with gain L folded in.
    std::vector<double> h = design_fir_lowpass(target_rate_hz, rec.source_rate_hz * up, taps);
    for (double& v : h) v *= static_cast<double>(up);

    const auto n = static_cast<std::int64_t>(rec.sample_count());
    const std::int64_t out_n = n * up / down;
    const std::int64_t delay = (taps - 1) / 2;  // group-delay compensation

    Recording out;
    out.id = rec.id;
    out.brand = rec.brand;
    out.family = rec.family;
    out.activity = rec.activity;
    out.source_rate_hz = target_rate_hz;
    out.channels = rec.channels;
    out.samples.resize(static_cast<std::size_t>(out_n) * rec.channels);
    out.labels.resize(out_n);
    if (out_n == 0) return out;

    for (int c = 0; c < rec.channels; ++c) {
        const float* x = rec.samples.data() + static_cast<std::size_t>(c) * n;
        float* y = out.samples.data() + static_cast<std::size_t>(c) * out_n;
        for (std::int64_t j = 0; j < out_n; ++j) {
            const std::int64_t center = j * down + delay;  // upsampled-stream index
            double acc = 0.0;
            for (int i = 0; i < taps; ++i) {
                const std::int64_t q = center - i;
                if (q % up != 0) continue;
                const std::int64_t src = q / up;
                if (src >= 0 && src < n) acc += h[i] * x[src];
            }
            y[j] = static_cast<float>(acc);
        }
    }
    for (std::int64_t j = 0; j < out_n; ++j) {
        const std::int64_t src = std::clamp<std::int64_t>((j * down + up / 2) / up, 0, n - 1);
        out.labels[j] = rec.labels[src];
    }
    return out;
}

Recording l1_norm(const Recording& rec) {
    if (rec.channels != 3) throw InvalidArgument("expected tri-axial input");
    const std::size_t n = rec.sample_count();

    Recording out;
    out.id = rec.id;
    out.brand = rec.brand;
    out.family = rec.family;
    out.activity = rec.activity;
    out.source_rate_hz = rec.source_rate_hz;
    out.channels = 1;
    out.labels = rec.labels;
    out.samples.resize(n);
    const float* x = rec.samples.data();
    const float* y = x + n;
    const float* z = y + n;
    for (std::size_t i = 0; i < n; ++i)
        out.samples[i] = std::fabs(x[i]) + std::fabs(y[i]) + std::fabs(z[i]);
    return out;
}

std::vector<Window> enumerate_pure_windows(const Recording& rec, int window_len) {
    if (window_len < 1) throw InvalidArgument("window length must be positive");
    const auto n = static_cast<std::int64_t>(rec.sample_count());

    std::vector<Window> windows;
    for (std::int64_t start = 0; start + window_len <= n; start += window_len) {
        const std::uint16_t label = rec.labels[start];
        bool pure = true;
        for (int i = 1; i < window_len && pure; ++i) pure = rec.labels[start + i] == label;
        if (!pure) continue;

        Window w;
        w.channels = rec.channels;
        w.length = window_len;
        w.sample_rate_hz = rec.source_rate_hz;
        w.label = label;
        w.recording_id = rec.id;
        w.brand = rec.brand;
        w.start_sample = start;
        w.samples.resize(static_cast<std::size_t>(rec.channels) * window_len);
        for (int c = 0; c < rec.channels; ++c)
            for (int i = 0; i < window_len; ++i)
                w.at(c, i) = rec.at(c, start + i);
        windows.push_back(std::move(w));
    }
    return windows;
}

namespace {

void seeded_shuffle(std::vector<Window>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i)
        std::swap(v[i - 1], v[rng.below(i)]);
}

}  // namespace

DatasetSplit window_dataset(std::span<const Recording> recordings, const WindowingOptions& opt) {
    if (opt.window_len < 1) throw InvalidArgument("window length must be positive");
    if (opt.train_count < 0 || opt.val_count < 0) throw InvalidArgument("negative window count");
    if (opt.train_count % 2 != 0 || opt.val_count % 2 != 0)
        throw InvalidArgument("cannot balance: counts must be even");

    std::vector<Window> by_class[2];
    for (const Recording& rec : recordings) {
        for (Window& w : enumerate_pure_windows(rec, opt.window_len)) {
            if (w.label != 0 && w.label != 1) throw InvalidArgument("labels must be binary");
            by_class[w.label].push_back(std::move(w));
        }
    }

    const int per_class_train = opt.train_count / 2;
    const int per_class_val = opt.val_count / 2;
    for (int c = 0; c < 2; ++c) {
        const std::size_t need = per_class_train + per_class_val;
        if (by_class[c].size() < need)
            throw InvalidArgument(std::string("cannot balance: class ") + kClassNames[c] +
                                  " exhausted");
    }

    Rng rng(opt.seed, "windows");
    DatasetSplit split;
    split.policy = "windowed";
    for (int c = 0; c < 2; ++c) {
        seeded_shuffle(by_class[c], rng);
        auto it = by_class[c].begin();
        split.train.insert(split.train.end(), std::make_move_iterator(it),
                           std::make_move_iterator(it + per_class_train));
        it += per_class_train;
        split.validation.insert(split.validation.end(), std::make_move_iterator(it),
                                std::make_move_iterator(it + per_class_val));
    }
    seeded_shuffle(split.train, rng);
    seeded_shuffle(split.validation, rng);
    return split;
}

DatasetSplit split_by_brand(std::span<const Recording> recordings, const std::string& train_brand,
                            const WindowingOptions& opt) {
    std::vector<Recording> train_recs;
    std::vector<const Recording*> test_recs;
    bool brand_seen = false;
    for (const Recording& rec : recordings) {
        if (rec.brand == train_brand) {
            brand_seen = true;
            train_recs.push_back(rec);
        } else {
            test_recs.push_back(&rec);
        }
    }
    if (!brand_seen) throw InvalidArgument("brand not found");

    DatasetSplit split = window_dataset(train_recs, opt);
    split.policy = "brand-held-out:" + train_brand;
    for (const Recording* rec : test_recs) {
        auto windows = enumerate_pure_windows(*rec, opt.window_len);
        split.test.insert(split.test.end(), std::make_move_iterator(windows.begin()),
                          std::make_move_iterator(windows.end()));
    }
    if (split.test.empty())
        split.warnings.push_back("single-brand corpus: test set is empty");
    return split;
}

}  // namespace rkl
