#pragma once

#include <span>
#include <string>
#include <vector>

#include "rocketlite/signal.hpp"
#include "rocketlite/window.hpp"

namespace rkl {

// Recording CSV: header `t_s,ax_mg,ay_mg,az_mg,label`, one sample per row,
// with a JSON sidecar `<path>.json` holding {brand, family, activity,
// source_rate_hz}. Loading tolerates timestamp jitter: non-uniform t_s is
// linearly interpolated onto the uniform source-rate grid.
void save_recording_csv(const Recording& rec, const std::string& csv_path);
Recording load_recording_csv(const std::string& csv_path);

// A corpus directory is a flat set of *.csv files with sidecars; the
// recording id is the file stem.
void save_corpus_dir(std::span<const Recording> recordings, const std::string& dir);
std::vector<Recording> load_corpus_dir(const std::string& dir);

// Window archive, little-endian: magic "RKLW", u32 version, u32 window_len,
// u32 channels, u32 count, f64 sample_rate_hz, then per window f32 samples
// (channel-major) and a u16 label (0xFFFF = unlabeled). Provenance fields
// (recording id, brand, start offset) are in-memory only.
void save_window_archive(std::span<const Window> windows, const std::string& path);
std::vector<Window> load_window_archive(const std::string& path);

}  // namespace rkl
