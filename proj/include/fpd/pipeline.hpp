#pragma once

#include "fpd/dtc.hpp"
#include "fpd/mcmd.hpp"
#include "fpd/metrics.hpp"
#include "fpd/mpd.hpp"
#include "fpd/tracks.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fpd {

// True-condition labels for one video, produced by the scene generator.
// Categories in reports come from these, never from the pipeline's own point
// flags, so misclassifications stay visible.
struct VideoLabels {
    bool camera_moving = false;
    std::vector<std::uint8_t> point_static;
};

struct VideoJob {
    std::string name;
    std::filesystem::path frames_dir;
    std::optional<std::filesystem::path> manifest;
    std::map<std::string, std::filesystem::path> sources;
    std::optional<std::filesystem::path> gt;
    std::optional<std::filesystem::path> labels;
};

struct PipelineConfig {
    std::vector<VideoJob> videos;
    FusionPolicy policy;
    McmdConfig mcmd;
    MpdConfig mpd;
    MetricsConfig metrics;
    std::filesystem::path out_dir; // empty: keep results in memory only
};

// Category AJ cells; a cell is absent when the video set has no points in
// that category. Static-camera videos contribute sc_sp/sc_mp, moving-camera
// videos contribute mc_mp (camera motion moves every image-space track).
struct CategoryAj {
    std::optional<double> sc_sp;
    std::optional<double> sc_mp;
    std::optional<double> mc_mp;
};

struct VideoResult {
    std::string name;
    CameraMotionResult camera;
    PointMotionFlags flags;
    TrackSet fused;
    std::optional<MetricsReport> report;
    CategoryAj categories;
};

struct PipelineResult {
    std::vector<VideoResult> videos;
    std::optional<double> aggregate_aj; // unweighted mean over videos with gt
    CategoryAj aggregate_categories;
};

// cfg.json mirrors PipelineConfig; "videos" is an array of jobs (or the job
// fields may sit at the top level for a single video), "policy" is a path or
// an inline object, and "mcmd"/"mpd"/"metrics" override defaults field by
// field. Relative paths resolve against the config file's directory.
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

// Camera detection, point detection (skipped for moving cameras), fusion,
// then optional scoring against ground truth. When cfg.out_dir is set, every
// stage's report is written under out_dir/<video>/ and a summary.json at the
// top. Errors carry the video name and stage.
PipelineResult run_pipeline(const PipelineConfig& cfg);

struct SweepRow {
    double value = 0.0;
    CategoryAj categories;
    double aj = 0.0;
    // Static flags summed over all videos where point detection ran; not a
    // CSV column, but handy for monotonicity checks.
    long long static_flag_count = 0;
};

// Re-runs only the stages a parameter affects: camera detection is computed
// once per video when sweeping rho, and frames/tracks are loaded once for
// all values. param is one of rho | lambda_coarse | lambda_fine | eta.
// Requires ground truth and at least two values.
std::vector<SweepRow> sweep(const PipelineConfig& cfg, const std::string& param,
                            std::span<const double> values);

// Header "value,sc_sp_aj,sc_mp_aj,mc_mp_aj,aj"; absent category cells stay
// empty. Decimal formatting is fixed, so bytes are stable across runs.
std::string sweep_csv(std::span<const SweepRow> rows);

} // namespace fpd
