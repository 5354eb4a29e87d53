// fpd — trajectory discrimination and fusion toolchain.
//
// Subcommands: synth, detect-camera, detect-points, tracks, fuse, evaluate,
// pipeline, sweep. Exit codes: 0 success, 2 config error, 3 input-format
// error, 4 internal invariant violation.

#include "fpd/dtc.hpp"
#include "fpd/error.hpp"
#include "fpd/mcmd.hpp"
#include "fpd/metrics.hpp"
#include "fpd/mpd.hpp"
#include "fpd/pipeline.hpp"
#include "fpd/reports.hpp"
#include "fpd/synth.hpp"
#include "fpd/tracks.hpp"
#include "fpd/video_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path);
    if (!out)
        throw fpd::ConfigError("cannot write: " + out_path);
    out << text;
}

std::optional<fs::path> optional_path(const std::string& s) {
    return s.empty() ? std::nullopt : std::optional<fs::path>(s);
}

std::vector<double> parse_csv_doubles(const std::string& s) {
    std::vector<double> values;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t pos = 0;
            values.push_back(std::stod(item, &pos));
            if (pos != item.size())
                throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw fpd::ConfigError("bad numeric list entry '" + item + "'");
        }
    }
    return values;
}

// ---- synth ----------------------------------------------------------------

int cmd_synth(const std::string& spec_path, const std::string& out_dir, bool ppm) {
    const fpd::SceneFile file = fpd::load_scene_file(spec_path);
    const fpd::SceneOutput scene = fpd::generate_scene(file.scene);
    fpd::write_scene(scene, file.degradations, out_dir, ppm);
    ordered_json j;
    j["frames"] = scene.video.frame_count();
    j["width"] = scene.video.width;
    j["height"] = scene.video.height;
    j["num_points"] = scene.ground_truth.num_points;
    j["camera_moving"] = scene.camera_moving;
    j["out_dir"] = out_dir;
    std::cout << j.dump(2) << "\n";
    return 0;
}

// ---- detect-camera ---------------------------------------------------------

int cmd_detect_camera(const std::string& frames_dir, const std::string& manifest,
                      const fpd::McmdConfig& cfg, const std::string& dump_ssim,
                      const std::string& out) {
    const fpd::VideoSequence video =
        fpd::load_frame_sequence(frames_dir, optional_path(manifest));
    const fpd::CameraMotionResult result = fpd::detect_camera_motion(video, cfg);
    if (!dump_ssim.empty()) {
        std::ostringstream csv;
        csv << "index,ssim\n";
        for (std::size_t t = 0; t < result.coarse_ssim.size(); ++t)
            csv << t << "," << fpd::csv_number(result.coarse_ssim[t]) << "\n";
        emit(csv.str(), dump_ssim);
    }
    ordered_json j = fpd::to_json(result);
    j["fps"] = video.fps;
    j["num_frames"] = video.frame_count();
    emit(j.dump(2) + "\n", out);
    return 0;
}

// ---- detect-points ---------------------------------------------------------

int cmd_detect_points(const std::string& tracks_path, const fpd::MpdConfig& cfg,
                      const std::string& out) {
    const fpd::TrackSet tracks = fpd::load_tracks(tracks_path);
    const fpd::PointMotionFlags flags = fpd::detect_static_points(tracks, cfg);
    emit(fpd::to_json(flags).dump(2) + "\n", out);
    return 0;
}

// ---- tracks info -----------------------------------------------------------

int cmd_tracks_info(const std::string& path) {
    const fpd::TrackSet ts = fpd::load_tracks(path);
    std::size_t visible = 0;
    for (auto v : ts.visibility)
        visible += v ? 1 : 0;
    ordered_json j;
    j["num_points"] = ts.num_points;
    j["num_frames"] = ts.num_frames;
    j["width"] = ts.width;
    j["height"] = ts.height;
    j["visible_slots"] = visible;
    j["visible_fraction"] =
        static_cast<double>(visible) / static_cast<double>(ts.visibility.size());
    std::cout << j.dump(2) << "\n";
    return 0;
}

// ---- fuse ------------------------------------------------------------------

int cmd_fuse(const std::string& frames_dir, const std::vector<std::string>& source_args,
             const std::string& policy_path, bool stabilize, const std::string& out_path,
             const fpd::McmdConfig& mcmd_cfg, const fpd::MpdConfig& mpd_cfg) {
    std::map<std::string, fpd::TrackSet> sources;
    for (const auto& arg : source_args) {
        const auto eq = arg.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == arg.size())
            throw fpd::ConfigError("--source expects NAME=FILE, got '" + arg + "'");
        const std::string label = arg.substr(0, eq);
        fpd::TrackSet ts = fpd::load_tracks(arg.substr(eq + 1));
        ts.source_name = label;
        sources.emplace(label, std::move(ts));
    }
    fpd::FusionPolicy policy = fpd::load_policy(policy_path);
    if (stabilize)
        policy.stabilize_static = true;

    const fpd::VideoSequence video = fpd::load_frame_sequence(frames_dir);
    const fpd::CameraMotionResult camera = fpd::detect_camera_motion(video, mcmd_cfg);
    const fpd::FusionResult result = fpd::fuse(sources, camera, policy, mpd_cfg);
    fpd::save_tracks(result.tracks, out_path, fpd::TrackFormat::binary);

    ordered_json j;
    j["camera_moving"] = camera.moving;
    j["mpd_computed"] = result.flags.computed;
    if (result.flags.computed) {
        int n_static = 0;
        for (auto f : result.flags.static_flags)
            n_static += f ? 1 : 0;
        j["static_points"] = n_static;
        j["moving_points"] = result.flags.num_points() - n_static;
    }
    j["out"] = out_path;
    std::cout << j.dump(2) << "\n";
    return 0;
}

// ---- evaluate ----------------------------------------------------------------

int cmd_evaluate(const std::string& pred, const std::string& gt, const std::string& pred_dir,
                 const std::string& gt_dir, const fpd::MetricsConfig& cfg,
                 const std::string& out) {
    if (!pred.empty()) {
        const fpd::TrackSet p = fpd::load_tracks(pred);
        const fpd::TrackSet g = fpd::load_tracks(gt);
        const fpd::MetricsReport report = fpd::average_jaccard(p, g, cfg);
        emit(fpd::to_json(report).dump(2) + "\n", out);
        return 0;
    }

    // Directory mode: pair files by name, one CSV row per video plus a final
    // unweighted aggregate row.
    std::vector<fs::path> preds;
    for (const auto& entry : fs::directory_iterator(pred_dir))
        if (entry.is_regular_file())
            preds.push_back(entry.path());
    std::sort(preds.begin(), preds.end());
    if (preds.empty())
        throw fpd::ConfigError("no prediction files in " + pred_dir);

    std::ostringstream csv;
    csv << "name,aj";
    for (double t : cfg.thresholds)
        csv << ",jaccard_" << t;
    csv << "\n";
    double sum = 0.0;
    int n = 0;
    for (const auto& pp : preds) {
        const fs::path gp = fs::path(gt_dir) / pp.filename();
        if (!fs::exists(gp))
            throw fpd::ConfigError("no ground truth for " + pp.filename().string() + " in " +
                                   gt_dir);
        const fpd::MetricsReport report =
            fpd::average_jaccard(fpd::load_tracks(pp), fpd::load_tracks(gp), cfg);
        csv << pp.stem().string() << "," << fpd::csv_number(report.average_jaccard);
        for (const auto& c : report.per_threshold)
            csv << "," << fpd::csv_number(c.jaccard());
        csv << "\n";
        sum += report.average_jaccard;
        ++n;
    }
    csv << "aggregate," << fpd::csv_number(sum / n);
    for (std::size_t i = 0; i < cfg.thresholds.size(); ++i)
        csv << ",";
    csv << "\n";
    emit(csv.str(), out);
    return 0;
}

// ---- pipeline / sweep --------------------------------------------------------

int cmd_pipeline(const std::string& config_path, const std::string& gt_override) {
    fpd::PipelineConfig cfg = fpd::load_pipeline_config(config_path);
    if (!gt_override.empty()) {
        if (cfg.videos.size() != 1)
            throw fpd::ConfigError("--gt override needs a single-video config");
        cfg.videos[0].gt = fs::path(gt_override);
    }
    const fpd::PipelineResult result = fpd::run_pipeline(cfg);
    ordered_json j;
    j["videos"] = result.videos.size();
    j["aggregate_aj"] = result.aggregate_aj ? ordered_json(*result.aggregate_aj) : ordered_json();
    if (!cfg.out_dir.empty())
        j["out_dir"] = cfg.out_dir.string();
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& param,
              const std::string& values_arg, const std::string& out) {
    const fpd::PipelineConfig cfg = fpd::load_pipeline_config(config_path);
    const std::vector<double> values = parse_csv_doubles(values_arg);
    const std::vector<fpd::SweepRow> rows = fpd::sweep(cfg, param, values);
    emit(fpd::sweep_csv(rows), out);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"point-track discrimination, fusion and evaluation toolchain"};
    app.require_subcommand(1);

    // synth
    std::string synth_spec, synth_out;
    bool synth_ppm = false;
    auto* synth = app.add_subcommand("synth", "render a synthetic scene with ground-truth tracks");
    synth->add_option("--spec", synth_spec, "scene.json")->required();
    synth->add_option("--out-dir", synth_out, "output directory")->required();
    synth->add_flag("--ppm", synth_ppm, "write PPM frames instead of PNG");

    // detect-camera
    std::string dc_frames, dc_manifest, dc_dump, dc_out;
    fpd::McmdConfig dc_cfg;
    auto* dc = app.add_subcommand("detect-camera", "static/moving camera verdict for a video");
    dc->add_option("--frames", dc_frames, "frame directory")->required();
    dc->add_option("--manifest", dc_manifest, "manifest.json path");
    dc->add_option("--lambda-coarse", dc_cfg.lambda_coarse, "coarse SSIM threshold");
    dc->add_option("--lambda-fine", dc_cfg.lambda_fine, "fine SSIM threshold");
    dc->add_option("--eta", dc_cfg.eta, "dissimilar-fraction threshold");
    dc->add_option("--clip-seconds", dc_cfg.clip_seconds, "fine clip length in seconds");
    dc->add_option("--dump-ssim", dc_dump, "write per-frame coarse SSIM CSV here");
    dc->add_option("--out", dc_out, "write the JSON report here instead of stdout");

    // detect-points
    std::string dp_tracks, dp_out;
    fpd::MpdConfig dp_cfg;
    auto* dp = app.add_subcommand("detect-points", "static/moving flag per tracked point");
    dp->add_option("--tracks", dp_tracks, "track file")->required();
    dp->add_option("--rho", dp_cfg.rho, "deviation threshold (normalized units)");
    dp->add_option("--min-visible", dp_cfg.min_visible, "minimum visible frames for evidence");
    dp->add_option("--out", dp_out, "write the JSON report here instead of stdout");

    // tracks info
    std::string ti_file;
    auto* tracks_cmd = app.add_subcommand("tracks", "track file utilities");
    tracks_cmd->require_subcommand(1);
    auto* ti = tracks_cmd->add_subcommand("info", "print shape and visibility statistics");
    ti->add_option("file", ti_file, "track file")->required();

    // fuse
    std::string fu_frames, fu_policy, fu_out;
    std::vector<std::string> fu_sources;
    bool fu_stabilize = false;
    fpd::McmdConfig fu_mcmd;
    fpd::MpdConfig fu_mpd;
    auto* fu = app.add_subcommand("fuse", "fuse track sources per camera/point verdicts");
    fu->add_option("--frames", fu_frames, "frame directory")->required();
    fu->add_option("--source", fu_sources, "NAME=FILE (repeatable)")->required();
    fu->add_option("--policy", fu_policy, "policy.json")->required();
    fu->add_flag("--stabilize", fu_stabilize, "snap static tracks to their median");
    fu->add_option("--out", fu_out, "output track file")->required();
    fu->add_option("--rho", fu_mpd.rho, "deviation threshold");

    // evaluate
    std::string ev_pred, ev_gt, ev_pred_dir, ev_gt_dir, ev_thresholds, ev_out;
    bool ev_include_query = false;
    fpd::MetricsConfig ev_cfg;
    auto* ev = app.add_subcommand("evaluate", "Jaccard metrics against ground truth");
    ev->add_option("--pred", ev_pred, "predicted track file");
    ev->add_option("--gt", ev_gt, "ground-truth track file");
    ev->add_option("--pred-dir", ev_pred_dir, "directory of predicted track files");
    ev->add_option("--gt-dir", ev_gt_dir, "directory of ground-truth track files");
    ev->add_option("--thresholds", ev_thresholds, "comma-separated pixel radii");
    ev->add_option("--eval-width", ev_cfg.eval_width, "metric-space width");
    ev->add_option("--eval-height", ev_cfg.eval_height, "metric-space height");
    ev->add_flag("--include-query-frame", ev_include_query, "score the query frame too");
    ev->add_option("--out", ev_out, "write the report here instead of stdout");

    // pipeline
    std::string pl_config, pl_gt;
    auto* pl = app.add_subcommand("pipeline", "run detection, fusion and scoring end to end");
    pl->add_option("--config", pl_config, "cfg.json")->required();
    pl->add_option("--gt", pl_gt, "ground-truth override for single-video configs");

    // sweep
    std::string sw_config, sw_param, sw_values, sw_out;
    auto* sw = app.add_subcommand("sweep", "parameter sensitivity table");
    sw->add_option("--config", sw_config, "cfg.json")->required();
    sw->add_option("--param", sw_param, "rho | lambda_coarse | lambda_fine | eta")->required();
    sw->add_option("--values", sw_values, "comma-separated values")->required();
    sw->add_option("--out", sw_out, "write the CSV here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (synth->parsed())
            return cmd_synth(synth_spec, synth_out, synth_ppm);
        if (dc->parsed())
            return cmd_detect_camera(dc_frames, dc_manifest, dc_cfg, dc_dump, dc_out);
        if (dp->parsed())
            return cmd_detect_points(dp_tracks, dp_cfg, dp_out);
        if (tracks_cmd->parsed())
            return cmd_tracks_info(ti_file);
        if (fu->parsed())
            return cmd_fuse(fu_frames, fu_sources, fu_policy, fu_stabilize, fu_out, fu_mcmd,
                            fu_mpd);
        if (ev->parsed()) {
            if (!ev_thresholds.empty())
                ev_cfg.thresholds = parse_csv_doubles(ev_thresholds);
            ev_cfg.exclude_query_frame = !ev_include_query;
            const bool single = !ev_pred.empty() || !ev_gt.empty();
            const bool batch = !ev_pred_dir.empty() || !ev_gt_dir.empty();
            if (single == batch || (single && (ev_pred.empty() || ev_gt.empty())) ||
                (batch && (ev_pred_dir.empty() || ev_gt_dir.empty())))
                throw fpd::ConfigError("evaluate needs --pred/--gt or --pred-dir/--gt-dir");
            return cmd_evaluate(ev_pred, ev_gt, ev_pred_dir, ev_gt_dir, ev_cfg, ev_out);
        }
        if (pl->parsed())
            return cmd_pipeline(pl_config, pl_gt);
        if (sw->parsed())
            return cmd_sweep(sw_config, sw_param, sw_values, sw_out);
    } catch (const fpd::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const fpd::FormatError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 4;
    }
    return 2;
}
