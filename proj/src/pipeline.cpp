#include "fpd/pipeline.hpp"

#include "fpd/error.hpp"
#include "fpd/parallel.hpp"
#include "fpd/reports.hpp"
#include "fpd/video_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;

namespace fpd {

namespace {

template <typename Fn>
auto stage(const std::string& video, const char* name, Fn&& fn) {
    try {
        return fn();
    } catch (const ConfigError& e) {
        throw ConfigError("[" + video + "/" + name + "] " + e.what());
    } catch (const FormatError& e) {
        throw FormatError("[" + video + "/" + name + "] " + e.what());
    } catch (const InvariantError& e) {
        throw InvariantError("[" + video + "/" + name + "] " + e.what());
    }
}

VideoLabels load_labels(const fs::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open labels file: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("bad labels JSON: " + path.string() + ": " + e.what());
    }
    VideoLabels labels;
    labels.camera_moving = j.value("camera_moving", false);
    for (const auto& v : j.value("point_static", nlohmann::json::array()))
        labels.point_static.push_back(v.get<bool>() ? 1 : 0);
    return labels;
}

struct LoadedVideo {
    std::string name;
    VideoSequence video;
    std::map<std::string, TrackSet> sources;
    std::optional<TrackSet> gt;
    std::optional<VideoLabels> labels;
};

LoadedVideo load_video_job(const VideoJob& job) {
    LoadedVideo lv;
    lv.name = job.name;
    lv.video = stage(job.name, "load-frames", [&] {
        return load_frame_sequence(job.frames_dir, job.manifest);
    });
    for (const auto& [label, path] : job.sources) {
        TrackSet ts = stage(job.name, "load-tracks", [&] { return load_tracks(path); });
        ts.source_name = label;
        lv.sources.emplace(label, std::move(ts));
    }
    if (job.gt)
        lv.gt = stage(job.name, "load-gt", [&] { return load_tracks(*job.gt); });
    if (job.labels) {
        lv.labels = stage(job.name, "load-labels", [&] { return load_labels(*job.labels); });
        if (lv.gt && lv.labels->point_static.size() !=
                         static_cast<std::size_t>(lv.gt->num_points))
            throw FormatError("[" + job.name + "/load-labels] point_static size mismatch");
    }
    return lv;
}

void score_video(const LoadedVideo& lv, const MetricsConfig& metrics, VideoResult& result) {
    if (!lv.gt)
        return;
    result.report = stage(lv.name, "evaluate",
                          [&] { return average_jaccard(result.fused, *lv.gt, metrics); });
    if (!lv.labels)
        return;
    const auto& labels = *lv.labels;
    const int m = lv.gt->num_points;
    if (labels.camera_moving) {
        result.categories.mc_mp = result.report->average_jaccard;
        return;
    }
    std::vector<std::uint8_t> static_mask(labels.point_static);
    std::vector<std::uint8_t> moving_mask(static_cast<std::size_t>(m));
    int n_static = 0;
    for (int i = 0; i < m; ++i) {
        moving_mask[static_cast<std::size_t>(i)] =
            static_mask[static_cast<std::size_t>(i)] ? 0 : 1;
        n_static += static_mask[static_cast<std::size_t>(i)] ? 1 : 0;
    }
    if (n_static > 0)
        result.categories.sc_sp =
            average_jaccard(result.fused, *lv.gt, metrics, static_mask).average_jaccard;
    if (n_static < m)
        result.categories.sc_mp =
            average_jaccard(result.fused, *lv.gt, metrics, moving_mask).average_jaccard;
}

VideoResult process_video(const LoadedVideo& lv, const CameraMotionResult& camera,
                          const PipelineConfig& cfg) {
    VideoResult result;
    result.name = lv.name;
    result.camera = camera;
    FusionResult fr = stage(lv.name, "fuse",
                            [&] { return fuse(lv.sources, camera, cfg.policy, cfg.mpd); });
    result.flags = std::move(fr.flags);
    result.fused = std::move(fr.tracks);
    score_video(lv, cfg.metrics, result);
    return result;
}

void aggregate(PipelineResult& result) {
    double sum = 0.0;
    int n = 0;
    double sc_sp_sum = 0.0, sc_mp_sum = 0.0, mc_mp_sum = 0.0;
    int sc_sp_n = 0, sc_mp_n = 0, mc_mp_n = 0;
    for (const auto& v : result.videos) {
        if (v.report) {
            sum += v.report->average_jaccard;
            ++n;
        }
        if (v.categories.sc_sp) {
            sc_sp_sum += *v.categories.sc_sp;
            ++sc_sp_n;
        }
        if (v.categories.sc_mp) {
            sc_mp_sum += *v.categories.sc_mp;
            ++sc_mp_n;
        }
        if (v.categories.mc_mp) {
            mc_mp_sum += *v.categories.mc_mp;
            ++mc_mp_n;
        }
    }
    if (n > 0)
        result.aggregate_aj = sum / n;
    if (sc_sp_n > 0)
        result.aggregate_categories.sc_sp = sc_sp_sum / sc_sp_n;
    if (sc_mp_n > 0)
        result.aggregate_categories.sc_mp = sc_mp_sum / sc_mp_n;
    if (mc_mp_n > 0)
        result.aggregate_categories.mc_mp = mc_mp_sum / mc_mp_n;
}

void write_artifacts(const PipelineConfig& cfg, const PipelineResult& result) {
    if (cfg.out_dir.empty())
        return;
    fs::create_directories(cfg.out_dir);
    for (const auto& v : result.videos) {
        const fs::path dir = cfg.out_dir / v.name;
        fs::create_directories(dir);
        std::ofstream(dir / "camera.json") << to_json(v.camera).dump(2) << "\n";
        std::ofstream(dir / "points.json") << to_json(v.flags).dump(2) << "\n";
        save_tracks(v.fused, dir / "fused.fpdt", TrackFormat::binary);
        if (v.report)
            std::ofstream(dir / "metrics.json") << to_json(*v.report).dump(2) << "\n";
    }

    nlohmann::ordered_json summary;
    auto& videos = summary["videos"] = nlohmann::ordered_json::array();
    auto cat_json = [](const CategoryAj& c) {
        nlohmann::ordered_json j;
        j["sc_sp_aj"] = c.sc_sp ? nlohmann::ordered_json(*c.sc_sp) : nlohmann::ordered_json();
        j["sc_mp_aj"] = c.sc_mp ? nlohmann::ordered_json(*c.sc_mp) : nlohmann::ordered_json();
        j["mc_mp_aj"] = c.mc_mp ? nlohmann::ordered_json(*c.mc_mp) : nlohmann::ordered_json();
        return j;
    };
    for (const auto& v : result.videos) {
        nlohmann::ordered_json j;
        j["name"] = v.name;
        j["camera_moving"] = v.camera.moving;
        j["mpd_computed"] = v.flags.computed;
        j["average_jaccard"] =
            v.report ? nlohmann::ordered_json(v.report->average_jaccard) : nlohmann::ordered_json();
        j["categories"] = cat_json(v.categories);
        videos.push_back(std::move(j));
    }
    summary["aggregate_aj"] = result.aggregate_aj ? nlohmann::ordered_json(*result.aggregate_aj)
                                                  : nlohmann::ordered_json();
    summary["aggregate_categories"] = cat_json(result.aggregate_categories);
    std::ofstream(cfg.out_dir / "summary.json") << summary.dump(2) << "\n";
}

enum class SweepParam { rho, lambda_coarse, lambda_fine, eta };

SweepParam parse_param(const std::string& param) {
    if (param == "rho")
        return SweepParam::rho;
    if (param == "lambda_coarse")
        return SweepParam::lambda_coarse;
    if (param == "lambda_fine")
        return SweepParam::lambda_fine;
    if (param == "eta")
        return SweepParam::eta;
    throw ConfigError("sweep: unknown parameter '" + param +
                      "' (expected rho | lambda_coarse | lambda_fine | eta)");
}

PipelineConfig with_value(const PipelineConfig& cfg, SweepParam param, double value) {
    PipelineConfig out = cfg;
    switch (param) {
    case SweepParam::rho:
        out.mpd.rho = value;
        break;
    case SweepParam::lambda_coarse:
        out.mcmd.lambda_coarse = value;
        break;
    case SweepParam::lambda_fine:
        out.mcmd.lambda_fine = value;
        break;
    case SweepParam::eta:
        out.mcmd.eta = value;
        break;
    }
    return out;
}

} // namespace

PipelineConfig load_pipeline_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("bad config JSON: " + path.string() + ": " + e.what());
    }
    const fs::path base = path.parent_path();
    auto resolve = [&](const std::string& p) {
        fs::path fp(p);
        return fp.is_absolute() ? fp : base / fp;
    };

    PipelineConfig cfg;
    try {
        auto parse_job = [&](const nlohmann::json& v, int index) {
            VideoJob job;
            job.name = v.value("name", "video" + std::to_string(index));
            job.frames_dir = resolve(v.at("frames_dir").get<std::string>());
            if (v.contains("manifest"))
                job.manifest = resolve(v.at("manifest").get<std::string>());
            for (const auto& [label, p] : v.at("sources").items())
                job.sources.emplace(label, resolve(p.get<std::string>()));
            if (v.contains("gt"))
                job.gt = resolve(v.at("gt").get<std::string>());
            if (v.contains("labels"))
                job.labels = resolve(v.at("labels").get<std::string>());
            return job;
        };
        if (j.contains("videos")) {
            int index = 0;
            for (const auto& v : j.at("videos"))
                cfg.videos.push_back(parse_job(v, index++));
        } else {
            cfg.videos.push_back(parse_job(j, 0));
        }
        if (cfg.videos.empty())
            throw ConfigError("config has no videos");

        const auto& pol = j.at("policy");
        if (pol.is_string()) {
            cfg.policy = load_policy(resolve(pol.get<std::string>()));
        } else {
            cfg.policy.moving_camera_source = pol.at("moving_camera_source").get<std::string>();
            cfg.policy.static_camera_static_source =
                pol.at("static_camera_static_source").get<std::string>();
            cfg.policy.static_camera_moving_source =
                pol.at("static_camera_moving_source").get<std::string>();
            cfg.policy.mpd_reference_source =
                pol.value("mpd_reference_source", cfg.policy.static_camera_static_source);
            cfg.policy.stabilize_static = pol.value("stabilize_static", false);
        }
        if (j.contains("mcmd")) {
            const auto& m = j.at("mcmd");
            cfg.mcmd.lambda_coarse = m.value("lambda_coarse", cfg.mcmd.lambda_coarse);
            cfg.mcmd.lambda_fine = m.value("lambda_fine", cfg.mcmd.lambda_fine);
            cfg.mcmd.eta = m.value("eta", cfg.mcmd.eta);
            cfg.mcmd.clip_seconds = m.value("clip_seconds", cfg.mcmd.clip_seconds);
        }
        if (j.contains("mpd")) {
            const auto& m = j.at("mpd");
            cfg.mpd.rho = m.value("rho", cfg.mpd.rho);
            cfg.mpd.min_visible = m.value("min_visible", cfg.mpd.min_visible);
        }
        if (j.contains("metrics")) {
            const auto& m = j.at("metrics");
            if (m.contains("thresholds"))
                cfg.metrics.thresholds = m.at("thresholds").get<std::vector<double>>();
            cfg.metrics.eval_width = m.value("eval_width", cfg.metrics.eval_width);
            cfg.metrics.eval_height = m.value("eval_height", cfg.metrics.eval_height);
            cfg.metrics.exclude_query_frame =
                m.value("exclude_query_frame", cfg.metrics.exclude_query_frame);
        }
        if (j.contains("out_dir"))
            cfg.out_dir = resolve(j.at("out_dir").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("bad config " + path.string() + ": " + e.what());
    }
    cfg.mcmd.validate();
    cfg.mpd.validate();
    cfg.metrics.validate();
    return cfg;
}

PipelineResult run_pipeline(const PipelineConfig& cfg) {
    cfg.mcmd.validate();
    cfg.mpd.validate();
    cfg.metrics.validate();

    PipelineResult result;
    result.videos.resize(cfg.videos.size());
    parallel_for(static_cast<std::int64_t>(cfg.videos.size()), [&](std::int64_t i) {
        const LoadedVideo lv = load_video_job(cfg.videos[static_cast<std::size_t>(i)]);
        const CameraMotionResult camera =
            stage(lv.name, "camera-detection", [&] { return detect_camera_motion(lv.video, cfg.mcmd); });
        result.videos[static_cast<std::size_t>(i)] = process_video(lv, camera, cfg);
    });
    aggregate(result);
    write_artifacts(cfg, result);
    return result;
}

std::vector<SweepRow> sweep(const PipelineConfig& cfg, const std::string& param,
                            std::span<const double> values) {
    const SweepParam p = parse_param(param);
    if (values.size() < 2)
        throw ConfigError("sweep: need >= 2 values");
    for (const auto& job : cfg.videos)
        if (!job.gt)
            throw ConfigError("sweep: video '" + job.name + "' has no ground truth");

    std::vector<LoadedVideo> loaded(cfg.videos.size());
    parallel_for(static_cast<std::int64_t>(cfg.videos.size()), [&](std::int64_t i) {
        loaded[static_cast<std::size_t>(i)] = load_video_job(cfg.videos[static_cast<std::size_t>(i)]);
    });

    // Camera verdicts do not depend on rho; compute them once in that case.
    std::vector<CameraMotionResult> cached_cameras;
    if (p == SweepParam::rho) {
        cached_cameras.resize(loaded.size());
        parallel_for(static_cast<std::int64_t>(loaded.size()), [&](std::int64_t i) {
            const auto& lv = loaded[static_cast<std::size_t>(i)];
            cached_cameras[static_cast<std::size_t>(i)] = stage(
                lv.name, "camera-detection", [&] { return detect_camera_motion(lv.video, cfg.mcmd); });
        });
    }

    std::vector<SweepRow> rows;
    for (double value : values) {
        const PipelineConfig run_cfg = with_value(cfg, p, value);
        PipelineResult pr;
        pr.videos.resize(loaded.size());
        parallel_for(static_cast<std::int64_t>(loaded.size()), [&](std::int64_t i) {
            const auto& lv = loaded[static_cast<std::size_t>(i)];
            const CameraMotionResult camera =
                p == SweepParam::rho
                    ? cached_cameras[static_cast<std::size_t>(i)]
                    : stage(lv.name, "camera-detection",
                            [&] { return detect_camera_motion(lv.video, run_cfg.mcmd); });
            pr.videos[static_cast<std::size_t>(i)] = process_video(lv, camera, run_cfg);
        });
        aggregate(pr);
        SweepRow row;
        row.value = value;
        row.categories = pr.aggregate_categories;
        row.aj = *pr.aggregate_aj;
        for (const auto& v : pr.videos)
            if (v.flags.computed)
                for (auto f : v.flags.static_flags)
                    row.static_flag_count += f ? 1 : 0;
        rows.push_back(row);
    }
    return rows;
}

std::string sweep_csv(std::span<const SweepRow> rows) {
    std::ostringstream out;
    out << "value,sc_sp_aj,sc_mp_aj,mc_mp_aj,aj\n";
    auto cell = [](const std::optional<double>& v) { return v ? csv_number(*v) : std::string(); };
    for (const auto& row : rows)
        out << csv_number(row.value) << "," << cell(row.categories.sc_sp) << ","
            << cell(row.categories.sc_mp) << "," << cell(row.categories.mc_mp) << ","
            << csv_number(row.aj) << "\n";
    return out.str();
}

} // namespace fpd
