#include "fpd/dtc.hpp"

#include "fpd/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

namespace fpd {

namespace {

const TrackSet& resolve(const std::map<std::string, TrackSet>& sources, const std::string& label,
                        const char* role) {
    auto it = sources.find(label);
    if (it == sources.end())
        throw ConfigError(std::string("fusion policy ") + role + " names unknown source '" +
                          label + "'");
    return it->second;
}

bool queries_match(const QueryPoint& a, const QueryPoint& b) {
    return a.frame == b.frame && std::fabs(a.x - b.x) <= 1e-6f && std::fabs(a.y - b.y) <= 1e-6f;
}

float median(std::vector<float>& values) {
    const std::size_t n = values.size();
    std::nth_element(values.begin(), values.begin() + n / 2, values.end());
    float hi = values[n / 2];
    if (n % 2 == 1)
        return hi;
    std::nth_element(values.begin(), values.begin() + n / 2 - 1, values.end());
    return (values[n / 2 - 1] + hi) / 2.0f;
}

void copy_row(TrackSet& dst, const TrackSet& src, int point) {
    const std::size_t base = dst.idx(point, 0);
    std::copy_n(src.coords.data() + base * 2, static_cast<std::size_t>(dst.num_frames) * 2,
                dst.coords.data() + base * 2);
    std::copy_n(src.visibility.data() + base, static_cast<std::size_t>(dst.num_frames),
                dst.visibility.data() + base);
}

} // namespace

FusionPolicy load_policy(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open policy file: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("bad policy JSON: " + path.string() + ": " + e.what());
    }
    FusionPolicy p;
    try {
        p.moving_camera_source = j.at("moving_camera_source").get<std::string>();
        p.static_camera_static_source = j.at("static_camera_static_source").get<std::string>();
        p.static_camera_moving_source = j.at("static_camera_moving_source").get<std::string>();
        p.mpd_reference_source = j.value("mpd_reference_source", p.static_camera_static_source);
        p.stabilize_static = j.value("stabilize_static", false);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("bad policy JSON: " + path.string() + ": " + e.what());
    }
    return p;
}

std::vector<float> stabilize_static_track(std::span<const float> track_xy,
                                          std::span<const std::uint8_t> visibility) {
    std::vector<float> out(track_xy.begin(), track_xy.end());
    std::vector<float> xs, ys;
    for (std::size_t t = 0; t < visibility.size(); ++t) {
        if (!visibility[t])
            continue;
        xs.push_back(track_xy[t * 2]);
        ys.push_back(track_xy[t * 2 + 1]);
    }
    if (xs.empty())
        return out;
    const float mx = median(xs);
    const float my = median(ys);
    for (std::size_t t = 0; t < visibility.size(); ++t) {
        out[t * 2] = mx;
        out[t * 2 + 1] = my;
    }
    return out;
}

FusionResult fuse(const std::map<std::string, TrackSet>& sources,
                  const CameraMotionResult& camera, const FusionPolicy& policy,
                  const MpdConfig& mpd_cfg) {
    if (sources.empty())
        throw ConfigError("fuse: no sources given");
    const TrackSet& moving_src = resolve(sources, policy.moving_camera_source, "moving_camera_source");
    const TrackSet& static_src =
        resolve(sources, policy.static_camera_static_source, "static_camera_static_source");
    const TrackSet& moving_pt_src =
        resolve(sources, policy.static_camera_moving_source, "static_camera_moving_source");
    const std::string mpd_label = policy.mpd_reference_source.empty()
                                      ? policy.static_camera_static_source
                                      : policy.mpd_reference_source;
    const TrackSet& mpd_src = resolve(sources, mpd_label, "mpd_reference_source");

    const TrackSet& first = sources.begin()->second;
    for (const auto& [label, ts] : sources) {
        if (ts.num_points != first.num_points || ts.num_frames != first.num_frames)
            throw FormatError("fuse: source '" + label + "' has M/T mismatch");
        for (int i = 0; i < first.num_points; ++i)
            if (!queries_match(ts.queries[static_cast<std::size_t>(i)],
                               first.queries[static_cast<std::size_t>(i)]))
                throw FormatError("fuse: source '" + label + "' query mismatch at point " +
                                  std::to_string(i));
    }

    FusionResult result;
    if (camera.moving) {
        result.tracks = moving_src;
        result.tracks.source_name = "fused[moving_camera<-" + policy.moving_camera_source + "]";
        result.flags.computed = false;
        return result;
    }

    result.flags = detect_static_points(mpd_src, mpd_cfg);
    result.tracks = static_src; // shape, queries, resolution metadata
    result.tracks.source_name = "fused[static<-" + policy.static_camera_static_source +
                                ",moving<-" + policy.static_camera_moving_source +
                                ",mpd<-" + mpd_label + "]";
    for (int i = 0; i < result.tracks.num_points; ++i) {
        const bool is_static = result.flags.static_flags[static_cast<std::size_t>(i)] != 0;
        copy_row(result.tracks, is_static ? static_src : moving_pt_src, i);
        if (is_static && policy.stabilize_static) {
            const auto stabilized =
                stabilize_static_track(result.tracks.point_xy(i), result.tracks.point_visibility(i));
            std::copy(stabilized.begin(), stabilized.end(),
                      result.tracks.coords.begin() + static_cast<std::ptrdiff_t>(result.tracks.idx(i, 0) * 2));
        }
    }
    return result;
}

} // namespace fpd
