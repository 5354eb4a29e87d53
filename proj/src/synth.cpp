#include "fpd/synth.hpp"

#include "fpd/error.hpp"
#include "fpd/parallel.hpp"
#include "fpd/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include <json.hpp>

namespace fs = std::filesystem;

namespace fpd {

namespace {

constexpr int kBlurRadius = 2;

std::vector<float> make_texture(int width, int height, std::uint64_t seed) {
    SplitMix64 rng(seed);
    const std::size_t n = static_cast<std::size_t>(width) * height;
    std::vector<double> noise(n);
    for (auto& v : noise)
        v = rng.uniform();

    // Box blur with wraparound, then a contrast stretch to [0.05, 0.95] so
    // shifted frames decorrelate over a few pixels without saturating SSIM.
    std::vector<double> blurred(n, 0.0);
    const int k = 2 * kBlurRadius + 1;
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            double acc = 0.0;
            for (int dy = -kBlurRadius; dy <= kBlurRadius; ++dy) {
                const int yy = (y + dy + height) % height;
                for (int dx = -kBlurRadius; dx <= kBlurRadius; ++dx) {
                    const int xx = (x + dx + width) % width;
                    acc += noise[static_cast<std::size_t>(yy) * width + xx];
                }
            }
            blurred[static_cast<std::size_t>(y) * width + x] = acc / (k * k);
        }
    }
    double mn = blurred[0], mx = blurred[0];
    for (double v : blurred) {
        mn = std::min(mn, v);
        mx = std::max(mx, v);
    }
    const double scale = mx > mn ? 0.9 / (mx - mn) : 0.0;
    std::vector<float> tex(n);
    for (std::size_t i = 0; i < n; ++i)
        tex[i] = static_cast<float>(0.05 + (blurred[i] - mn) * scale);
    return tex;
}

double sample_wrap(const std::vector<float>& tex, int width, int height, double x, double y) {
    double fx = std::floor(x);
    double fy = std::floor(y);
    const double ax = x - fx;
    const double ay = y - fy;
    int x0 = static_cast<int>(fx) % width;
    int y0 = static_cast<int>(fy) % height;
    if (x0 < 0)
        x0 += width;
    if (y0 < 0)
        y0 += height;
    const int x1 = (x0 + 1) % width;
    const int y1 = (y0 + 1) % height;
    const double v00 = tex[static_cast<std::size_t>(y0) * width + x0];
    const double v01 = tex[static_cast<std::size_t>(y0) * width + x1];
    const double v10 = tex[static_cast<std::size_t>(y1) * width + x0];
    const double v11 = tex[static_cast<std::size_t>(y1) * width + x1];
    return v00 * (1 - ay) * (1 - ax) + v01 * (1 - ay) * ax + v10 * ay * (1 - ax) +
           v11 * ay * ax;
}

struct CameraOffset {
    double x = 0.0;
    double y = 0.0;
};

CameraOffset camera_offset(const CameraSpec& cam, int t) {
    if (cam.model == CameraModel::static_cam)
        return {0.0, 0.0};
    return {cam.vx * t, cam.vy * t};
}

double blob_value(std::uint64_t texture_seed, std::size_t blob_index) {
    SplitMix64 rng(SplitMix64::derive(texture_seed, 0x42 + blob_index));
    return rng.uniform() < 0.5 ? 0.08 : 0.92;
}

} // namespace

void SceneSpec::validate() const {
    if (width < 32 || height < 32)
        throw ConfigError("scene: dimensions must be >= 32");
    if (num_frames < 2)
        throw ConfigError("scene: num_frames must be >= 2");
    if (!(fps > 0.0))
        throw ConfigError("scene: fps must be positive");
    if (!std::isfinite(camera.vx) || !std::isfinite(camera.vy))
        throw ConfigError("scene: camera velocity must be finite");
    for (const auto& b : blobs) {
        if (!(b.radius > 0.0))
            throw ConfigError("scene: blob radius must be positive");
        if (!std::isfinite(b.vx) || !std::isfinite(b.vy) || !std::isfinite(b.x) ||
            !std::isfinite(b.y))
            throw ConfigError("scene: blob parameters must be finite");
    }
    if (grid.nx < 0 || grid.ny < 0 || grid.margin < 0.0 || grid.margin >= 0.5)
        throw ConfigError("scene: bad grid spec");
    for (const auto& o : occlusions)
        if (o.point < 0 || o.point >= num_points() || o.begin < 0 || o.end <= o.begin ||
            o.end > num_frames)
            throw ConfigError("scene: occlusion out of range");
}

void DegradationSpec::validate() const {
    if (jitter_sigma < 0.0 || drift_rate < 0.0)
        throw ConfigError("degradation: parameters must be >= 0");
    if (visibility_flip_prob < 0.0 || visibility_flip_prob >= 1.0)
        throw ConfigError("degradation: visibility_flip_prob must be in [0,1)");
}

SceneOutput generate_scene(const SceneSpec& spec) {
    spec.validate();
    const int w = spec.width;
    const int h = spec.height;
    const int t_count = spec.num_frames;
    const std::vector<float> tex = make_texture(w, h, spec.texture_seed);

    // Scene-space point positions; blobs first, then the grid.
    const int num_blobs = static_cast<int>(spec.blobs.size());
    const int m = spec.num_points();
    std::vector<double> scene_x, scene_y, vel_x, vel_y;
    for (const auto& b : spec.blobs) {
        scene_x.push_back(b.x);
        scene_y.push_back(b.y);
        vel_x.push_back(b.vx);
        vel_y.push_back(b.vy);
    }
    for (int gy = 0; gy < spec.grid.ny; ++gy) {
        for (int gx = 0; gx < spec.grid.nx; ++gx) {
            const double span_x = 1.0 - 2.0 * spec.grid.margin;
            const double span_y = 1.0 - 2.0 * spec.grid.margin;
            scene_x.push_back((spec.grid.margin + span_x * (gx + 0.5) / spec.grid.nx) * w);
            scene_y.push_back((spec.grid.margin + span_y * (gy + 0.5) / spec.grid.ny) * h);
            vel_x.push_back(0.0);
            vel_y.push_back(0.0);
        }
    }

    std::vector<std::uint8_t> declared_occluded(static_cast<std::size_t>(m) * t_count, 0);
    for (const auto& o : spec.occlusions)
        for (int t = o.begin; t < o.end; ++t)
            declared_occluded[static_cast<std::size_t>(o.point) * t_count + t] = 1;

    SceneOutput out;
    out.camera_moving = spec.camera.model != CameraModel::static_cam;
    out.video.fps = spec.fps;
    out.video.width = w;
    out.video.height = h;
    out.video.frames.resize(static_cast<std::size_t>(t_count));

    std::vector<double> blob_vals(static_cast<std::size_t>(num_blobs));
    for (int b = 0; b < num_blobs; ++b)
        blob_vals[static_cast<std::size_t>(b)] = blob_value(spec.texture_seed, static_cast<std::size_t>(b));

    parallel_for(t_count, [&](std::int64_t t) {
        const CameraOffset off = camera_offset(spec.camera, static_cast<int>(t));
        Frame frame;
        frame.width = w;
        frame.height = h;
        frame.channels = 1;
        frame.pixels.resize(static_cast<std::size_t>(w) * h);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                frame.pixels[static_cast<std::size_t>(y) * w + x] =
                    static_cast<float>(sample_wrap(tex, w, h, x + off.x, y + off.y));
        for (int b = 0; b < num_blobs; ++b) {
            const double cx = spec.blobs[static_cast<std::size_t>(b)].x + vel_x[static_cast<std::size_t>(b)] * static_cast<double>(t) - off.x;
            const double cy = spec.blobs[static_cast<std::size_t>(b)].y + vel_y[static_cast<std::size_t>(b)] * static_cast<double>(t) - off.y;
            const double r = spec.blobs[static_cast<std::size_t>(b)].radius;
            const int x_lo = std::max(0, static_cast<int>(std::floor(cx - r - 1)));
            const int x_hi = std::min(w - 1, static_cast<int>(std::ceil(cx + r + 1)));
            const int y_lo = std::max(0, static_cast<int>(std::floor(cy - r - 1)));
            const int y_hi = std::min(h - 1, static_cast<int>(std::ceil(cy + r + 1)));
            for (int y = y_lo; y <= y_hi; ++y) {
                for (int x = x_lo; x <= x_hi; ++x) {
                    const double dist = std::hypot(x - cx, y - cy);
                    const double alpha = std::clamp(r + 0.5 - dist, 0.0, 1.0);
                    if (alpha <= 0.0)
                        continue;
                    float& px = frame.pixels[static_cast<std::size_t>(y) * w + x];
                    px = static_cast<float>(px * (1.0 - alpha) +
                                            blob_vals[static_cast<std::size_t>(b)] * alpha);
                }
            }
        }
        out.video.frames[static_cast<std::size_t>(t)] = std::move(frame);
    });

    if (m == 0)
        return out;

    TrackSet gt = TrackSet::zeros(m, t_count);
    gt.width = w;
    gt.height = h;
    gt.source_name = "gt";
    out.point_static.assign(static_cast<std::size_t>(m), 0);
    for (int i = 0; i < m; ++i) {
        const bool scene_static = vel_x[static_cast<std::size_t>(i)] == 0.0 &&
                                  vel_y[static_cast<std::size_t>(i)] == 0.0;
        out.point_static[static_cast<std::size_t>(i)] =
            (!out.camera_moving && scene_static) ? 1 : 0;
        int first_visible = -1;
        for (int t = 0; t < t_count; ++t) {
            const CameraOffset off = camera_offset(spec.camera, t);
            const double img_x = scene_x[static_cast<std::size_t>(i)] +
                                 vel_x[static_cast<std::size_t>(i)] * t - off.x;
            const double img_y = scene_y[static_cast<std::size_t>(i)] +
                                 vel_y[static_cast<std::size_t>(i)] * t - off.y;
            gt.set_xy(i, t, static_cast<float>(img_x / w), static_cast<float>(img_y / h));
            const bool in_frame = img_x >= 0.0 && img_x < w && img_y >= 0.0 && img_y < h;
            const bool occluded = declared_occluded[static_cast<std::size_t>(i) * t_count + t] != 0;
            if (!in_frame && !occluded && i < num_blobs)
                throw ConfigError("scene: blob " + std::to_string(i) + " leaves the frame at t=" +
                                  std::to_string(t) + " with no occlusion declared");
            const bool vis = in_frame && !occluded;
            gt.set_visible(i, t, vis);
            if (vis && first_visible < 0)
                first_visible = t;
        }
        if (first_visible < 0)
            throw ConfigError("scene: point " + std::to_string(i) + " is never visible");
        gt.queries[static_cast<std::size_t>(i)] = {first_visible, gt.x(i, first_visible),
                                                   gt.y(i, first_visible)};
    }
    gt.validate_and_repair();
    out.ground_truth = std::move(gt);
    return out;
}

TrackSet degrade_tracks(const TrackSet& gt, std::span<const std::uint8_t> truly_static,
                        const DegradationSpec& spec) {
    spec.validate();
    if (truly_static.size() != static_cast<std::size_t>(gt.num_points))
        throw ConfigError("degrade_tracks: static label size mismatch");

    TrackSet out = gt;
    out.source_name = spec.label.empty() ? "degraded" : spec.label;
    const int t_count = gt.num_frames;
    parallel_for(gt.num_points, [&](std::int64_t i) {
        // Separate coordinate / visibility streams per point keep the two
        // degradations independent of each other's parameters.
        SplitMix64 coord_rng(SplitMix64::derive(spec.seed, 2 * static_cast<std::uint64_t>(i)));
        SplitMix64 vis_rng(SplitMix64::derive(spec.seed, 2 * static_cast<std::uint64_t>(i) + 1));
        const int p = static_cast<int>(i);
        if (truly_static[static_cast<std::size_t>(i)]) {
            if (spec.jitter_sigma > 0.0) {
                for (int t = 0; t < t_count; ++t) {
                    const double nx = out.x(p, t) + spec.jitter_sigma * coord_rng.gaussian();
                    const double ny = out.y(p, t) + spec.jitter_sigma * coord_rng.gaussian();
                    out.set_xy(p, t, static_cast<float>(nx), static_cast<float>(ny));
                }
            }
        } else if (spec.drift_rate > 0.0) {
            const double angle = 2.0 * 3.14159265358979323846 * coord_rng.uniform();
            const double dir_x = std::cos(angle);
            const double dir_y = std::sin(angle);
            for (int t = 0; t < t_count; ++t) {
                const double disp = spec.drift_rate * (t + 1);
                out.set_xy(p, t, static_cast<float>(out.x(p, t) + disp * dir_x),
                           static_cast<float>(out.y(p, t) + disp * dir_y));
            }
        }
        if (spec.visibility_flip_prob > 0.0) {
            const int e = gt.queries[static_cast<std::size_t>(i)].frame;
            for (int t = 0; t < t_count; ++t) {
                const double u = vis_rng.uniform();
                if (t != e && u < spec.visibility_flip_prob)
                    out.set_visible(p, t, !out.visible(p, t));
            }
        }
    });
    return out;
}

SceneFile load_scene_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open scene file: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("bad scene JSON: " + path.string() + ": " + e.what());
    }
    try {
        SceneFile file;
        SceneSpec& s = file.scene;
        s.width = j.value("width", s.width);
        s.height = j.value("height", s.height);
        s.num_frames = j.value("num_frames", s.num_frames);
        s.fps = j.value("fps", s.fps);
        s.texture_seed = j.value("texture_seed", s.texture_seed);
        if (j.contains("camera")) {
            const auto& c = j.at("camera");
            const std::string model = c.value("model", "static");
            if (model == "static")
                s.camera.model = CameraModel::static_cam;
            else if (model == "pan")
                s.camera.model = CameraModel::pan;
            else if (model == "slow_drift")
                s.camera.model = CameraModel::slow_drift;
            else
                throw ConfigError("scene: unknown camera model '" + model + "'");
            s.camera.vx = c.value("vx", 0.0);
            s.camera.vy = c.value("vy", 0.0);
        }
        for (const auto& b : j.value("blobs", nlohmann::json::array()))
            s.blobs.push_back({b.at("x").get<double>(), b.at("y").get<double>(),
                               b.value("vx", 0.0), b.value("vy", 0.0), b.value("radius", 3.0)});
        if (j.contains("grid")) {
            const auto& g = j.at("grid");
            s.grid.nx = g.value("nx", 0);
            s.grid.ny = g.value("ny", 0);
            s.grid.margin = g.value("margin", 0.2);
        }
        for (const auto& o : j.value("occlusions", nlohmann::json::array()))
            s.occlusions.push_back({o.at("point").get<int>(), o.at("begin").get<int>(),
                                    o.at("end").get<int>()});
        for (const auto& d : j.value("degradations", nlohmann::json::array())) {
            DegradationSpec deg;
            deg.label = d.value("label", "degraded");
            deg.jitter_sigma = d.value("jitter_sigma", 0.0);
            deg.drift_rate = d.value("drift_rate", 0.0);
            deg.visibility_flip_prob = d.value("visibility_flip_prob", 0.0);
            deg.seed = d.value("seed", 0);
            file.degradations.push_back(std::move(deg));
        }
        return file;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("bad scene JSON: " + path.string() + ": " + e.what());
    }
}

void write_scene(const SceneOutput& out, const std::vector<DegradationSpec>& degradations,
                 const fs::path& dir, bool ppm_frames) {
    fs::create_directories(dir);
    parallel_for(out.video.frame_count(), [&](std::int64_t t) {
        char name[32];
        std::snprintf(name, sizeof(name), "frame_%06d.%s", static_cast<int>(t),
                      ppm_frames ? "ppm" : "png");
        const Frame& f = out.video.frames[static_cast<std::size_t>(t)];
        if (ppm_frames)
            save_ppm(f, dir / name);
        else
            save_png(f, dir / name);
    });

    nlohmann::ordered_json manifest;
    manifest["fps"] = out.video.fps;
    manifest["width"] = out.video.width;
    manifest["height"] = out.video.height;
    std::ofstream mf(dir / "manifest.json");
    mf << manifest.dump(2) << "\n";

    if (out.ground_truth.num_points == 0) {
        if (!degradations.empty())
            std::cerr << "warning: scene has no tracked points; skipping track outputs\n";
        return;
    }
    save_tracks(out.ground_truth, dir / "gt.fpdt", TrackFormat::binary);

    nlohmann::ordered_json labels;
    labels["camera_moving"] = out.camera_moving;
    auto& ps = labels["point_static"] = nlohmann::ordered_json::array();
    for (auto v : out.point_static)
        ps.push_back(v != 0);
    std::ofstream lf(dir / "labels.json");
    lf << labels.dump(2) << "\n";

    for (const auto& deg : degradations) {
        TrackSet degraded = degrade_tracks(out.ground_truth, out.point_static, deg);
        save_tracks(degraded, dir / ("degraded_" + degraded.source_name + ".fpdt"),
                    TrackFormat::binary);
    }
}

} // namespace fpd
