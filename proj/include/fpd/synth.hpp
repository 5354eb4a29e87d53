#pragma once

#include "fpd/tracks.hpp"
#include "fpd/video_io.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace fpd {

enum class CameraModel { static_cam, pan, slow_drift };

// Camera offset at frame t is (vx*t, vy*t) pixels; frame pixels sample a
// fixed texture at (x + offset) with bilinear wraparound, so global image
// statistics stay constant while content shifts.
struct CameraSpec {
    CameraModel model = CameraModel::static_cam;
    double vx = 0.0; // px/frame
    double vy = 0.0;
};

// Disk of the given radius (px), antialiased over 1 px, moving at a constant
// scene-space velocity. Its center is the tracked point.
struct BlobSpec {
    double x = 0.0; // start center, scene px
    double y = 0.0;
    double vx = 0.0; // px/frame
    double vy = 0.0;
    double radius = 3.0;
};

// nx * ny scene-static background query points, evenly placed inside the
// frame with a fractional margin on each side.
struct GridSpec {
    int nx = 0;
    int ny = 0;
    double margin = 0.2;
};

// Declares frames [begin, end) of one tracked point as occluded. Point
// indices cover blobs first, then grid points.
struct OcclusionSpec {
    int point = 0;
    int begin = 0;
    int end = 0;
};

struct SceneSpec {
    int width = 64;
    int height = 64;
    int num_frames = 60;
    double fps = 30.0;
    CameraSpec camera;
    std::uint64_t texture_seed = 1;
    std::vector<BlobSpec> blobs;
    GridSpec grid;
    std::vector<OcclusionSpec> occlusions;

    void validate() const;
    int num_points() const { return static_cast<int>(blobs.size()) + grid.nx * grid.ny; }
};

// Controlled track corruption: i.i.d. zero-mean Gaussian jitter on static
// points, cumulative directional drift on moving points, and per-slot
// visibility flips (never at the query frame). Fully determined by seed.
struct DegradationSpec {
    std::string label;
    double jitter_sigma = 0.0;
    double drift_rate = 0.0;
    double visibility_flip_prob = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
};

struct SceneOutput {
    VideoSequence video;
    TrackSet ground_truth;
    // True where the point's image-space track is constant (static camera
    // and zero scene velocity).
    std::vector<std::uint8_t> point_static;
    bool camera_moving = false;
};

// Renders the scene and its exact ground-truth tracks. A blob whose center
// leaves the frame at a frame not covered by a declared occlusion is an
// error; grid points leaving the frame are auto-occluded.
SceneOutput generate_scene(const SceneSpec& spec);

TrackSet degrade_tracks(const TrackSet& gt, std::span<const std::uint8_t> truly_static,
                        const DegradationSpec& spec);

// scene.json: SceneSpec plus an optional "degradations" array.
struct SceneFile {
    SceneSpec scene;
    std::vector<DegradationSpec> degradations;
};
SceneFile load_scene_file(const std::filesystem::path& path);

// Writes frames (frame_000000.<ext> ...), manifest.json, gt.fpdt,
// labels.json and one degraded_<label>.fpdt per degradation.
void write_scene(const SceneOutput& out, const std::vector<DegradationSpec>& degradations,
                 const std::filesystem::path& dir, bool ppm_frames = false);

} // namespace fpd
