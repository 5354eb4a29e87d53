#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace fpd {

// Query point at its emergence frame, normalized coordinates in [0,1].
struct QueryPoint {
    int frame = 0;
    float x = 0.0f;
    float y = 0.0f;

    friend bool operator==(const QueryPoint&, const QueryPoint&) = default;
};

// M points tracked over T frames: normalized float32 coordinates plus a
// per-frame visibility flag and one query point per track. Immutable by
// convention after load; operations that change tracks return new sets.
struct TrackSet {
    int num_points = 0;
    int num_frames = 0;
    std::vector<float> coords;        // [point][frame][x,y], size M*T*2
    std::vector<std::uint8_t> visibility; // [point][frame], size M*T
    std::vector<QueryPoint> queries;  // size M
    int width = 0;   // source resolution; 0 when unknown
    int height = 0;
    std::string source_name;

    float x(int point, int frame) const {
        return coords[idx(point, frame) * 2];
    }
    float y(int point, int frame) const {
        return coords[idx(point, frame) * 2 + 1];
    }
    void set_xy(int point, int frame, float vx, float vy) {
        coords[idx(point, frame) * 2] = vx;
        coords[idx(point, frame) * 2 + 1] = vy;
    }
    bool visible(int point, int frame) const {
        return visibility[idx(point, frame)] != 0;
    }
    void set_visible(int point, int frame, bool v) {
        visibility[idx(point, frame)] = v ? 1 : 0;
    }

    // Contiguous per-point rows, frame-major.
    std::span<const float> point_xy(int point) const {
        return {coords.data() + idx(point, 0) * 2, static_cast<std::size_t>(num_frames) * 2};
    }
    std::span<const std::uint8_t> point_visibility(int point) const {
        return {visibility.data() + idx(point, 0), static_cast<std::size_t>(num_frames)};
    }

    static TrackSet zeros(int num_points, int num_frames);

    // Throws FormatError on shape mismatch or non-finite coordinates. A
    // visibility=false query frame is repaired to true with a warning on
    // stderr (upstream trackers occasionally emit those).
    void validate_and_repair();

    std::size_t idx(int point, int frame) const {
        return static_cast<std::size_t>(point) * num_frames + frame;
    }
};

enum class TrackFormat { binary, json };

// Binary layout (little-endian), documented so other tools can emit it:
//   magic "FPDT" | u32 version=1 | u32 M | u32 T | u32 width | u32 height |
//   u32 flags (bit0: coords normalized) | u32 reserved |
//   float32 coords [point][frame][x,y] | u8 visibility [point][frame] |
//   M query records { u32 frame, float32 x, float32 y }
// Pixel-space files (flags bit0 clear) are normalized on load by dividing
// x by width and y by height. JSON files use the "normalized" key the same
// way. save_tracks always writes normalized coordinates.
TrackSet load_tracks(const std::filesystem::path& path);
void save_tracks(const TrackSet& tracks, const std::filesystem::path& path, TrackFormat format);

} // namespace fpd
