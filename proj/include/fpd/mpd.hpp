#pragma once

#include "fpd/tracks.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace fpd {

// rho is the per-coordinate deviation threshold in normalized units
// (0.00125 is 0.32 px at 256 px). Points with fewer than min_visible visible
// frames carry no motion evidence and default to static.
struct MpdConfig {
    double rho = 0.00125;
    int min_visible = 2;

    void validate() const;
};

struct PointDeviation {
    double sigma_x = 0.0;
    double sigma_y = 0.0;
    int n_visible = 0;
};

struct PointMotionFlags {
    std::vector<std::uint8_t> static_flags;
    std::vector<double> sigma_x;
    std::vector<double> sigma_y;
    std::vector<int> visible_counts;
    MpdConfig config_used;
    // False when the camera-level verdict skipped point detection entirely.
    bool computed = false;

    int num_points() const { return static_cast<int>(static_flags.size()); }
};

// Population standard deviation (1/n) of each coordinate over the visible
// frames only, two-pass in double precision. Fewer than 2 visible frames
// yields sigma 0.
PointDeviation point_deviation(std::span<const float> track_xy,
                               std::span<const std::uint8_t> visibility);

// Per point: static iff sigma_x < rho AND sigma_y < rho, or visible count
// below min_visible.
PointMotionFlags detect_static_points(const TrackSet& tracks, const MpdConfig& cfg = {});

} // namespace fpd
