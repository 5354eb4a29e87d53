#pragma once

#include "fpd/mcmd.hpp"
#include "fpd/mpd.hpp"
#include "fpd/tracks.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace fpd {

// Names which track source supplies each branch of the per-point
// replacement. mpd_reference_source is the set the static-point test runs
// on; it defaults to static_camera_static_source when a policy file leaves
// it out. stabilize_static additionally snaps static rows to their
// per-coordinate median over visible frames.
struct FusionPolicy {
    std::string moving_camera_source;
    std::string static_camera_static_source;
    std::string static_camera_moving_source;
    std::string mpd_reference_source;
    bool stabilize_static = false;
};

FusionPolicy load_policy(const std::filesystem::path& path);

struct FusionResult {
    TrackSet tracks;
    PointMotionFlags flags; // computed == false when the camera was moving
};

// Moving camera: every row (coordinates and visibility) copies from
// moving_camera_source and the point test is skipped. Static camera: flags
// from mpd_reference_source decide per point between
// static_camera_static_source and static_camera_moving_source. All sources
// must agree on M, T and query points.
FusionResult fuse(const std::map<std::string, TrackSet>& sources,
                  const CameraMotionResult& camera, const FusionPolicy& policy,
                  const MpdConfig& mpd_cfg = {});

// Every frame's coordinate replaced by the per-coordinate median over
// visible frames; with no visible frame the row is returned unchanged.
std::vector<float> stabilize_static_track(std::span<const float> track_xy,
                                          std::span<const std::uint8_t> visibility);

} // namespace fpd
