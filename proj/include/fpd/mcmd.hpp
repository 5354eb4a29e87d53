#pragma once

#include "fpd/ssim.hpp"
#include "fpd/video_io.hpp"

#include <span>
#include <vector>

namespace fpd {

// Camera motion detection thresholds. lambda_coarse / lambda_fine are the
// SSIM dissimilarity cutoffs for the whole-video and per-clip passes; eta is
// the fraction of dissimilar frames above which a pass votes "moving".
struct McmdConfig {
    double lambda_coarse = 0.5;
    double lambda_fine = 0.46;
    double eta = 0.5;
    double clip_seconds = 5.0;

    void validate() const;
};

// Half-open frame range [begin, end).
struct FrameRange {
    int begin = 0;
    int end = 0;
    int length() const { return end - begin; }
};

struct ClipResult {
    FrameRange range;
    double fraction = 0.0;
    bool moving = false;
};

struct MovingScore {
    bool moving = false;
    double fraction = 0.0;
};

struct CameraMotionResult {
    bool moving = false;
    double coarse_fraction = 0.0;
    bool coarse_moving = false;
    std::vector<ClipResult> clips;
    McmdConfig config_used;
    // SSIM of every frame against frame 0 (coarse pass), for diagnostics.
    std::vector<double> coarse_ssim;
};

// Consecutive non-overlapping ranges of round(clip_seconds * fps) frames
// covering [0, frame_count). A trailing clip shorter than 2 frames is merged
// into the previous one (kept alone if it is the only clip).
std::vector<FrameRange> partition_clips(int frame_count, double fps, double clip_seconds);

// Fraction of frames whose SSIM against the first frame falls below lambda;
// the verdict is fraction > eta. The reference frame itself scores 1.0 and
// counts in the denominator. Frames must be grayscale. When ssim_out is
// non-null it receives the per-frame SSIM values.
MovingScore moving_score(std::span<const Frame> frames, double lambda, double eta,
                         std::vector<double>* ssim_out = nullptr);

// Coarse pass over the whole video AND fine pass (OR over clips, each clip
// referenced to its own first frame). Frames are grayscaled up front.
CameraMotionResult detect_camera_motion(const VideoSequence& video, const McmdConfig& cfg = {});

} // namespace fpd
