#include "fpd/mcmd.hpp"

#include "fpd/error.hpp"
#include "fpd/parallel.hpp"

#include <cmath>

namespace fpd {

void McmdConfig::validate() const {
    if (!(lambda_coarse > 0.0 && lambda_coarse < 1.0))
        throw ConfigError("mcmd: lambda_coarse must be in (0,1)");
    if (!(lambda_fine > 0.0 && lambda_fine < 1.0))
        throw ConfigError("mcmd: lambda_fine must be in (0,1)");
    if (!(eta > 0.0 && eta < 1.0))
        throw ConfigError("mcmd: eta must be in (0,1)");
    if (!(clip_seconds > 0.0))
        throw ConfigError("mcmd: clip_seconds must be positive");
}

std::vector<FrameRange> partition_clips(int frame_count, double fps, double clip_seconds) {
    if (frame_count < 1)
        throw ConfigError("partition_clips: frame_count must be >= 1");
    if (!(fps > 0.0) || !(clip_seconds > 0.0))
        throw ConfigError("partition_clips: fps and clip_seconds must be positive");

    const int clip_len = std::max(1, static_cast<int>(std::llround(clip_seconds * fps)));
    std::vector<FrameRange> ranges;
    for (int begin = 0; begin < frame_count; begin += clip_len)
        ranges.push_back({begin, std::min(begin + clip_len, frame_count)});
    // A 1-frame tail carries no similarity signal; fold it into its neighbor.
    if (ranges.size() > 1 && ranges.back().length() < 2) {
        ranges[ranges.size() - 2].end = ranges.back().end;
        ranges.pop_back();
    }
    return ranges;
}

MovingScore moving_score(std::span<const Frame> frames, double lambda, double eta,
                         std::vector<double>* ssim_out) {
    if (frames.empty())
        throw ConfigError("moving_score: need at least one frame");
    const std::int64_t t_count = static_cast<std::int64_t>(frames.size());
    std::vector<double> scores(static_cast<std::size_t>(t_count), 1.0);
    parallel_for(t_count - 1, [&](std::int64_t k) {
        const std::size_t t = static_cast<std::size_t>(k) + 1;
        scores[t] = ssim(frames[0], frames[t]);
    });

    std::int64_t dissimilar = 0;
    for (double s : scores)
        if (s < lambda)
            ++dissimilar;
    MovingScore result;
    result.fraction = static_cast<double>(dissimilar) / static_cast<double>(t_count);
    result.moving = result.fraction > eta;
    if (ssim_out)
        *ssim_out = std::move(scores);
    return result;
}

CameraMotionResult detect_camera_motion(const VideoSequence& video, const McmdConfig& cfg) {
    cfg.validate();
    if (video.frames.empty())
        throw ConfigError("detect_camera_motion: empty video");

    std::vector<Frame> gray(video.frames.size());
    parallel_for(static_cast<std::int64_t>(video.frames.size()), [&](std::int64_t i) {
        gray[static_cast<std::size_t>(i)] = to_grayscale(video.frames[static_cast<std::size_t>(i)]);
    });

    CameraMotionResult result;
    result.config_used = cfg;

    MovingScore coarse = moving_score(std::span<const Frame>(gray), cfg.lambda_coarse, cfg.eta,
                                      &result.coarse_ssim);
    result.coarse_fraction = coarse.fraction;
    result.coarse_moving = coarse.moving;

    bool any_clip_moving = false;
    for (const FrameRange& range :
         partition_clips(video.frame_count(), video.fps, cfg.clip_seconds)) {
        std::span<const Frame> clip(gray.data() + range.begin,
                                    static_cast<std::size_t>(range.length()));
        MovingScore fine = moving_score(clip, cfg.lambda_fine, cfg.eta);
        result.clips.push_back({range, fine.fraction, fine.moving});
        any_clip_moving = any_clip_moving || fine.moving;
    }

    result.moving = result.coarse_moving && any_clip_moving;
    return result;
}

} // namespace fpd
