#include "fpd/mpd.hpp"

#include "fpd/error.hpp"
#include "fpd/parallel.hpp"

#include <cmath>

namespace fpd {

void MpdConfig::validate() const {
    if (!(rho > 0.0))
        throw ConfigError("mpd: rho must be positive");
    if (min_visible < 1)
        throw ConfigError("mpd: min_visible must be >= 1");
}

PointDeviation point_deviation(std::span<const float> track_xy,
                               std::span<const std::uint8_t> visibility) {
    const std::size_t t_count = visibility.size();
    if (track_xy.size() != t_count * 2)
        throw InvariantError("point_deviation: shape mismatch");

    PointDeviation d;
    double sum_x = 0.0, sum_y = 0.0;
    for (std::size_t t = 0; t < t_count; ++t) {
        if (!visibility[t])
            continue;
        sum_x += track_xy[t * 2];
        sum_y += track_xy[t * 2 + 1];
        ++d.n_visible;
    }
    if (d.n_visible < 2)
        return d;

    const double n = static_cast<double>(d.n_visible);
    const double mean_x = sum_x / n;
    const double mean_y = sum_y / n;
    double ss_x = 0.0, ss_y = 0.0;
    for (std::size_t t = 0; t < t_count; ++t) {
        if (!visibility[t])
            continue;
        const double dx = track_xy[t * 2] - mean_x;
        const double dy = track_xy[t * 2 + 1] - mean_y;
        ss_x += dx * dx;
        ss_y += dy * dy;
    }
    d.sigma_x = std::sqrt(ss_x / n);
    d.sigma_y = std::sqrt(ss_y / n);
    return d;
}

PointMotionFlags detect_static_points(const TrackSet& tracks, const MpdConfig& cfg) {
    cfg.validate();
    const int m = tracks.num_points;
    PointMotionFlags flags;
    flags.config_used = cfg;
    flags.computed = true;
    flags.static_flags.resize(static_cast<std::size_t>(m));
    flags.sigma_x.resize(static_cast<std::size_t>(m));
    flags.sigma_y.resize(static_cast<std::size_t>(m));
    flags.visible_counts.resize(static_cast<std::size_t>(m));

    parallel_for(m, [&](std::int64_t i) {
        const int p = static_cast<int>(i);
        const PointDeviation d = point_deviation(tracks.point_xy(p), tracks.point_visibility(p));
        flags.sigma_x[i] = d.sigma_x;
        flags.sigma_y[i] = d.sigma_y;
        flags.visible_counts[i] = d.n_visible;
        flags.static_flags[i] =
            (d.n_visible < cfg.min_visible || (d.sigma_x < cfg.rho && d.sigma_y < cfg.rho)) ? 1
                                                                                            : 0;
    });
    return flags;
}

} // namespace fpd
