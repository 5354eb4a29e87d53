// Test-only reference implementations. These stay deliberately naive and
// independent of the optimized library code paths they check.
#pragma once

#include "fpd/metrics.hpp"
#include "fpd/rng.hpp"
#include "fpd/ssim.hpp"
#include "fpd/tracks.hpp"
#include "fpd/video_io.hpp"

#include <cmath>
#include <vector>

namespace fpd::test {

// Direct window-by-window SSIM: per valid window position, two-pass means,
// variances and covariance with the configured normalization, then the mean
// of the map (row-major).
inline double naive_ssim(const Frame& a, const Frame& b, const SsimConfig& cfg = {}) {
    const int win = cfg.window_size;
    const double n = static_cast<double>(win) * win;
    const double norm = cfg.sample_covariance ? n - 1.0 : n;
    const double c1 = (cfg.k1 * cfg.data_range) * (cfg.k1 * cfg.data_range);
    const double c2 = (cfg.k2 * cfg.data_range) * (cfg.k2 * cfg.data_range);

    double total = 0.0;
    long long count = 0;
    for (int y0 = 0; y0 + win <= a.height; ++y0) {
        for (int x0 = 0; x0 + win <= a.width; ++x0) {
            double mu_a = 0.0, mu_b = 0.0;
            for (int y = y0; y < y0 + win; ++y)
                for (int x = x0; x < x0 + win; ++x) {
                    mu_a += a.at(y, x);
                    mu_b += b.at(y, x);
                }
            mu_a /= n;
            mu_b /= n;
            double var_a = 0.0, var_b = 0.0, cov = 0.0;
            for (int y = y0; y < y0 + win; ++y)
                for (int x = x0; x < x0 + win; ++x) {
                    const double da = a.at(y, x) - mu_a;
                    const double db = b.at(y, x) - mu_b;
                    var_a += da * da;
                    var_b += db * db;
                    cov += da * db;
                }
            var_a /= norm;
            var_b /= norm;
            cov /= norm;
            total += ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)) /
                     ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
            ++count;
        }
    }
    return total / static_cast<double>(count);
}

// Full enumeration of every (point, frame) slot for a single threshold. Uses
// the same squared-distance comparison convention as the library.
struct NaiveCounts {
    long long tp = 0;
    long long fp = 0;
    long long fn = 0;
};

inline NaiveCounts naive_jaccard_counts(const TrackSet& pred, const TrackSet& gt, double delta,
                                        const MetricsConfig& cfg = {}) {
    NaiveCounts c;
    for (int i = 0; i < gt.num_points; ++i) {
        for (int t = 0; t < gt.num_frames; ++t) {
            if (cfg.exclude_query_frame && t == gt.queries[static_cast<std::size_t>(i)].frame)
                continue;
            const bool pv = pred.visible(i, t);
            const bool gv = gt.visible(i, t);
            const double dx = (static_cast<double>(pred.x(i, t)) - gt.x(i, t)) * cfg.eval_width;
            const double dy = (static_cast<double>(pred.y(i, t)) - gt.y(i, t)) * cfg.eval_height;
            const bool within = dx * dx + dy * dy <= delta * delta;
            if (pv && gv && within)
                ++c.tp;
            if (pv && (!gv || !within))
                ++c.fp;
            if (gv && (!pv || !within))
                ++c.fn;
        }
    }
    return c;
}

inline Frame random_frame(int width, int height, SplitMix64& rng) {
    Frame f;
    f.width = width;
    f.height = height;
    f.channels = 1;
    f.pixels.resize(static_cast<std::size_t>(width) * height);
    for (auto& p : f.pixels)
        p = static_cast<float>(rng.uniform());
    return f;
}

inline Frame constant_frame(int width, int height, float value, int channels = 1) {
    Frame f;
    f.width = width;
    f.height = height;
    f.channels = channels;
    f.pixels.assign(static_cast<std::size_t>(width) * height * channels, value);
    return f;
}

// Random track pair sharing shape and queries, for metric equivalence runs.
inline std::pair<TrackSet, TrackSet> random_track_pair(int m, int t, SplitMix64& rng) {
    TrackSet gt = TrackSet::zeros(m, t);
    TrackSet pred = TrackSet::zeros(m, t);
    for (int i = 0; i < m; ++i) {
        const int e = static_cast<int>(rng.next() % static_cast<std::uint64_t>(t));
        for (int k = 0; k < t; ++k) {
            gt.set_xy(i, k, static_cast<float>(rng.uniform()), static_cast<float>(rng.uniform()));
            gt.set_visible(i, k, k == e || rng.uniform() < 0.7);
            // Predictions near the truth so thresholds actually separate.
            pred.set_xy(i, k,
                        static_cast<float>(gt.x(i, k) + (rng.uniform() - 0.5) * 0.1),
                        static_cast<float>(gt.y(i, k) + (rng.uniform() - 0.5) * 0.1));
            pred.set_visible(i, k, k == e || rng.uniform() < 0.7);
        }
        gt.queries[static_cast<std::size_t>(i)] = {e, gt.x(i, e), gt.y(i, e)};
        pred.queries[static_cast<std::size_t>(i)] = gt.queries[static_cast<std::size_t>(i)];
    }
    return {std::move(pred), std::move(gt)};
}

} // namespace fpd::test
