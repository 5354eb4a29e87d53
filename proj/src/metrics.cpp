#include "fpd/metrics.hpp"

#include "fpd/error.hpp"
#include "fpd/parallel.hpp"

#include <cmath>

namespace fpd {

namespace {

void check_comparable(const TrackSet& pred, const TrackSet& gt) {
    if (pred.num_points != gt.num_points || pred.num_frames != gt.num_frames)
        throw FormatError("metrics: pred/gt shape mismatch");
    for (int i = 0; i < pred.num_points; ++i)
        if (pred.queries[static_cast<std::size_t>(i)].frame !=
            gt.queries[static_cast<std::size_t>(i)].frame)
            throw FormatError("metrics: pred/gt query frame mismatch at point " +
                              std::to_string(i));
}

// Counts for all thresholds over one point's slots.
void count_point(const TrackSet& pred, const TrackSet& gt, int point, const MetricsConfig& cfg,
                 std::vector<ThresholdCounts>& counts, long long& slots) {
    const int query_frame = gt.queries[static_cast<std::size_t>(point)].frame;
    for (int t = 0; t < gt.num_frames; ++t) {
        if (cfg.exclude_query_frame && t == query_frame)
            continue;
        ++slots;
        const bool pv = pred.visible(point, t);
        const bool gv = gt.visible(point, t);
        if (!pv && !gv)
            continue;
        const double dx =
            (static_cast<double>(pred.x(point, t)) - gt.x(point, t)) * cfg.eval_width;
        const double dy =
            (static_cast<double>(pred.y(point, t)) - gt.y(point, t)) * cfg.eval_height;
        const double dist_sq = dx * dx + dy * dy;
        for (auto& c : counts) {
            const bool within = dist_sq <= c.delta * c.delta;
            if (pv && gv && within)
                ++c.tp;
            if (pv && (!gv || !within))
                ++c.fp;
            if (gv && (!pv || !within))
                ++c.fn;
        }
    }
}

} // namespace

void MetricsConfig::validate() const {
    if (thresholds.empty())
        throw ConfigError("metrics: need at least one threshold");
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
        if (!(thresholds[i] > 0.0))
            throw ConfigError("metrics: thresholds must be positive");
        if (i > 0 && !(thresholds[i] > thresholds[i - 1]))
            throw ConfigError("metrics: thresholds must be strictly increasing");
    }
    if (eval_width < 1 || eval_height < 1)
        throw ConfigError("metrics: eval resolution must be positive");
}

ThresholdCounts jaccard_at(const TrackSet& pred, const TrackSet& gt, double delta_px,
                           const MetricsConfig& cfg) {
    MetricsConfig one = cfg;
    one.thresholds = {delta_px};
    MetricsReport report = average_jaccard(pred, gt, one);
    return report.per_threshold.front();
}

MetricsReport average_jaccard(const TrackSet& pred, const TrackSet& gt, const MetricsConfig& cfg,
                              std::span<const std::uint8_t> point_mask) {
    cfg.validate();
    check_comparable(pred, gt);
    if (!point_mask.empty() && point_mask.size() != static_cast<std::size_t>(gt.num_points))
        throw ConfigError("metrics: point mask size mismatch");

    const int m = gt.num_points;
    std::vector<std::vector<ThresholdCounts>> per_point(static_cast<std::size_t>(m));
    std::vector<long long> per_point_slots(static_cast<std::size_t>(m), 0);
    int points_evaluated = 0;
    for (int i = 0; i < m; ++i)
        if (point_mask.empty() || point_mask[static_cast<std::size_t>(i)])
            ++points_evaluated;

    parallel_for(m, [&](std::int64_t i) {
        if (!point_mask.empty() && !point_mask[static_cast<std::size_t>(i)])
            return;
        auto& counts = per_point[static_cast<std::size_t>(i)];
        counts.resize(cfg.thresholds.size());
        for (std::size_t k = 0; k < cfg.thresholds.size(); ++k)
            counts[k].delta = cfg.thresholds[k];
        count_point(pred, gt, static_cast<int>(i), cfg, counts,
                    per_point_slots[static_cast<std::size_t>(i)]);
    });

    MetricsReport report;
    report.num_points = points_evaluated;
    report.num_frames = gt.num_frames;
    report.per_threshold.resize(cfg.thresholds.size());
    for (std::size_t k = 0; k < cfg.thresholds.size(); ++k)
        report.per_threshold[k].delta = cfg.thresholds[k];
    for (int i = 0; i < m; ++i) {
        const auto& counts = per_point[static_cast<std::size_t>(i)];
        if (counts.empty())
            continue;
        report.num_slots_evaluated += per_point_slots[static_cast<std::size_t>(i)];
        for (std::size_t k = 0; k < counts.size(); ++k) {
            report.per_threshold[k].tp += counts[k].tp;
            report.per_threshold[k].fp += counts[k].fp;
            report.per_threshold[k].fn += counts[k].fn;
        }
    }

    double sum = 0.0;
    for (const auto& c : report.per_threshold)
        sum += c.jaccard();
    report.average_jaccard = sum / static_cast<double>(report.per_threshold.size());
    return report;
}

} // namespace fpd
