#pragma once

#include "fpd/tracks.hpp"

#include <vector>

namespace fpd {

// Distances are measured in a fixed metric pixel space: normalized deltas
// scaled by eval_width / eval_height. Query frames are excluded from scoring
// by default (their location is given, not predicted).
struct MetricsConfig {
    std::vector<double> thresholds = {1.0, 2.0, 4.0, 8.0, 16.0};
    int eval_width = 256;
    int eval_height = 256;
    bool exclude_query_frame = true;

    void validate() const;
};

struct ThresholdCounts {
    double delta = 0.0;
    long long tp = 0;
    long long fp = 0;
    long long fn = 0;

    // 0/0 is defined as 1.0 so empty evaluations do not poison averages.
    double jaccard() const {
        const long long den = tp + fp + fn;
        return den == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(den);
    }
};

struct MetricsReport {
    std::vector<ThresholdCounts> per_threshold;
    double average_jaccard = 0.0;
    int num_points = 0;
    int num_frames = 0;
    long long num_slots_evaluated = 0;
};

// Slot rules (TAP-Vid convention), evaluated per (point, frame):
//   TP: pred visible, gt visible, distance <= delta
//   FP: pred visible and (gt occluded or distance > delta)
//   FN: gt visible and (pred occluded or distance > delta)
// A within-visibility miss on distance counts as both FP and FN.
ThresholdCounts jaccard_at(const TrackSet& pred, const TrackSet& gt, double delta_px,
                           const MetricsConfig& cfg = {});

// Per-threshold Jaccard over cfg.thresholds plus their arithmetic mean.
// point_mask, when non-empty, restricts scoring to points with mask != 0
// (size M).
MetricsReport average_jaccard(const TrackSet& pred, const TrackSet& gt,
                              const MetricsConfig& cfg = {},
                              std::span<const std::uint8_t> point_mask = {});

} // namespace fpd
