#include "fpd/metrics.hpp"

#include "fpd/error.hpp"
#include "fpd/rng.hpp"
#include "oracle_helpers.hpp"

#include <doctest.h>

using namespace fpd;
using test::naive_jaccard_counts;
using test::random_track_pair;

TEST_CASE("perfect prediction scores 1 at every threshold") {
    SplitMix64 rng(4);
    auto [pred, gt] = random_track_pair(5, 9, rng);
    MetricsReport r = average_jaccard(gt, gt);
    CHECK(r.average_jaccard == 1.0);
    for (const auto& c : r.per_threshold) {
        CHECK(c.fp == 0);
        CHECK(c.fn == 0);
        CHECK(c.jaccard() == 1.0);
    }
}

TEST_CASE("all-occluded prediction counts every gt-visible slot as FN") {
    TrackSet gt = TrackSet::zeros(2, 6); // fully visible
    for (int i = 0; i < 2; ++i)
        gt.queries[static_cast<std::size_t>(i)] = {0, 0.0f, 0.0f};
    TrackSet pred = gt;
    pred.visibility.assign(pred.visibility.size(), 0);
    for (auto& q : pred.queries)
        (void)q;
    ThresholdCounts c = jaccard_at(pred, gt, 4.0);
    // 2 points x 5 evaluated frames (query frame excluded).
    CHECK(c.tp == 0);
    CHECK(c.fp == 0);
    CHECK(c.fn == 10);
    CHECK(c.jaccard() == 0.0);
}

TEST_CASE("three-slot enumeration: TP, FP, FN give jaccard 1/3") {
    TrackSet gt = TrackSet::zeros(1, 4);
    TrackSet pred = gt;
    for (int t = 0; t < 4; ++t) {
        gt.set_xy(0, t, 0.5f, 0.5f);
        pred.set_xy(0, t, 0.5f, 0.5f);
    }
    gt.queries[0] = pred.queries[0] = {0, 0.5f, 0.5f};
    // frame 1: both visible, d = 0 -> TP
    // frame 2: pred visible, gt occluded -> FP
    // frame 3: pred occluded, gt visible -> FN
    gt.set_visible(0, 2, false);
    pred.set_visible(0, 3, false);
    ThresholdCounts c = jaccard_at(pred, gt, 1.0);
    CHECK(c.tp == 1);
    CHECK(c.fp == 1);
    CHECK(c.fn == 1);
    CHECK(c.jaccard() == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("a 3 px offset passes thresholds 4, 8, 16 and fails 1, 2") {
    TrackSet gt = TrackSet::zeros(3, 8);
    SplitMix64 rng(14);
    for (int i = 0; i < 3; ++i) {
        const float x = 0.2f + 0.15f * static_cast<float>(i);
        for (int t = 0; t < 8; ++t)
            gt.set_xy(i, t, x, static_cast<float>(0.3 + 0.05 * i));
        gt.queries[static_cast<std::size_t>(i)] = {0, gt.x(i, 0), gt.y(i, 0)};
    }
    TrackSet pred = gt;
    for (int i = 0; i < 3; ++i)
        for (int t = 0; t < 8; ++t)
            pred.set_xy(i, t, pred.x(i, t) + 3.0f / 256.0f, pred.y(i, t));

    MetricsReport r = average_jaccard(pred, gt);
    CHECK(r.per_threshold[0].jaccard() == 0.0);
    CHECK(r.per_threshold[1].jaccard() == 0.0);
    CHECK(r.per_threshold[2].jaccard() == 1.0);
    CHECK(r.per_threshold[3].jaccard() == 1.0);
    CHECK(r.per_threshold[4].jaccard() == 1.0);
    CHECK(r.average_jaccard == 0.6);
    // Outside the threshold with both visible: the slot is both FP and FN.
    CHECK(r.per_threshold[0].fp == r.per_threshold[0].fn);
    CHECK(r.per_threshold[0].fp == 3 * 7);
}

TEST_CASE("matches the brute-force oracle with exact integer counts") {
    SplitMix64 rng(21);
    MetricsConfig cfg;
    for (int k = 0; k < 30; ++k) {
        const int m = 1 + static_cast<int>(rng.next() % 8);
        const int t = 2 + static_cast<int>(rng.next() % 11);
        auto [pred, gt] = random_track_pair(m, t, rng);
        MetricsReport r = average_jaccard(pred, gt, cfg);
        for (const auto& c : r.per_threshold) {
            auto n = naive_jaccard_counts(pred, gt, c.delta, cfg);
            CHECK(c.tp == n.tp);
            CHECK(c.fp == n.fp);
            CHECK(c.fn == n.fn);
        }
    }
}

TEST_CASE("jaccard is monotone in the threshold and satisfies the counting identity") {
    SplitMix64 rng(33);
    auto [pred, gt] = random_track_pair(6, 10, rng);
    MetricsReport r = average_jaccard(pred, gt);

    long long gt_visible = 0;
    for (int i = 0; i < gt.num_points; ++i)
        for (int t = 0; t < gt.num_frames; ++t)
            if (t != gt.queries[static_cast<std::size_t>(i)].frame && gt.visible(i, t))
                ++gt_visible;

    double prev = -1.0;
    for (const auto& c : r.per_threshold) {
        CHECK(c.jaccard() >= prev);
        prev = c.jaccard();
        CHECK(c.tp + c.fn == gt_visible);
    }
}

TEST_CASE("query frame inclusion is configurable") {
    TrackSet gt = TrackSet::zeros(1, 3);
    gt.queries[0] = {1, 0.0f, 0.0f};
    TrackSet pred = gt;
    MetricsConfig cfg;
    MetricsReport excl = average_jaccard(pred, gt, cfg);
    CHECK(excl.num_slots_evaluated == 2);
    cfg.exclude_query_frame = false;
    MetricsReport incl = average_jaccard(pred, gt, cfg);
    CHECK(incl.num_slots_evaluated == 3);
}

TEST_CASE("point masks restrict scoring") {
    SplitMix64 rng(55);
    auto [pred, gt] = random_track_pair(4, 6, rng);
    std::vector<std::uint8_t> mask = {1, 0, 0, 1};
    MetricsReport masked = average_jaccard(pred, gt, {}, mask);
    CHECK(masked.num_points == 2);

    // Equivalent to evaluating a 2-point subset directly.
    TrackSet sub_pred = TrackSet::zeros(2, 6);
    TrackSet sub_gt = TrackSet::zeros(2, 6);
    int out = 0;
    for (int i : {0, 3}) {
        for (int t = 0; t < 6; ++t) {
            sub_pred.set_xy(out, t, pred.x(i, t), pred.y(i, t));
            sub_pred.set_visible(out, t, pred.visible(i, t));
            sub_gt.set_xy(out, t, gt.x(i, t), gt.y(i, t));
            sub_gt.set_visible(out, t, gt.visible(i, t));
        }
        sub_pred.queries[static_cast<std::size_t>(out)] = pred.queries[static_cast<std::size_t>(i)];
        sub_gt.queries[static_cast<std::size_t>(out)] = gt.queries[static_cast<std::size_t>(i)];
        ++out;
    }
    MetricsReport direct = average_jaccard(sub_pred, sub_gt);
    CHECK(masked.average_jaccard == direct.average_jaccard);
}

TEST_CASE("empty evaluation defines jaccard as 1") {
    TrackSet gt = TrackSet::zeros(1, 1);
    gt.queries[0] = {0, 0.0f, 0.0f};
    MetricsReport r = average_jaccard(gt, gt);
    CHECK(r.num_slots_evaluated == 0);
    CHECK(r.average_jaccard == 1.0);
}

TEST_CASE("shape and config errors") {
    TrackSet a = TrackSet::zeros(2, 3);
    TrackSet b = TrackSet::zeros(2, 4);
    CHECK_THROWS_AS(average_jaccard(a, b), FormatError);

    MetricsConfig bad;
    bad.thresholds = {2.0, 1.0};
    CHECK_THROWS_AS(average_jaccard(a, a, bad), ConfigError);
}
