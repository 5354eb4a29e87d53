#include "fpd/mcmd.hpp"

#include "fpd/error.hpp"
#include "fpd/rng.hpp"
#include "fpd/synth.hpp"
#include "oracle_helpers.hpp"

#include <doctest.h>

using namespace fpd;
using test::constant_frame;
using test::random_frame;

namespace {

SceneSpec basic_scene(int frames, CameraModel model, double vx, std::uint64_t seed) {
    SceneSpec spec;
    spec.width = 96;
    spec.height = 96;
    spec.num_frames = frames;
    spec.fps = 30.0;
    spec.camera.model = model;
    spec.camera.vx = vx;
    spec.texture_seed = seed;
    return spec;
}

} // namespace

TEST_CASE("partition_clips splits and merges as specified") {
    auto ranges = partition_clips(300, 30.0, 5.0);
    REQUIRE(ranges.size() == 2);
    CHECK(ranges[0].begin == 0);
    CHECK(ranges[0].end == 150);
    CHECK(ranges[1].begin == 150);
    CHECK(ranges[1].end == 300);

    ranges = partition_clips(10, 30.0, 5.0);
    REQUIRE(ranges.size() == 1);
    CHECK(ranges[0].end == 10);

    // 1-frame tail merges into the previous clip.
    ranges = partition_clips(151, 30.0, 5.0);
    REQUIRE(ranges.size() == 1);
    CHECK(ranges[0].begin == 0);
    CHECK(ranges[0].end == 151);

    // A 2-frame tail stays.
    ranges = partition_clips(152, 30.0, 5.0);
    REQUIRE(ranges.size() == 2);
    CHECK(ranges[1].begin == 150);
    CHECK(ranges[1].end == 152);
}

TEST_CASE("partition_clips covers [0, T) disjointly") {
    SplitMix64 rng(23);
    for (int k = 0; k < 50; ++k) {
        const int t = 1 + static_cast<int>(rng.next() % 400);
        const double fps = 1.0 + rng.uniform() * 59.0;
        const double secs = 0.1 + rng.uniform() * 9.9;
        auto ranges = partition_clips(t, fps, secs);
        REQUIRE(!ranges.empty());
        CHECK(ranges.front().begin == 0);
        CHECK(ranges.back().end == t);
        for (std::size_t i = 0; i < ranges.size(); ++i) {
            CHECK(ranges[i].length() >= 1);
            if (i > 0)
                CHECK(ranges[i].begin == ranges[i - 1].end);
        }
    }
}

TEST_CASE("moving_score on identical frames is (false, 0)") {
    std::vector<Frame> frames(20, constant_frame(32, 32, 0.5f));
    MovingScore s = moving_score(frames, 0.5, 0.5);
    CHECK_FALSE(s.moving);
    CHECK(s.fraction == 0.0);
}

TEST_CASE("moving_score on a single frame is (false, 0)") {
    std::vector<Frame> frames(1, constant_frame(32, 32, 0.5f));
    MovingScore s = moving_score(frames, 0.5, 0.5);
    CHECK_FALSE(s.moving);
    CHECK(s.fraction == 0.0);
}

TEST_CASE("moving_score counts dissimilar frames against the first") {
    // Frames 0-9 equal frame 0; frames 10-19 are independent noise, whose
    // SSIM against frame 0 sits near zero, far below lambda = 0.5.
    SplitMix64 rng(31);
    std::vector<Frame> frames;
    Frame ref = random_frame(48, 48, rng);
    for (int t = 0; t < 10; ++t)
        frames.push_back(ref);
    for (int t = 0; t < 10; ++t)
        frames.push_back(random_frame(48, 48, rng));

    std::vector<double> ssims;
    MovingScore s = moving_score(frames, 0.5, 0.4, &ssims);
    REQUIRE(ssims.size() == 20);
    for (int t = 0; t < 10; ++t)
        CHECK(ssims[static_cast<std::size_t>(t)] == doctest::Approx(1.0).epsilon(1e-9));
    for (int t = 10; t < 20; ++t)
        CHECK(ssims[static_cast<std::size_t>(t)] < 0.5);
    CHECK(s.fraction == 0.5);
    CHECK(s.moving); // 0.5 > 0.4
    CHECK_FALSE(moving_score(frames, 0.5, 0.5).moving); // 0.5 > 0.5 is false
}

TEST_CASE("static scene yields a static verdict") {
    SceneSpec spec = basic_scene(60, CameraModel::static_cam, 0.0, 7);
    spec.blobs.push_back({20, 48, 0.8, 0.0, 4.0});
    SceneOutput scene = generate_scene(spec);
    CameraMotionResult r = detect_camera_motion(scene.video);
    CHECK_FALSE(r.moving);
    CHECK_FALSE(r.coarse_moving);
}

TEST_CASE("textured pan yields a moving verdict") {
    SceneOutput scene = generate_scene(basic_scene(60, CameraModel::pan, 2.0, 8));
    CameraMotionResult r = detect_camera_motion(scene.video);
    CHECK(r.moving);
    CHECK(r.coarse_fraction > 0.5);
    bool any_clip = false;
    for (const auto& c : r.clips)
        any_clip = any_clip || c.moving;
    CHECK(any_clip);
}

TEST_CASE("slow drift fires coarse but not fine: AND rule keeps it static") {
    // 0.05 px/frame, 1-second clips: in-clip shift stays ~1.5 px (similar),
    // while the whole video drifts 15 px (coarse pass decorrelates).
    SceneSpec spec = basic_scene(300, CameraModel::slow_drift, 0.05, 9);
    SceneOutput scene = generate_scene(spec);
    McmdConfig cfg;
    cfg.clip_seconds = 1.0;
    CameraMotionResult r = detect_camera_motion(scene.video, cfg);
    CHECK(r.coarse_moving);
    for (const auto& c : r.clips)
        CHECK_FALSE(c.moving);
    CHECK_FALSE(r.moving);
}

TEST_CASE("verdict is monotone in lambda and eta") {
    SceneSpec spec = basic_scene(40, CameraModel::pan, 1.0, 12);
    SceneOutput scene = generate_scene(spec);

    McmdConfig cfg;
    double prev_fraction = -1.0;
    for (double lambda : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        cfg.lambda_coarse = lambda;
        CameraMotionResult r = detect_camera_motion(scene.video, cfg);
        CHECK(r.coarse_fraction >= prev_fraction);
        prev_fraction = r.coarse_fraction;
    }

    cfg = McmdConfig{};
    bool prev_moving = true;
    for (double eta : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        cfg.eta = eta;
        CameraMotionResult r = detect_camera_motion(scene.video, cfg);
        if (!prev_moving)
            CHECK_FALSE(r.moving); // raising eta never flips static -> moving
        prev_moving = r.moving;
    }
}

TEST_CASE("a video of copies of one frame is static under any config") {
    VideoSequence video;
    video.fps = 24.0;
    video.width = 40;
    video.height = 40;
    SplitMix64 rng(3);
    Frame f = random_frame(40, 40, rng);
    for (int t = 0; t < 50; ++t)
        video.frames.push_back(f);
    for (double lambda : {0.2, 0.5, 0.9}) {
        for (double eta : {0.1, 0.5, 0.9}) {
            McmdConfig cfg;
            cfg.lambda_coarse = cfg.lambda_fine = lambda;
            cfg.eta = eta;
            CHECK_FALSE(detect_camera_motion(video, cfg).moving);
        }
    }
}

TEST_CASE("config validation") {
    McmdConfig cfg;
    cfg.eta = 1.5;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    CHECK_THROWS_AS(partition_clips(0, 30.0, 5.0), ConfigError);
    CHECK_THROWS_AS(partition_clips(10, -1.0, 5.0), ConfigError);
}
