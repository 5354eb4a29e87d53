#include "fpd/video_io.hpp"

#include "fpd/error.hpp"
#include "fpd/rng.hpp"
#include "oracle_helpers.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

namespace fs = std::filesystem;
using namespace fpd;
using test::constant_frame;
using test::random_frame;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("fpd_test_" + tag);
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

Frame rgb_pixel(float r, float g, float b) {
    Frame f;
    f.width = 1;
    f.height = 1;
    f.channels = 3;
    f.pixels = {r, g, b};
    return f;
}

} // namespace

TEST_CASE("grayscale coefficients") {
    CHECK(to_grayscale(rgb_pixel(1, 1, 1)).pixels[0] == 1.0f);
    CHECK(to_grayscale(rgb_pixel(0, 0, 0)).pixels[0] == 0.0f);
    CHECK(to_grayscale(rgb_pixel(1, 0, 0)).pixels[0] == doctest::Approx(0.2126).epsilon(1e-12));
    CHECK(to_grayscale(rgb_pixel(0, 1, 0)).pixels[0] == doctest::Approx(0.7152).epsilon(1e-12));
    CHECK(to_grayscale(rgb_pixel(0, 0, 1)).pixels[0] == doctest::Approx(0.0722).epsilon(1e-12));
}

TEST_CASE("grayscale is the identity on gray frames and idempotent") {
    SplitMix64 rng(3);
    Frame gray = random_frame(12, 7, rng);
    Frame once = to_grayscale(gray);
    CHECK(once.pixels == gray.pixels);

    Frame rgb;
    rgb.width = 12;
    rgb.height = 7;
    rgb.channels = 3;
    for (int i = 0; i < 12 * 7 * 3; ++i)
        rgb.pixels.push_back(static_cast<float>(rng.uniform()));
    Frame g1 = to_grayscale(rgb);
    Frame g2 = to_grayscale(g1);
    CHECK(g1.pixels == g2.pixels);
    for (float p : g1.pixels) {
        CHECK(p >= 0.0f);
        CHECK(p <= 1.0f);
    }
}

TEST_CASE("grayscale rejects odd channel counts") {
    Frame f;
    f.width = 1;
    f.height = 1;
    f.channels = 2;
    f.pixels = {0.5f, 0.5f};
    CHECK_THROWS_AS(to_grayscale(f), FormatError);
}

TEST_CASE("png round trip preserves 8-bit values") {
    TempDir dir("png_rt");
    SplitMix64 rng(17);
    Frame f = random_frame(23, 9, rng);
    // Snap to the 8-bit grid so the round trip is exact.
    for (auto& p : f.pixels)
        p = static_cast<float>(std::lround(p * 255.0f)) / 255.0f;
    save_png(f, dir.path / "f.png");
    Frame back = load_image(dir.path / "f.png");
    REQUIRE(back.same_shape(f));
    CHECK(back.pixels == f.pixels);
}

TEST_CASE("ppm round trip, gray and rgb") {
    TempDir dir("ppm_rt");
    Frame gray = constant_frame(8, 8, 127.0f / 255.0f);
    save_ppm(gray, dir.path / "g.pgm");
    CHECK(load_image(dir.path / "g.pgm").pixels == gray.pixels);

    Frame rgb = constant_frame(8, 8, 10.0f / 255.0f, 3);
    save_ppm(rgb, dir.path / "c.ppm");
    Frame back = load_image(dir.path / "c.ppm");
    CHECK(back.channels == 3);
    CHECK(back.pixels == rgb.pixels);
}

TEST_CASE("load_frame_sequence orders lexicographically and defaults fps") {
    TempDir dir("seq");
    Frame f = constant_frame(64, 64, 0.25f);
    for (int i = 0; i < 10; ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "frame_%06d.png", i);
        save_png(f, dir.path / name);
    }
    VideoSequence v = load_frame_sequence(dir.path);
    CHECK(v.frame_count() == 10);
    CHECK(v.fps == 30.0);
    CHECK(v.width == 64);
    CHECK(v.height == 64);

    VideoSequence again = load_frame_sequence(dir.path);
    REQUIRE(again.frame_count() == v.frame_count());
    for (int t = 0; t < 10; ++t)
        CHECK(again.frames[static_cast<std::size_t>(t)].pixels ==
              v.frames[static_cast<std::size_t>(t)].pixels);
}

TEST_CASE("manifest supplies fps") {
    TempDir dir("manifest");
    save_ppm(constant_frame(256, 256, 0.5f), dir.path / "only.ppm");
    std::ofstream(dir.path / "manifest.json") << R"({"fps": 25, "width": 256, "height": 256})";
    VideoSequence v = load_frame_sequence(dir.path);
    CHECK(v.frame_count() == 1);
    CHECK(v.fps == 25.0);

    VideoSequence explicit_manifest =
        load_frame_sequence(dir.path, dir.path / "manifest.json");
    CHECK(explicit_manifest.fps == 25.0);
}

TEST_CASE("manifest errors") {
    TempDir dir("manifest_bad");
    save_png(constant_frame(32, 32, 0.5f), dir.path / "a.png");
    std::ofstream(dir.path / "manifest.json") << R"({"fps": 0})";
    CHECK_THROWS_AS(load_frame_sequence(dir.path), FormatError);

    std::ofstream(dir.path / "manifest.json", std::ios::trunc) << R"({"width": 99})";
    CHECK_THROWS_AS(load_frame_sequence(dir.path), FormatError);

    // Unknown keys are ignored.
    std::ofstream(dir.path / "manifest.json", std::ios::trunc)
        << R"({"fps": 12.5, "codec": "raw"})";
    CHECK(load_frame_sequence(dir.path).fps == 12.5);
}

TEST_CASE("mixed dimensions are rejected") {
    TempDir dir("mixed");
    save_png(constant_frame(64, 64, 0.1f), dir.path / "a.png");
    save_png(constant_frame(32, 32, 0.1f), dir.path / "b.png");
    CHECK_THROWS_WITH_AS(load_frame_sequence(dir.path),
                         doctest::Contains("mixed dimensions"), FormatError);
}

TEST_CASE("empty directory and undecodable file are rejected") {
    TempDir dir("empty");
    CHECK_THROWS_AS(load_frame_sequence(dir.path), FormatError);
    std::ofstream(dir.path / "junk.png") << "not a png";
    CHECK_THROWS_AS(load_frame_sequence(dir.path), FormatError);
}

TEST_CASE("truncated ppm is rejected") {
    TempDir dir("trunc");
    std::ofstream(dir.path / "t.ppm", std::ios::binary) << "P6\n4 4\n255\nxx";
    CHECK_THROWS_AS(load_image(dir.path / "t.ppm"), FormatError);
}
