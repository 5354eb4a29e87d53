#pragma once

#include <filesystem>
#include <optional>
#include <vector>

namespace fpd {

// Row-major intensity grid, values in [0, 1]. channels is 1 (gray) or 3
// (RGB, interleaved). 8-bit file inputs are divided by 255 on load.
struct Frame {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<float> pixels;

    float at(int y, int x, int c = 0) const {
        return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    float& at(int y, int x, int c = 0) {
        return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    bool same_shape(const Frame& o) const {
        return width == o.width && height == o.height && channels == o.channels;
    }
};

// Ordered frame sequence with shared dimensions. Immutable once loaded;
// safe to share across parallel workers.
struct VideoSequence {
    std::vector<Frame> frames;
    double fps = 30.0;
    int width = 0;
    int height = 0;

    int frame_count() const { return static_cast<int>(frames.size()); }
};

// Rec. 709 luma: Y = 0.2126 R + 0.7152 G + 0.0722 B, evaluated in the
// anchored form r + 0.7152 (g - r) + 0.0722 (b - r) so equal-channel pixels
// map to themselves exactly. Gray inputs are returned unchanged.
Frame to_grayscale(const Frame& frame);

// Decodes one PNG (8-bit gray or RGB; deeper inputs reduced to 8-bit) or
// binary PPM/PGM (P5/P6, maxval <= 255) file.
Frame load_image(const std::filesystem::path& path);

void save_png(const Frame& frame, const std::filesystem::path& path);
void save_ppm(const Frame& frame, const std::filesystem::path& path);

// Loads every *.png / *.ppm / *.pgm in dir, ordered by lexicographic
// filename (zero-padded numbering is the expected convention). An optional
// manifest.json supplies fps / width / height; when no manifest path is
// given, dir/manifest.json is used if present, else fps defaults to 30.
VideoSequence load_frame_sequence(const std::filesystem::path& dir,
                                  const std::optional<std::filesystem::path>& manifest = {});

} // namespace fpd
