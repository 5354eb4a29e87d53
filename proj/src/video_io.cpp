#include "fpd/video_io.hpp"

#include "fpd/error.hpp"
#include "fpd/parallel.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include <png.h>

#include <json.hpp>

namespace fs = std::filesystem;

namespace fpd {

namespace {

float clamp01(double v) {
    return static_cast<float>(std::min(1.0, std::max(0.0, v)));
}

bool has_extension(const fs::path& p, std::initializer_list<const char*> exts) {
    std::string e = p.extension().string();
    std::transform(e.begin(), e.end(), e.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (const char* want : exts)
        if (e == want)
            return true;
    return false;
}

Frame frame_from_bytes(const std::vector<unsigned char>& bytes, int width, int height,
                       int channels) {
    Frame f;
    f.width = width;
    f.height = height;
    f.channels = channels;
    f.pixels.resize(bytes.size());
    for (std::size_t i = 0; i < bytes.size(); ++i)
        f.pixels[i] = static_cast<float>(bytes[i]) / 255.0f;
    return f;
}

Frame load_png_file(const fs::path& path) {
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.string().c_str()))
        throw FormatError("undecodable PNG: " + path.string() + ": " + image.message);

    const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
    image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    const int channels = color ? 3 : 1;
    std::vector<unsigned char> bytes(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, bytes.data(), 0, nullptr)) {
        std::string msg = image.message;
        png_image_free(&image);
        throw FormatError("undecodable PNG: " + path.string() + ": " + msg);
    }
    return frame_from_bytes(bytes, static_cast<int>(image.width),
                            static_cast<int>(image.height), channels);
}

// Reads the next PNM header token, skipping whitespace and # comments.
std::string pnm_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {
            }
            continue;
        }
        if (std::isspace(c)) {
            if (!tok.empty())
                break;
            continue;
        }
        tok.push_back(static_cast<char>(c));
    }
    return tok;
}

Frame load_pnm_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw FormatError("cannot open: " + path.string());
    std::string magic = pnm_token(in);
    int channels = 0;
    if (magic == "P5")
        channels = 1;
    else if (magic == "P6")
        channels = 3;
    else
        throw FormatError("unsupported PNM magic '" + magic + "' in " + path.string());

    auto parse_int = [&](const char* what) {
        std::string tok = pnm_token(in);
        try {
            std::size_t pos = 0;
            int v = std::stoi(tok, &pos);
            if (pos != tok.size() || v <= 0)
                throw std::invalid_argument(what);
            return v;
        } catch (const std::exception&) {
            throw FormatError(std::string("bad PNM ") + what + " in " + path.string());
        }
    };
    int width = parse_int("width");
    int height = parse_int("height");
    int maxval = parse_int("maxval");
    if (maxval > 255)
        throw FormatError("16-bit PNM unsupported: " + path.string());

    std::vector<unsigned char> bytes(static_cast<std::size_t>(width) * height * channels);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (in.gcount() != static_cast<std::streamsize>(bytes.size()))
        throw FormatError("truncated PNM payload: " + path.string());
    if (maxval != 255)
        for (auto& b : bytes)
            b = static_cast<unsigned char>(
                std::lround(static_cast<double>(b) * 255.0 / maxval));
    return frame_from_bytes(bytes, width, height, channels);
}

std::vector<unsigned char> frame_to_bytes(const Frame& frame) {
    std::vector<unsigned char> bytes(frame.pixels.size());
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        float v = std::min(1.0f, std::max(0.0f, frame.pixels[i]));
        bytes[i] = static_cast<unsigned char>(std::lround(v * 255.0f));
    }
    return bytes;
}

} // namespace

Frame to_grayscale(const Frame& frame) {
    if (frame.channels == 1)
        return frame;
    if (frame.channels != 3)
        throw FormatError("to_grayscale: channel count must be 1 or 3, got " +
                          std::to_string(frame.channels));
    Frame out;
    out.width = frame.width;
    out.height = frame.height;
    out.channels = 1;
    out.pixels.resize(static_cast<std::size_t>(frame.width) * frame.height);
    const std::size_t n = out.pixels.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double r = frame.pixels[3 * i + 0];
        const double g = frame.pixels[3 * i + 1];
        const double b = frame.pixels[3 * i + 2];
        out.pixels[i] = clamp01(r + 0.7152 * (g - r) + 0.0722 * (b - r));
    }
    return out;
}

Frame load_image(const fs::path& path) {
    if (has_extension(path, {".png"}))
        return load_png_file(path);
    if (has_extension(path, {".ppm", ".pgm"}))
        return load_pnm_file(path);
    throw FormatError("unsupported image extension: " + path.string());
}

void save_png(const Frame& frame, const fs::path& path) {
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(frame.width);
    image.height = static_cast<png_uint_32>(frame.height);
    image.format = frame.channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    auto bytes = frame_to_bytes(frame);
    if (!png_image_write_to_file(&image, path.string().c_str(), 0, bytes.data(), 0, nullptr))
        throw FormatError("cannot write PNG: " + path.string() + ": " + image.message);
}

void save_ppm(const Frame& frame, const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw FormatError("cannot write: " + path.string());
    out << (frame.channels == 3 ? "P6" : "P5") << "\n"
        << frame.width << " " << frame.height << "\n255\n";
    auto bytes = frame_to_bytes(frame);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw FormatError("write failed: " + path.string());
}

VideoSequence load_frame_sequence(const fs::path& dir,
                                  const std::optional<fs::path>& manifest) {
    if (!fs::is_directory(dir))
        throw ConfigError("not a directory: " + dir.string());

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && has_extension(entry.path(), {".png", ".ppm", ".pgm"}))
            files.push_back(entry.path());
    if (files.empty())
        throw FormatError("no frames (*.png / *.ppm) in " + dir.string());
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });

    VideoSequence video;
    video.frames.resize(files.size());
    parallel_for(static_cast<std::int64_t>(files.size()), [&](std::int64_t i) {
        video.frames[static_cast<std::size_t>(i)] = load_image(files[static_cast<std::size_t>(i)]);
    });

    video.width = video.frames.front().width;
    video.height = video.frames.front().height;
    for (std::size_t i = 0; i < video.frames.size(); ++i)
        if (video.frames[i].width != video.width || video.frames[i].height != video.height)
            throw FormatError("mixed dimensions: " + files[i].string());

    fs::path manifest_path;
    if (manifest)
        manifest_path = *manifest;
    else if (fs::exists(dir / "manifest.json"))
        manifest_path = dir / "manifest.json";

    if (!manifest_path.empty()) {
        std::ifstream in(manifest_path);
        if (!in)
            throw ConfigError("cannot open manifest: " + manifest_path.string());
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw FormatError("bad manifest JSON: " + manifest_path.string() + ": " + e.what());
        }
        if (j.contains("fps")) {
            double fps = j.at("fps").get<double>();
            if (!(fps > 0.0))
                throw FormatError("manifest fps must be positive: " + manifest_path.string());
            video.fps = fps;
        }
        if (j.contains("width") && j.at("width").get<int>() != video.width)
            throw FormatError("manifest width does not match frames: " + manifest_path.string());
        if (j.contains("height") && j.at("height").get<int>() != video.height)
            throw FormatError("manifest height does not match frames: " + manifest_path.string());
    }
    return video;
}

} // namespace fpd
