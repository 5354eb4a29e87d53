#include "fpd/tracks.hpp"

#include "fpd/error.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>

#include <json.hpp>

namespace fs = std::filesystem;

namespace fpd {

namespace {

constexpr char kMagic[4] = {'F', 'P', 'D', 'T'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kFlagNormalized = 1u;

void write_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

void write_f32(std::ostream& out, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    write_u32(out, bits);
}

std::uint32_t read_u32(std::istream& in, const std::string& what) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (in.gcount() != 4)
        throw FormatError("track file truncated reading " + what);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

float read_f32(std::istream& in, const std::string& what) {
    std::uint32_t bits = read_u32(in, what);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
}

void normalize_in_place(TrackSet& ts) {
    if (ts.width <= 0 || ts.height <= 0)
        throw FormatError("pixel-space track file needs positive width/height in header");
    const float w = static_cast<float>(ts.width);
    const float h = static_cast<float>(ts.height);
    for (std::size_t i = 0; i < ts.coords.size(); i += 2) {
        ts.coords[i] /= w;
        ts.coords[i + 1] /= h;
    }
    for (auto& q : ts.queries) {
        q.x /= w;
        q.y /= h;
    }
}

TrackSet load_binary(std::istream& in, const std::string& name) {
    char magic[4];
    in.read(magic, 4);
    if (in.gcount() != 4 || std::memcmp(magic, kMagic, 4) != 0)
        throw FormatError("bad magic in " + name);
    const std::uint32_t version = read_u32(in, "version");
    if (version != kVersion)
        throw FormatError("unsupported track file version " + std::to_string(version) + " in " +
                          name);
    TrackSet ts;
    const std::uint32_t m = read_u32(in, "num_points");
    const std::uint32_t t = read_u32(in, "num_frames");
    ts.width = static_cast<int>(read_u32(in, "width"));
    ts.height = static_cast<int>(read_u32(in, "height"));
    const std::uint32_t flags = read_u32(in, "flags");
    read_u32(in, "reserved");
    if (m == 0 || t == 0 || m > (1u << 24) || t > (1u << 24))
        throw FormatError("malformed header (M=" + std::to_string(m) +
                          ", T=" + std::to_string(t) + ") in " + name);
    ts.num_points = static_cast<int>(m);
    ts.num_frames = static_cast<int>(t);

    const std::size_t n = static_cast<std::size_t>(m) * t;
    ts.coords.resize(n * 2);
    in.read(reinterpret_cast<char*>(ts.coords.data()),
            static_cast<std::streamsize>(n * 2 * sizeof(float)));
    if (in.gcount() != static_cast<std::streamsize>(n * 2 * sizeof(float)))
        throw FormatError("shape mismatch: coordinate payload truncated in " + name);
    if constexpr (std::endian::native == std::endian::big) {
        for (auto& c : ts.coords) {
            std::uint32_t bits;
            std::memcpy(&bits, &c, 4);
            bits = __builtin_bswap32(bits);
            std::memcpy(&c, &bits, 4);
        }
    }

    ts.visibility.resize(n);
    in.read(reinterpret_cast<char*>(ts.visibility.data()), static_cast<std::streamsize>(n));
    if (in.gcount() != static_cast<std::streamsize>(n))
        throw FormatError("shape mismatch: visibility payload truncated in " + name);
    for (auto& v : ts.visibility)
        v = v ? 1 : 0;

    ts.queries.resize(m);
    for (auto& q : ts.queries) {
        q.frame = static_cast<int>(read_u32(in, "query frame"));
        q.x = read_f32(in, "query x");
        q.y = read_f32(in, "query y");
    }
    if (!(flags & kFlagNormalized))
        normalize_in_place(ts);
    return ts;
}

TrackSet load_json(std::istream& in, const std::string& name) {
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("bad track JSON in " + name + ": " + e.what());
    }
    try {
        TrackSet ts;
        ts.width = j.value("width", 0);
        ts.height = j.value("height", 0);
        const bool normalized = j.value("normalized", true);
        const auto& points = j.at("points");
        if (!points.is_array() || points.empty())
            throw FormatError("track JSON needs a non-empty points array in " + name);
        ts.num_points = static_cast<int>(points.size());
        ts.num_frames = static_cast<int>(points[0].at("xy").size());
        if (ts.num_frames == 0)
            throw FormatError("track JSON has zero frames in " + name);
        const std::size_t n = static_cast<std::size_t>(ts.num_points) * ts.num_frames;
        ts.coords.resize(n * 2);
        ts.visibility.resize(n);
        ts.queries.resize(static_cast<std::size_t>(ts.num_points));
        for (int i = 0; i < ts.num_points; ++i) {
            const auto& p = points[static_cast<std::size_t>(i)];
            const auto& xy = p.at("xy");
            const auto& vis = p.at("visible");
            if (static_cast<int>(xy.size()) != ts.num_frames ||
                static_cast<int>(vis.size()) != ts.num_frames)
                throw FormatError("shape mismatch: point " + std::to_string(i) + " in " + name);
            for (int t = 0; t < ts.num_frames; ++t) {
                ts.set_xy(i, t, xy[static_cast<std::size_t>(t)].at(0).get<float>(),
                          xy[static_cast<std::size_t>(t)].at(1).get<float>());
                ts.set_visible(i, t, vis[static_cast<std::size_t>(t)].get<bool>());
            }
            const auto& q = p.at("query");
            ts.queries[static_cast<std::size_t>(i)] = {q.at("frame").get<int>(),
                                                       q.at("x").get<float>(),
                                                       q.at("y").get<float>()};
        }
        if (!normalized)
            normalize_in_place(ts);
        return ts;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("bad track JSON in " + name + ": " + e.what());
    }
}

} // namespace

TrackSet TrackSet::zeros(int num_points, int num_frames) {
    TrackSet ts;
    ts.num_points = num_points;
    ts.num_frames = num_frames;
    const std::size_t n = static_cast<std::size_t>(num_points) * num_frames;
    ts.coords.assign(n * 2, 0.0f);
    ts.visibility.assign(n, 1);
    ts.queries.assign(static_cast<std::size_t>(num_points), QueryPoint{});
    return ts;
}

void TrackSet::validate_and_repair() {
    if (num_points < 1 || num_frames < 1)
        throw FormatError("track set must have M >= 1, T >= 1");
    const std::size_t n = static_cast<std::size_t>(num_points) * num_frames;
    if (coords.size() != n * 2 || visibility.size() != n ||
        queries.size() != static_cast<std::size_t>(num_points))
        throw FormatError("track set shape mismatch");
    for (float c : coords)
        if (!std::isfinite(c))
            throw FormatError("non-finite coordinate in track set");
    for (int i = 0; i < num_points; ++i) {
        const int e = queries[static_cast<std::size_t>(i)].frame;
        if (e < 0 || e >= num_frames)
            throw FormatError("query frame " + std::to_string(e) + " out of range for point " +
                              std::to_string(i));
        if (!visible(i, e)) {
            std::cerr << "warning: point " << i << " not visible at its query frame " << e
                      << "; repairing to visible\n";
            set_visible(i, e, true);
        }
    }
}

TrackSet load_tracks(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open track file: " + path.string());
    char first = 0;
    in.get(first);
    in.seekg(0);
    TrackSet ts = first == 'F' ? load_binary(in, path.string()) : load_json(in, path.string());
    ts.source_name = path.stem().string();
    ts.validate_and_repair();
    return ts;
}

void save_tracks(const TrackSet& tracks, const fs::path& path, TrackFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ConfigError("cannot write track file: " + path.string());
    const std::size_t n = static_cast<std::size_t>(tracks.num_points) * tracks.num_frames;

    if (format == TrackFormat::binary) {
        out.write(kMagic, 4);
        write_u32(out, kVersion);
        write_u32(out, static_cast<std::uint32_t>(tracks.num_points));
        write_u32(out, static_cast<std::uint32_t>(tracks.num_frames));
        write_u32(out, static_cast<std::uint32_t>(tracks.width));
        write_u32(out, static_cast<std::uint32_t>(tracks.height));
        write_u32(out, kFlagNormalized);
        write_u32(out, 0);
        if constexpr (std::endian::native == std::endian::little) {
            out.write(reinterpret_cast<const char*>(tracks.coords.data()),
                      static_cast<std::streamsize>(n * 2 * sizeof(float)));
        } else {
            for (float c : tracks.coords)
                write_f32(out, c);
        }
        out.write(reinterpret_cast<const char*>(tracks.visibility.data()),
                  static_cast<std::streamsize>(n));
        for (const auto& q : tracks.queries) {
            write_u32(out, static_cast<std::uint32_t>(q.frame));
            write_f32(out, q.x);
            write_f32(out, q.y);
        }
    } else {
        nlohmann::ordered_json j;
        j["width"] = tracks.width;
        j["height"] = tracks.height;
        j["normalized"] = true;
        auto& points = j["points"] = nlohmann::ordered_json::array();
        for (int i = 0; i < tracks.num_points; ++i) {
            nlohmann::ordered_json p;
            const auto& q = tracks.queries[static_cast<std::size_t>(i)];
            p["query"] = {{"frame", q.frame}, {"x", q.x}, {"y", q.y}};
            auto& xy = p["xy"] = nlohmann::ordered_json::array();
            auto& vis = p["visible"] = nlohmann::ordered_json::array();
            for (int t = 0; t < tracks.num_frames; ++t) {
                xy.push_back({tracks.x(i, t), tracks.y(i, t)});
                vis.push_back(tracks.visible(i, t));
            }
            points.push_back(std::move(p));
        }
        out << j.dump(2) << "\n";
    }
    if (!out)
        throw ConfigError("write failed: " + path.string());
}

} // namespace fpd
