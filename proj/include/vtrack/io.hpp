#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <png.h>

#include "vtrack/image.hpp"
#include "vtrack/pipeline.hpp"

namespace vtrack {

// ---------------------------------------------------------------- images

inline GrayImage load_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailure("cannot open " + path);
    std::string magic;
    in >> magic;
    if (magic != "P5") throw UnsupportedPixelFormat(path + ": not a binary PGM");
    auto next_token = [&]() {
        std::string tok;
        while (in >> tok) {
            if (tok[0] == '#') {
                std::string rest;
                std::getline(in, rest);
                continue;
            }
            return tok;
        }
        throw IoFailure(path + ": truncated PGM header");
    };
    const int w = std::stoi(next_token());
    const int h = std::stoi(next_token());
    const int maxval = std::stoi(next_token());
    if (maxval != 255) throw UnsupportedPixelFormat(path + ": PGM must be 8-bit");
    in.get(); // single whitespace after header
    std::vector<uint8_t> raw(static_cast<std::size_t>(w) * h);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!in) throw IoFailure(path + ": truncated PGM data");
    GrayImage img(w, h);
    for (std::size_t i = 0; i < raw.size(); ++i) img.data[i] = raw[i];
    return img;
}

inline void save_pgm(const GrayImage& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoFailure("cannot write " + path);
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    std::vector<uint8_t> raw(img.size());
    for (std::size_t i = 0; i < raw.size(); ++i)
        raw[i] = static_cast<uint8_t>(std::clamp(std::lround(img.data[i]), 0L, 255L));
    out.write(reinterpret_cast<const char*>(raw.data()),
              static_cast<std::streamsize>(raw.size()));
    if (!out) throw IoFailure("short write to " + path);
}

inline GrayImage load_png_gray(const std::string& path) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.c_str()))
        throw IoFailure(path + ": " + image.message);
    if (image.format != PNG_FORMAT_GRAY) {
        png_image_free(&image);
        throw UnsupportedPixelFormat(path + ": PNG must be 8-bit grayscale");
    }
    image.format = PNG_FORMAT_GRAY;
    std::vector<uint8_t> raw(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, raw.data(), 0, nullptr)) {
        const std::string msg = image.message;
        png_image_free(&image);
        throw IoFailure(path + ": " + msg);
    }
    GrayImage img(static_cast<int>(image.width), static_cast<int>(image.height));
    for (std::size_t i = 0; i < img.size(); ++i) img.data[i] = raw[i];
    return img;
}

/// Interleaved 8-bit RGB raster for overlay rendering.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> data; // 3 bytes per pixel

    RgbImage() = default;
    RgbImage(int w, int h)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h * 3, 0) {}

    void set(int x, int y, uint8_t r, uint8_t g, uint8_t b) {
        if (x < 0 || x >= width || y < 0 || y >= height) return;
        const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
        data[i] = r;
        data[i + 1] = g;
        data[i + 2] = b;
    }
    std::array<uint8_t, 3> get(int x, int y) const {
        const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
        return {data[i], data[i + 1], data[i + 2]};
    }
};

inline void save_png_rgb(const RgbImage& img, const std::string& path) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(img.width);
    image.height = static_cast<png_uint_32>(img.height);
    image.format = PNG_FORMAT_RGB;
    if (!png_image_write_to_file(&image, path.c_str(), 0, img.data.data(), 0, nullptr))
        throw IoFailure(path + ": " + image.message);
}

/// Loads all .pgm/.png frames in a directory, lexicographic order.
inline std::vector<GrayImage> load_sequence(const std::string& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw IoFailure(dir + " is not a directory");
    std::vector<std::string> paths;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const auto ext = entry.path().extension().string();
        if (ext == ".pgm" || ext == ".png") paths.push_back(entry.path().string());
    }
    if (paths.empty()) throw EmptyDirectory("no image frames in " + dir);
    std::sort(paths.begin(), paths.end());
    std::vector<GrayImage> frames;
    frames.reserve(paths.size());
    for (const auto& p : paths) {
        GrayImage img = p.ends_with(".pgm") ? load_pgm(p) : load_png_gray(p);
        if (!frames.empty() && !img.same_dims(frames.front()))
            throw MixedDimensions(p + " differs in size from earlier frames");
        frames.push_back(std::move(img));
    }
    return frames;
}

// --------------------------------------------------------------- contours

/// Line-oriented contour file:
///   # vtrack contours v1
///   frame <idx> <seed> <cx> <cy> <a> <b> <theta> <npoints>
///   <x> <y>          (npoints lines)
/// Floating point is written with 17 significant digits (lossless).
inline void write_contours(const std::vector<ContourResult>& results,
                           const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoFailure("cannot write " + path);
    out << "# vtrack contours v1\n";
    out << std::setprecision(17);
    for (const auto& r : results) {
        out << "frame " << r.frame_index << " " << seed_source_name(r.seed_used)
            << " " << r.ellipse.cx << " " << r.ellipse.cy << " " << r.ellipse.a
            << " " << r.ellipse.b << " " << r.ellipse.theta << " "
            << r.points.size() << "\n";
        for (const auto& p : r.points) out << p.x << " " << p.y << "\n";
    }
    if (!out) throw IoFailure("short write to " + path);
}

inline std::vector<ContourResult> read_contours(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open " + path);
    std::string header;
    std::getline(in, header);
    if (header != "# vtrack contours v1")
        throw IoFailure(path + ": bad contour file header");
    std::vector<ContourResult> results;
    std::string word;
    while (in >> word) {
        if (word != "frame") throw IoFailure(path + ": malformed record");
        ContourResult r;
        std::string seed;
        std::size_t npoints = 0;
        in >> r.frame_index >> seed >> r.ellipse.cx >> r.ellipse.cy >>
            r.ellipse.a >> r.ellipse.b >> r.ellipse.theta >> npoints;
        if (!in) throw IoFailure(path + ": malformed record header");
        if (seed == "ekf") r.seed_used = SeedSource::ekf;
        else if (seed == "cluster") r.seed_used = SeedSource::cluster;
        else if (seed == "manual") r.seed_used = SeedSource::manual;
        else throw IoFailure(path + ": unknown seed source " + seed);
        r.points.resize(npoints);
        for (auto& p : r.points) in >> p.x >> p.y;
        if (!in) throw IoFailure(path + ": truncated vertex list");
        results.push_back(std::move(r));
    }
    return results;
}

// --------------------------------------------------------------- overlays

namespace detail {
inline void draw_polyline(RgbImage& img, const std::vector<Point>& pts, uint8_t r,
                          uint8_t g, uint8_t b, bool closed) {
    const std::size_t n = pts.size();
    if (n == 0) return;
    const std::size_t edges = closed ? n : n - 1;
    for (std::size_t i = 0; i < edges; ++i) {
        const Point& p = pts[i];
        const Point& q = pts[(i + 1) % n];
        const double len = std::max(1.0, distance(p, q));
        const int steps = static_cast<int>(std::ceil(len * 4.0));
        for (int s = 0; s <= steps; ++s) {
            const double t = static_cast<double>(s) / steps;
            img.set(static_cast<int>(std::lround(p.x + t * (q.x - p.x))),
                    static_cast<int>(std::lround(p.y + t * (q.y - p.y))), r, g, b);
        }
    }
}
} // namespace detail

/// Frame with the contour polyline (yellow), the tracked center marker
/// (magenta cross) and optionally a reference contour (green).
inline RgbImage render_overlay(const GrayImage& frame, const ContourResult& contour,
                               const std::vector<Point>* reference = nullptr) {
    RgbImage out(frame.width, frame.height);
    for (int y = 0; y < frame.height; ++y)
        for (int x = 0; x < frame.width; ++x) {
            const auto v = static_cast<uint8_t>(
                std::clamp(std::lround(frame.at(x, y)), 0L, 255L));
            out.set(x, y, v, v, v);
        }
    if (reference) detail::draw_polyline(out, *reference, 0, 255, 0, true);
    detail::draw_polyline(out, contour.points, 255, 255, 0, true);
    const int mx = static_cast<int>(std::lround(contour.ellipse.cx));
    const int my = static_cast<int>(std::lround(contour.ellipse.cy));
    for (int d = -3; d <= 3; ++d) {
        out.set(mx + d, my, 255, 0, 255);
        out.set(mx, my + d, 255, 0, 255);
    }
    return out;
}

} // namespace vtrack
