#pragma once

// 32x32 RGB renders of symbolic scenes: one flat glyph per grid cell. Input
// for the perception component only; nothing in the symbolic pipeline reads
// them back.

#include <png.h>

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "scene.hpp"

namespace nal {

inline constexpr int kImageSize = 32;
inline constexpr int kCellSize = 10;  // 1px border + 3 cells + 1px border

struct Image {
    int width = kImageSize;
    int height = kImageSize;
    std::vector<std::uint8_t> rgb = std::vector<std::uint8_t>(kImageSize * kImageSize * 3, 0);

    std::array<std::uint8_t, 3> at(int x, int y) const {
        auto i = static_cast<std::size_t>((y * width + x) * 3);
        return {rgb[i], rgb[i + 1], rgb[i + 2]};
    }
    void set(int x, int y, std::array<std::uint8_t, 3> c) {
        auto i = static_cast<std::size_t>((y * width + x) * 3);
        rgb[i] = c[0];
        rgb[i + 1] = c[1];
        rgb[i + 2] = c[2];
    }
};

inline std::array<std::uint8_t, 3> color_rgb(const std::string& name) {
    static const std::map<std::string, std::array<std::uint8_t, 3>> table{
        {"red", {220, 40, 40}},     {"green", {40, 190, 60}},  {"blue", {50, 80, 230}},
        {"gray", {140, 140, 140}},  {"brown", {140, 90, 40}},  {"purple", {150, 60, 190}},
        {"cyan", {40, 200, 210}},   {"yellow", {230, 210, 40}},
    };
    auto it = table.find(name);
    if (it == table.end()) throw std::invalid_argument("no colour for '" + name + "'");
    return it->second;
}

inline Image render_scene(const Scene& scene) {
    Image img;
    for (const auto& o : scene.objects) {
        const std::string& shape = o.attributes.at(0);
        auto rgb = color_rgb(o.attributes.at(1));
        const bool large = o.has("large");
        const double half = large ? 4.5 : 2.5;
        const double cx = 1 + o.col * kCellSize + kCellSize / 2.0;
        const double cy = 1 + o.row * kCellSize + kCellSize / 2.0;
        for (int y = 1 + o.row * kCellSize; y < 1 + (o.row + 1) * kCellSize; ++y) {
            for (int x = 1 + o.col * kCellSize; x < 1 + (o.col + 1) * kCellSize; ++x) {
                const double dx = x + 0.5 - cx, dy = y + 0.5 - cy;
                bool inside = false;
                if (shape == "square" || shape == "cube") {
                    inside = std::abs(dx) <= half && std::abs(dy) <= half;
                } else if (shape == "circle" || shape == "sphere") {
                    inside = dx * dx + dy * dy <= half * half;
                } else if (shape == "triangle") {
                    // Apex at the top; width grows linearly downwards.
                    double t = (dy + half) / (2 * half);
                    inside = t >= 0 && t <= 1 && std::abs(dx) <= t * half;
                } else if (shape == "cylinder") {
                    inside = std::abs(dx) <= half * 0.6 && std::abs(dy) <= half;
                }
                if (inside) img.set(x, y, rgb);
            }
        }
        if (o.has("metal")) img.set(static_cast<int>(cx), static_cast<int>(cy), {255, 255, 255});
    }
    return img;
}

inline void write_png(const std::filesystem::path& path, const Image& img) {
    png_image desc{};
    desc.version = PNG_IMAGE_VERSION;
    desc.width = static_cast<png_uint_32>(img.width);
    desc.height = static_cast<png_uint_32>(img.height);
    desc.format = PNG_FORMAT_RGB;
    if (!png_image_write_to_file(&desc, path.string().c_str(), 0, img.rgb.data(), 0, nullptr))
        throw std::runtime_error("cannot write " + path.string() + ": " + desc.message);
}

inline Image read_png(const std::filesystem::path& path) {
    png_image desc{};
    desc.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&desc, path.string().c_str()))
        throw std::runtime_error("cannot read " + path.string() + ": " + desc.message);
    desc.format = PNG_FORMAT_RGB;
    Image img;
    img.width = static_cast<int>(desc.width);
    img.height = static_cast<int>(desc.height);
    img.rgb.assign(PNG_IMAGE_SIZE(desc), 0);
    if (!png_image_finish_read(&desc, nullptr, img.rgb.data(), 0, nullptr))
        throw std::runtime_error("cannot decode " + path.string() + ": " + desc.message);
    return img;
}

inline void render_dataset(const std::filesystem::path& dir, const std::vector<Scene>& scenes) {
    std::filesystem::create_directories(dir / "images");
    for (const auto& s : scenes) write_png(dir / "images" / (s.image_id + ".png"), render_scene(s));
}

}  // namespace nal
