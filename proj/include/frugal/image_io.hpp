#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace frugal {

// 8-bit interleaved RGB raster.
struct Image {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::vector<std::uint8_t> pixels;  // width * height * 3

    std::uint8_t at(std::uint32_t x, std::uint32_t y, std::uint32_t c) const {
        return pixels[(static_cast<std::size_t>(y) * width + x) * 3 + c];
    }
    bool operator==(const Image&) const = default;
};

// Reads PNG (gray, gray+alpha, RGB, RGBA; 8 or 16 bit) or binary PPM (P6).
// Throws io_error when the file is missing or cannot be decoded.
Image read_image(const std::filesystem::path& path);

void write_png(const Image& image, const std::filesystem::path& path);

// Sub-image with origin (x, y).
Image crop(const Image& image, std::uint32_t x, std::uint32_t y, std::uint32_t w, std::uint32_t h);

}  // namespace frugal
