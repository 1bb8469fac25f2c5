#include "frugal/image_io.hpp"

#include <png.h>

#include <cctype>
#include <cstdio>
#include <cstring>
#include <memory>
#include <string>

#include "binary_io.hpp"
#include "frugal/error.hpp"

namespace frugal {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

Image read_ppm(const std::string& data, const std::filesystem::path& path) {
    std::size_t pos = 2;
    auto next_token = [&]() -> std::string {
        while (pos < data.size()) {
            if (std::isspace(static_cast<unsigned char>(data[pos]))) {
                ++pos;
            } else if (data[pos] == '#') {
                while (pos < data.size() && data[pos] != '\n') ++pos;
            } else {
                break;
            }
        }
        std::size_t start = pos;
        while (pos < data.size() && !std::isspace(static_cast<unsigned char>(data[pos]))) ++pos;
        return data.substr(start, pos - start);
    };
    Image img;
    try {
        img.width = static_cast<std::uint32_t>(std::stoul(next_token()));
        img.height = static_cast<std::uint32_t>(std::stoul(next_token()));
        if (std::stoul(next_token()) != 255) fail(ErrorKind::io_error, path.string() + ": only 8-bit PPM is supported");
    } catch (const std::logic_error&) {
        fail(ErrorKind::io_error, path.string() + ": malformed PPM header");
    }
    ++pos;  // single whitespace before the raster
    const std::size_t bytes = static_cast<std::size_t>(img.width) * img.height * 3;
    if (data.size() < pos + bytes)
        fail(ErrorKind::io_error, path.string() + ": PPM raster truncated (expected " + std::to_string(bytes) +
                                      " bytes, found " + std::to_string(data.size() - std::min(pos, data.size())) + ")");
    img.pixels.assign(data.begin() + static_cast<std::ptrdiff_t>(pos),
                      data.begin() + static_cast<std::ptrdiff_t>(pos + bytes));
    return img;
}

Image read_png(const std::filesystem::path& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) fail(ErrorKind::io_error, "cannot open " + path.string());

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(ErrorKind::io_error, "libpng initialization failed");
    }
    Image img;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(ErrorKind::io_error, path.string() + ": PNG decode failed");
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);
    const auto color = png_get_color_type(png, info);
    if (png_get_bit_depth(png, info) == 16) png_set_strip_16(png);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) {
        if (png_get_bit_depth(png, info) < 8) png_set_expand_gray_1_2_4_to_8(png);
        png_set_gray_to_rgb(png);
    }
    if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    png_read_update_info(png, info);

    img.width = png_get_image_width(png, info);
    img.height = png_get_image_height(png, info);
    if (png_get_rowbytes(png, info) != static_cast<std::size_t>(img.width) * 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(ErrorKind::io_error, path.string() + ": unsupported PNG layout");
    }
    img.pixels.resize(static_cast<std::size_t>(img.width) * img.height * 3);
    rows.resize(img.height);
    for (std::uint32_t y = 0; y < img.height; ++y) rows[y] = img.pixels.data() + static_cast<std::size_t>(y) * img.width * 3;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

}  // namespace

Image read_image(const std::filesystem::path& path) {
    std::string head;
    {
        FilePtr fp(std::fopen(path.c_str(), "rb"));
        if (!fp) fail(ErrorKind::io_error, "cannot open " + path.string());
        char buf[8] = {};
        const auto got = std::fread(buf, 1, sizeof buf, fp.get());
        head.assign(buf, got);
    }
    if (head.size() >= 8 && png_sig_cmp(reinterpret_cast<png_const_bytep>(head.data()), 0, 8) == 0) return read_png(path);
    if (head.size() >= 2 && head[0] == 'P' && head[1] == '6') return read_ppm(detail::read_file(path), path);
    fail(ErrorKind::io_error, path.string() + ": unrecognized image format (expected PNG or binary PPM)");
}

void write_png(const Image& image, const std::filesystem::path& path) {
    auto tmp = path;
    tmp += ".tmp";
    {
        FilePtr fp(std::fopen(tmp.c_str(), "wb"));
        if (!fp) fail(ErrorKind::io_error, "cannot open " + tmp.string() + " for writing");
        png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
        png_infop info = png ? png_create_info_struct(png) : nullptr;
        if (!png || !info) {
            png_destroy_write_struct(&png, &info);
            fail(ErrorKind::io_error, "libpng initialization failed");
        }
        std::vector<png_bytep> rows(image.height);
        if (setjmp(png_jmpbuf(png))) {
            png_destroy_write_struct(&png, &info);
            fail(ErrorKind::io_error, path.string() + ": PNG encode failed");
        }
        png_init_io(png, fp.get());
        png_set_IHDR(png, info, image.width, image.height, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                     PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
        for (std::uint32_t y = 0; y < image.height; ++y)
            rows[y] = const_cast<png_bytep>(image.pixels.data() + static_cast<std::size_t>(y) * image.width * 3);
        png_write_info(png, info);
        png_write_image(png, rows.data());
        png_write_end(png, nullptr);
        png_destroy_write_struct(&png, &info);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) fail(ErrorKind::io_error, "cannot rename " + tmp.string() + ": " + ec.message());
}

Image crop(const Image& image, std::uint32_t x, std::uint32_t y, std::uint32_t w, std::uint32_t h) {
    require(x + w <= image.width && y + h <= image.height, ErrorKind::invalid_argument, "crop outside the image");
    Image out;
    out.width = w;
    out.height = h;
    out.pixels.resize(static_cast<std::size_t>(w) * h * 3);
    for (std::uint32_t r = 0; r < h; ++r)
        std::memcpy(out.pixels.data() + static_cast<std::size_t>(r) * w * 3,
                    image.pixels.data() + (static_cast<std::size_t>(y + r) * image.width + x) * 3,
                    static_cast<std::size_t>(w) * 3);
    return out;
}

}  // namespace frugal
