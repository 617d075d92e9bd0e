#include "splatprune/io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <memory>

namespace splatprune {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const noexcept {
        if (f != nullptr) {
            std::fclose(f);
        }
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// libpng reports errors through longjmp; keep everything with a destructor
// outside the setjmp scope.
bool decode_png(std::FILE* fp, std::vector<png_byte>& rgb, std::vector<png_bytep>& rows, png_uint_32& width,
                png_uint_32& height, char* message, std::size_t message_size) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (png == nullptr) {
        std::snprintf(message, message_size, "out of memory");
        return false;
    }
    png_infop info = png_create_info_struct(png);
    if (info == nullptr || setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        std::snprintf(message, message_size, "corrupt or unsupported PNG data");
        return false;
    }

    png_init_io(png, fp);
    png_read_info(png, info);
    width = png_get_image_width(png, info);
    height = png_get_image_height(png, info);
    const int color_type = png_get_color_type(png, info);
    const int bit_depth = png_get_bit_depth(png, info);

    if (bit_depth == 16) {
        png_set_strip_16(png);
    }
    if (color_type == PNG_COLOR_TYPE_PALETTE) {
        png_set_palette_to_rgb(png);
    }
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) {
        png_set_expand_gray_1_2_4_to_8(png);
    }
    if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA) {
        png_set_gray_to_rgb(png);
    }
    if (color_type & PNG_COLOR_MASK_ALPHA) {
        png_set_strip_alpha(png);
    }
    png_read_update_info(png, info);
    if (png_get_rowbytes(png, info) != static_cast<png_size_t>(width) * 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        std::snprintf(message, message_size, "could not convert PNG to 8-bit RGB");
        return false;
    }

    rgb.resize(static_cast<std::size_t>(width) * height * 3);
    rows.resize(height);
    for (png_uint_32 r = 0; r < height; ++r) {
        rows[r] = rgb.data() + static_cast<std::size_t>(r) * width * 3;
    }
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return true;
}

bool encode_png(std::FILE* fp, const std::vector<png_byte>& rgb, png_uint_32 width, png_uint_32 height,
                std::vector<png_bytep>& rows) {
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (png == nullptr) {
        return false;
    }
    png_infop info = png_create_info_struct(png);
    if (info == nullptr || setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        return false;
    }
    png_init_io(png, fp);
    png_set_IHDR(png, info, width, height, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_set_compression_level(png, 6);
    png_write_info(png, info);
    for (png_uint_32 r = 0; r < height; ++r) {
        rows[r] = const_cast<png_bytep>(rgb.data() + static_cast<std::size_t>(r) * width * 3);
    }
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return true;
}

} // namespace

Image read_image(const fs::path& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) {
        throw IoError("cannot open image " + path.string());
    }
    png_byte sig[8];
    if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
        throw IoError(path.string() + ": not a PNG file");
    }
    std::rewind(fp.get());

    std::vector<png_byte> rgb;
    std::vector<png_bytep> rows;
    png_uint_32 width = 0, height = 0;
    char message[128] = {};
    if (!decode_png(fp.get(), rgb, rows, width, height, message, sizeof message)) {
        throw IoError(path.string() + ": " + message);
    }

    Image image(static_cast<int>(width), static_cast<int>(height));
    for (std::size_t i = 0; i < rgb.size(); ++i) {
        image.pixels[i] = rgb[i] / 255.0;
    }
    return image;
}

void write_image(const Image& image, const fs::path& path) {
    if (image.width < 1 || image.height < 1) {
        throw ValidationError("cannot write an empty image to " + path.string());
    }
    std::vector<png_byte> rgb(image.pixels.size());
    std::transform(image.pixels.begin(), image.pixels.end(), rgb.begin(), quantize_channel);

    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    std::vector<png_bytep> rows(static_cast<std::size_t>(image.height));
    if (!encode_png(fp.get(), rgb, static_cast<png_uint_32>(image.width), static_cast<png_uint_32>(image.height),
                    rows)) {
        throw IoError("failed encoding PNG " + path.string());
    }
}

} // namespace splatprune
