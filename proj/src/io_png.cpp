// Copyright 2026 The shadenorm Authors
// SPDX-License-Identifier: Apache-2.0

#include <shadenorm/io.hpp>

#include <png.h>

#include <algorithm>

#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <memory>

namespace shadenorm::io {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const
    {
        if (f) {
            std::fclose(f);
        }
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

struct ErrorSink {
    char message[256] = {0};
};

void on_png_error(png_structp png, png_const_charp msg)
{
    auto* sink = static_cast<ErrorSink*>(png_get_error_ptr(png));
    std::snprintf(sink->message, sizeof(sink->message), "%s", msg);
    png_longjmp(png, 1);
}

void on_png_warning(png_structp, png_const_charp) {}

// Everything that must survive a longjmp lives in caller-owned storage;
// these two functions declare no objects with destructors after setjmp.
bool write_rows(std::FILE* fp, const PngImage& img, png_bytep* rows, ErrorSink* sink)
{
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, sink, on_png_error, on_png_warning);
    if (!png) {
        return false;
    }
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        return false;
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        return false;
    }
    png_init_io(png, fp);
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width), static_cast<png_uint_32>(img.height), img.bit_depth,
                 img.channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_set_compression_level(png, 6);
    png_write_info(png, info);
    png_write_image(png, rows);
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return true;
}

struct ReadState {
    png_uint_32 width = 0;
    png_uint_32 height = 0;
    int bit_depth = 0;
    int color_type = 0;
    int interlace = 0;
};

bool read_rows(std::FILE* fp, std::vector<std::uint8_t>* bytes, ReadState* st, ErrorSink* sink)
{
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, sink, on_png_error, on_png_warning);
    if (!png) {
        return false;
    }
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        return false;
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        return false;
    }
    png_init_io(png, fp);
    png_read_info(png, info);
    png_get_IHDR(png, info, &st->width, &st->height, &st->bit_depth, &st->color_type, &st->interlace, nullptr,
                 nullptr);
    if (st->interlace != PNG_INTERLACE_NONE) {
        png_set_interlace_handling(png);
    }
    png_read_update_info(png, info);
    const std::size_t stride = png_get_rowbytes(png, info);
    bytes->resize(stride * st->height);
    for (png_uint_32 y = 0; y < st->height; ++y) {
        png_read_row(png, bytes->data() + stride * y, nullptr);
    }
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return true;
}

} // namespace

void write_png(const fs::path& path, const PngImage& img)
{
    if ((img.channels != 1 && img.channels != 3) || (img.bit_depth != 8 && img.bit_depth != 16) || img.width <= 0 ||
        img.height <= 0 || img.samples.size() != static_cast<std::size_t>(img.width) * img.height * img.channels) {
        throw StructuralError("cannot write PNG: inconsistent image description");
    }
    const std::size_t bytes_per_sample = img.bit_depth == 16 ? 2 : 1;
    const std::size_t stride = static_cast<std::size_t>(img.width) * img.channels * bytes_per_sample;
    std::vector<std::uint8_t> bytes(stride * img.height);
    for (std::size_t i = 0; i < img.samples.size(); ++i) {
        if (bytes_per_sample == 2) {
            bytes[2 * i] = static_cast<std::uint8_t>(img.samples[i] >> 8);
            bytes[2 * i + 1] = static_cast<std::uint8_t>(img.samples[i] & 0xff);
        } else {
            if (img.samples[i] > 255) {
                throw DomainError("8-bit PNG sample exceeds 255");
            }
            bytes[i] = static_cast<std::uint8_t>(img.samples[i]);
        }
    }
    std::vector<png_bytep> rows(static_cast<std::size_t>(img.height));
    for (int y = 0; y < img.height; ++y) {
        rows[static_cast<std::size_t>(y)] = bytes.data() + stride * y;
    }

    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) {
        throw FormatError("cannot open " + path.string() + " for writing");
    }
    ErrorSink sink;
    if (!write_rows(fp.get(), img, rows.data(), &sink)) {
        throw FormatError("writing " + path.string() + " failed: " + sink.message);
    }
    if (std::fflush(fp.get()) != 0) {
        throw FormatError("writing " + path.string() + " failed");
    }
}

PngImage read_png(const fs::path& path)
{
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) {
        throw FormatError("cannot open " + path.string());
    }
    unsigned char sig[8] = {0};
    if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
        throw FormatError(path.string() + " is not a PNG file");
    }
    std::rewind(fp.get());

    std::vector<std::uint8_t> bytes;
    ReadState st;
    ErrorSink sink;
    if (!read_rows(fp.get(), &bytes, &st, &sink)) {
        throw FormatError("malformed PNG " + path.string() + ": " + sink.message);
    }
    PngImage img;
    img.width = static_cast<int>(st.width);
    img.height = static_cast<int>(st.height);
    img.bit_depth = st.bit_depth;
    if (st.color_type == PNG_COLOR_TYPE_GRAY) {
        img.channels = 1;
    } else if (st.color_type == PNG_COLOR_TYPE_RGB) {
        img.channels = 3;
    } else {
        throw FormatError(path.string() + ": only grayscale or RGB PNGs without alpha are supported");
    }
    if (st.bit_depth != 8 && st.bit_depth != 16) {
        throw FormatError(path.string() + ": only 8- or 16-bit PNGs are supported");
    }
    const std::size_t n = static_cast<std::size_t>(img.width) * img.height * img.channels;
    img.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        img.samples[i] = st.bit_depth == 16 ? static_cast<std::uint16_t>((bytes[2 * i] << 8) | bytes[2 * i + 1])
                                            : bytes[i];
    }
    return img;
}

void write_mask(const fs::path& path, const Mask& mask)
{
    PngImage img{mask.width, mask.height, 1, 8, {}};
    img.samples.resize(mask.size());
    for (std::size_t i = 0; i < mask.size(); ++i) {
        img.samples[i] = mask[i] ? 255 : 0;
    }
    write_png(path, img);
}

Mask read_mask(const fs::path& path)
{
    const auto img = read_png(path);
    if (img.channels != 1) {
        throw FormatError(path.string() + ": mask must be a single-channel PNG");
    }
    const std::uint16_t half = img.bit_depth == 16 ? 32768 : 128;
    Mask mask(img.width, img.height);
    for (std::size_t i = 0; i < mask.size(); ++i) {
        mask.valid[i] = img.samples[i] >= half ? 1 : 0;
    }
    return mask;
}

std::uint16_t encode_normal_component(double c)
{
    const double q = std::round((c + 1.0) * 0.5 * 65535.0);
    return static_cast<std::uint16_t>(std::clamp(q, 0.0, 65535.0));
}

double decode_normal_component(std::uint16_t q)
{
    return static_cast<double>(q) / 65535.0 * 2.0 - 1.0;
}

void write_normal_map(const fs::path& png, const fs::path& mask_png, const NormalMap& normals)
{
    normals.validate();
    PngImage img{normals.width, normals.height, 3, 16, {}};
    img.samples.resize(normals.normals.size() * 3);
    for (std::size_t i = 0; i < normals.normals.size(); ++i) {
        for (int c = 0; c < 3; ++c) {
            img.samples[3 * i + c] = normals.mask[i] ? encode_normal_component(normals.normals[i][c]) : 32768;
        }
    }
    write_png(png, img);
    write_mask(mask_png, normals.mask);
}

NormalMap read_normal_map(const fs::path& png, const fs::path& mask_png)
{
    const auto img = read_png(png);
    if (img.channels != 3 || img.bit_depth != 16) {
        throw FormatError(png.string() + ": normal maps must be 16-bit RGB PNGs");
    }
    const auto mask = read_mask(mask_png);
    if (mask.width != img.width || mask.height != img.height) {
        throw FormatError("normal map " + png.string() + " and mask " + mask_png.string() + " differ in dimensions");
    }
    NormalMap out(img.width, img.height);
    for (std::size_t i = 0; i < out.normals.size(); ++i) {
        if (!mask[i]) {
            continue;
        }
        const Vec3 v(decode_normal_component(img.samples[3 * i]), decode_normal_component(img.samples[3 * i + 1]),
                     decode_normal_component(img.samples[3 * i + 2]));
        if (v.norm() < 0.5) {
            throw FormatError(png.string() + ": masked-in pixel " + std::to_string(i) + " does not encode a normal");
        }
        out.set(i, UnitVec3::normalize(v));
    }
    return out;
}

} // namespace shadenorm::io
