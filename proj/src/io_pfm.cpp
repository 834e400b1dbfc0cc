// Copyright 2026 The shadenorm Authors
// SPDX-License-Identifier: Apache-2.0

#include <shadenorm/io.hpp>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace shadenorm::io {

namespace {

std::uint32_t byteswap32(std::uint32_t v)
{
    return (v >> 24) | ((v >> 8) & 0xff00u) | ((v << 8) & 0xff0000u) | (v << 24);
}

// Reads one whitespace-delimited header token.
std::string next_token(std::istream& in)
{
    std::string tok;
    int c = in.get();
    while (c != EOF && std::isspace(c)) {
        c = in.get();
    }
    while (c != EOF && !std::isspace(c)) {
        tok.push_back(static_cast<char>(c));
        c = in.get();
    }
    // The single whitespace byte after the scale field is consumed here.
    return tok;
}

} // namespace

void write_pfm(const fs::path& path, const FloatImage& img)
{
    if (img.width <= 0 || img.height <= 0 || img.values.size() != static_cast<std::size_t>(img.width) * img.height) {
        throw StructuralError("cannot write PFM: inconsistent image description");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw FormatError("cannot open " + path.string() + " for writing");
    }
    out << "Pf\n" << img.width << ' ' << img.height << "\n-1.0\n";
    std::vector<char> row(static_cast<std::size_t>(img.width) * 4);
    for (int y = img.height - 1; y >= 0; --y) {
        for (int x = 0; x < img.width; ++x) {
            auto bits = std::bit_cast<std::uint32_t>(img.values[static_cast<std::size_t>(y) * img.width + x]);
            if constexpr (std::endian::native == std::endian::big) {
                bits = byteswap32(bits);
            }
            std::memcpy(row.data() + 4 * x, &bits, 4);
        }
        out.write(row.data(), static_cast<std::streamsize>(row.size()));
    }
    if (!out) {
        throw FormatError("writing " + path.string() + " failed");
    }
}

FloatImage read_pfm(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FormatError("cannot open " + path.string());
    }
    const std::string magic = next_token(in);
    if (magic == "PF") {
        throw FormatError(path.string() + ": three-channel PFM where a single-channel map was expected");
    }
    if (magic != "Pf") {
        throw FormatError(path.string() + " is not a PFM file");
    }
    FloatImage img;
    double scale = 0.0;
    try {
        img.width = std::stoi(next_token(in));
        img.height = std::stoi(next_token(in));
        scale = std::stod(next_token(in));
    } catch (const std::exception&) {
        throw FormatError(path.string() + ": malformed PFM header");
    }
    if (img.width <= 0 || img.height <= 0 || scale == 0.0 || !std::isfinite(scale)) {
        throw FormatError(path.string() + ": malformed PFM header");
    }
    const bool little = scale < 0.0;
    const bool swap = little != (std::endian::native == std::endian::little);
    img.values.resize(static_cast<std::size_t>(img.width) * img.height);
    std::vector<char> row(static_cast<std::size_t>(img.width) * 4);
    for (int y = img.height - 1; y >= 0; --y) {
        if (!in.read(row.data(), static_cast<std::streamsize>(row.size()))) {
            throw FormatError(path.string() + ": truncated PFM payload");
        }
        for (int x = 0; x < img.width; ++x) {
            std::uint32_t bits = 0;
            std::memcpy(&bits, row.data() + 4 * x, 4);
            if (swap) {
                bits = byteswap32(bits);
            }
            img.values[static_cast<std::size_t>(y) * img.width + x] = std::bit_cast<float>(bits);
        }
    }
    return img;
}

} // namespace shadenorm::io
