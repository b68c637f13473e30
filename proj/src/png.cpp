#include "iini/png.hpp"

#include <zlib.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "iini/error.hpp"

namespace iini {

namespace {

void put_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

void put_chunk(std::vector<std::uint8_t>& out, const char type[4],
               const std::vector<std::uint8_t>& data) {
    put_be32(out, static_cast<std::uint32_t>(data.size()));
    const std::size_t crc_start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), data.begin(), data.end());
    const uLong crc =
        crc32(0L, out.data() + crc_start, static_cast<uInt>(4 + data.size()));
    put_be32(out, static_cast<std::uint32_t>(crc));
}

}  // namespace

void write_png_rgb(const std::string& path, int width, int height,
                   const std::vector<std::uint8_t>& rgb) {
    if (width < 1 || height < 1 ||
        rgb.size() != static_cast<std::size_t>(width) *
                          static_cast<std::size_t>(height) * 3)
        throw Error("ShapeError",
                    "rgb buffer size " + std::to_string(rgb.size()) +
                        " does not match " + std::to_string(width) + "x" +
                        std::to_string(height) + " RGB");

    // Raw scanlines, each prefixed with filter byte 0 (None).
    const std::size_t stride = static_cast<std::size_t>(width) * 3;
    std::vector<std::uint8_t> raw;
    raw.reserve((stride + 1) * static_cast<std::size_t>(height));
    for (int y = 0; y < height; ++y) {
        raw.push_back(0);
        const auto* row = rgb.data() + static_cast<std::size_t>(y) * stride;
        raw.insert(raw.end(), row, row + stride);
    }

    uLongf comp_size = compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> comp(comp_size);
    const int zrc = compress2(comp.data(), &comp_size, raw.data(),
                              static_cast<uLong>(raw.size()),
                              Z_BEST_COMPRESSION);
    if (zrc != Z_OK)
        throw Error("IoFailure",
                    "zlib compression failed with code " +
                        std::to_string(zrc));
    comp.resize(comp_size);

    std::vector<std::uint8_t> png;
    const std::uint8_t sig[8] = {137, 80, 78, 71, 13, 10, 26, 10};
    png.insert(png.end(), sig, sig + 8);

    std::vector<std::uint8_t> ihdr;
    put_be32(ihdr, static_cast<std::uint32_t>(width));
    put_be32(ihdr, static_cast<std::uint32_t>(height));
    ihdr.push_back(8);  // bit depth
    ihdr.push_back(2);  // color type: truecolor RGB
    ihdr.push_back(0);  // compression
    ihdr.push_back(0);  // filter
    ihdr.push_back(0);  // interlace
    put_chunk(png, "IHDR", ihdr);
    put_chunk(png, "IDAT", comp);
    put_chunk(png, "IEND", {});

    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("IoFailure", "cannot open '" + path + "' for writing");
    out.write(reinterpret_cast<const char*>(png.data()),
              static_cast<std::streamsize>(png.size()));
    if (!out) throw Error("IoFailure", "write failed for '" + path + "'");
}

}  // namespace iini
