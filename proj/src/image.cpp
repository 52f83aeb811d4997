#include "bie/image.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>

#include "bie/errors.hpp"

namespace bie {

namespace {

void put_be32(std::ofstream& f, std::uint32_t v) {
    const unsigned char b[4] = {
        (unsigned char)(v >> 24), (unsigned char)(v >> 16),
        (unsigned char)(v >> 8), (unsigned char)v};
    f.write(reinterpret_cast<const char*>(b), 4);
}

void put_chunk(std::ofstream& f, const char type[4],
               const std::vector<unsigned char>& data) {
    put_be32(f, std::uint32_t(data.size()));
    f.write(type, 4);
    if (!data.empty())
        f.write(reinterpret_cast<const char*>(data.data()),
                std::streamsize(data.size()));
    uLong crc = crc32(0L, reinterpret_cast<const Bytef*>(type), 4);
    if (!data.empty()) crc = crc32(crc, data.data(), uInt(data.size()));
    put_be32(f, std::uint32_t(crc));
}

// Five-anchor color ramp (dark violet to yellow) over t in [0, 1].
void colormap(double t, unsigned char* rgb) {
    static constexpr double anchor[5][3] = {{68, 1, 84},
                                            {59, 82, 139},
                                            {33, 145, 140},
                                            {94, 201, 98},
                                            {253, 231, 37}};
    t = std::clamp(t, 0.0, 1.0) * 4.0;
    const std::size_t i = std::min<std::size_t>(3, std::size_t(t));
    const double u = t - double(i);
    for (int c = 0; c < 3; ++c)
        rgb[c] = (unsigned char)std::lround(anchor[i][c] +
                                            u * (anchor[i + 1][c] - anchor[i][c]));
}

}  // namespace

void write_png(const std::string& path, const image_rgb& img) {
    require(img.width >= 1 && img.height >= 1 &&
                img.pixels.size() == 3 * img.width * img.height,
            errc::invalid_argument, "write_png: inconsistent raster");

    // Raw scanlines, one leading filter byte (0 = none) per row.
    const std::size_t stride = 3 * img.width;
    std::vector<unsigned char> raw((stride + 1) * img.height);
    for (std::size_t y = 0; y < img.height; ++y) {
        raw[y * (stride + 1)] = 0;
        std::copy_n(img.pixels.data() + y * stride, stride,
                    raw.data() + y * (stride + 1) + 1);
    }
    uLongf zlen = compressBound(uLong(raw.size()));
    std::vector<unsigned char> zdata(zlen);
    require(compress2(zdata.data(), &zlen, raw.data(), uLong(raw.size()), 6) ==
                Z_OK,
            errc::io_error, "write_png: deflate failed");
    zdata.resize(zlen);

    std::ofstream f(path, std::ios::binary);
    require(f.good(), errc::io_error, "cannot open " + path);
    static const unsigned char sig[8] = {137, 80, 78, 71, 13, 10, 26, 10};
    f.write(reinterpret_cast<const char*>(sig), 8);

    std::vector<unsigned char> ihdr(13);
    const std::uint32_t w = std::uint32_t(img.width),
                        h = std::uint32_t(img.height);
    ihdr[0] = w >> 24;
    ihdr[1] = w >> 16;
    ihdr[2] = w >> 8;
    ihdr[3] = w;
    ihdr[4] = h >> 24;
    ihdr[5] = h >> 16;
    ihdr[6] = h >> 8;
    ihdr[7] = h;
    ihdr[8] = 8;   // bit depth
    ihdr[9] = 2;   // truecolor
    ihdr[10] = 0;  // deflate
    ihdr[11] = 0;  // adaptive filters
    ihdr[12] = 0;  // no interlace
    put_chunk(f, "IHDR", ihdr);
    put_chunk(f, "IDAT", zdata);
    put_chunk(f, "IEND", {});
    require(f.good(), errc::io_error, "write failed: " + path);
}

image_rgb rasterize(const std::vector<double>& values,
                    const std::vector<std::size_t>& index, std::size_t nx,
                    std::size_t ny, double vmin, double vmax) {
    require(values.size() == index.size(), errc::invalid_argument,
            "rasterize: one lattice index per value required");
    require(nx >= 1 && ny >= 1, errc::invalid_argument,
            "rasterize: empty lattice");
    if (vmin == vmax) {
        vmin = 0.0;
        vmax = 1.0;
        if (!values.empty()) {
            vmin = *std::min_element(values.begin(), values.end());
            vmax = *std::max_element(values.begin(), values.end());
        }
        if (vmax <= vmin) vmax = vmin + 1.0;
    }
    image_rgb img;
    img.width = nx;
    img.height = ny;
    img.pixels.assign(3 * nx * ny, 40);  // background: dark gray
    for (std::size_t i = 0; i < values.size(); ++i) {
        require(index[i] < nx * ny, errc::invalid_argument,
                "rasterize: lattice index out of range");
        const std::size_t ix = index[i] % nx, iy = index[i] / nx;
        // lattice rows count upward, image rows downward
        unsigned char* px = img.pixels.data() + 3 * ((ny - 1 - iy) * nx + ix);
        colormap((values[i] - vmin) / (vmax - vmin), px);
    }
    return img;
}

}  // namespace bie
