#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace bie {

// 8-bit RGB raster, rows top to bottom.
struct image_rgb {
    std::size_t width = 0, height = 0;
    std::vector<unsigned char> pixels;  // 3 * width * height
};

void write_png(const std::string& path, const image_rgb& img);

// Colormap scalar samples scattered on an nx-by-ny lattice: index[i] is the
// row-major cell (iy * nx + ix, iy counted upward) holding values[i]; cells
// without a sample are painted dark gray.  Pass vmin == vmax to autoscale to
// the data range.
image_rgb rasterize(const std::vector<double>& values,
                    const std::vector<std::size_t>& index, std::size_t nx,
                    std::size_t ny, double vmin = 0.0, double vmax = 0.0);

}  // namespace bie
