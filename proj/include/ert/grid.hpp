#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include "ert/geometry.hpp"
#include "ert/parallel.hpp"
#include "ert/phantom.hpp"

namespace ert {

namespace detail {

/// Shortest round-trip decimal formatting; used everywhere numbers are
/// written so re-runs are byte-identical.
inline std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace detail

/// Uniform n x n sampling of a function on [-1,1]^2 at pixel centers
/// x_jk = (-1 + (j+1/2)*2/n, -1 + (k+1/2)*2/n), stored row-major with j major.
class ImageGrid {
  public:
    ImageGrid(int n_side, std::vector<double> values)
        : n_side_(n_side), values_(std::move(values)) {
        if (n_side_ < 2) throw std::invalid_argument("ImageGrid: n_side must be >= 2");
        if (values_.size() != static_cast<std::size_t>(n_side_) * n_side_)
            throw std::invalid_argument("ImageGrid: value count must be n_side^2");
        for (double v : values_)
            if (!std::isfinite(v)) throw std::invalid_argument("ImageGrid: values must be finite");
    }

    static ImageGrid zeros(int n_side) {
        if (n_side < 2) throw std::invalid_argument("ImageGrid: n_side must be >= 2");
        return ImageGrid(n_side, std::vector<double>(static_cast<std::size_t>(n_side) * n_side, 0.0));
    }

    int n_side() const { return n_side_; }
    double pixel_size() const { return 2.0 / n_side_; }
    std::span<const double> values() const { return values_; }

    double value(int j, int k) const { return values_[static_cast<std::size_t>(j) * n_side_ + k]; }

    Vec2 pixel_center(int j, int k) const {
        const double h = pixel_size();
        return {-1.0 + (j + 0.5) * h, -1.0 + (k + 0.5) * h};
    }

    /// Bilinear interpolation on the pixel-center lattice; points outside
    /// [-1,1]^2 (and beyond the outermost centers) blend toward 0.
    double sample_bilinear(Vec2 p) const {
        const double h = pixel_size();
        const double u = (p.x + 1.0) / h - 0.5;
        const double v = (p.y + 1.0) / h - 0.5;
        const double fj = std::floor(u);
        const double fk = std::floor(v);
        const int j0 = static_cast<int>(fj);
        const int k0 = static_cast<int>(fk);
        const double a = u - fj;
        const double b = v - fk;
        auto at = [&](int j, int k) -> double {
            if (j < 0 || k < 0 || j >= n_side_ || k >= n_side_) return 0.0;
            return value(j, k);
        };
        return (1 - a) * ((1 - b) * at(j0, k0) + b * at(j0, k0 + 1)) +
               a * ((1 - b) * at(j0 + 1, k0) + b * at(j0 + 1, k0 + 1));
    }

  private:
    int n_side_;
    std::vector<double> values_;
};

/// Sample a phantom at all pixel centers.
inline ImageGrid rasterize(const Phantom& phantom, int n_side, unsigned threads = 0) {
    if (n_side < 2) throw std::invalid_argument("rasterize: n_side must be >= 2");
    std::vector<double> values(static_cast<std::size_t>(n_side) * n_side);
    const double h = 2.0 / n_side;
    parallel_for(static_cast<std::size_t>(n_side), [&](std::size_t j) {
        const double x = -1.0 + (static_cast<double>(j) + 0.5) * h;
        for (int k = 0; k < n_side; ++k) {
            const double y = -1.0 + (k + 0.5) * h;
            values[j * n_side + k] = eval_phantom(phantom, {x, y});
        }
    }, threads);
    return ImageGrid(n_side, std::move(values));
}

// ---- file format ----
// text:   "ERTGRID v1 <n_side>\n" then n_side^2 whitespace-separated values
// binary: 8-byte magic "ERTGRIDB" + u64 n_side (little endian), then
//         n_side^2 little-endian doubles

inline void write_grid_text(const ImageGrid& grid, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("grid: cannot write " + path);
    out << "ERTGRID v1 " << grid.n_side() << '\n';
    const auto vals = grid.values();
    const int n = grid.n_side();
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
            out << detail::format_double(vals[static_cast<std::size_t>(j) * n + k]);
            out << (k + 1 == n ? '\n' : ' ');
        }
    }
    if (!out) throw std::runtime_error("grid: write failed for " + path);
}

inline void write_grid_binary(const ImageGrid& grid, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("grid: cannot write " + path);
    out.write("ERTGRIDB", 8);
    const std::uint64_t n = static_cast<std::uint64_t>(grid.n_side());
    out.write(reinterpret_cast<const char*>(&n), 8);
    const auto vals = grid.values();
    out.write(reinterpret_cast<const char*>(vals.data()),
              static_cast<std::streamsize>(vals.size() * sizeof(double)));
    if (!out) throw std::runtime_error("grid: write failed for " + path);
}

inline ImageGrid read_grid(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("grid: cannot open " + path);
    char magic[8] = {};
    in.read(magic, 8);
    if (in.gcount() == 8 && std::memcmp(magic, "ERTGRIDB", 8) == 0) {
        std::uint64_t n = 0;
        in.read(reinterpret_cast<char*>(&n), 8);
        if (!in || n < 2 || n > (1u << 16)) throw std::invalid_argument("grid: bad binary header in " + path);
        std::vector<double> values(n * n);
        in.read(reinterpret_cast<char*>(values.data()),
                static_cast<std::streamsize>(values.size() * sizeof(double)));
        if (!in) throw std::invalid_argument("grid: truncated binary data in " + path);
        return ImageGrid(static_cast<int>(n), std::move(values));
    }
    in.clear();
    in.seekg(0);
    std::string tag, version;
    int n = 0;
    in >> tag >> version >> n;
    if (!in || tag != "ERTGRID" || version != "v1" || n < 2)
        throw std::invalid_argument("grid: bad header in " + path);
    std::vector<double> values(static_cast<std::size_t>(n) * n);
    for (auto& v : values)
        if (!(in >> v)) throw std::invalid_argument("grid: truncated data in " + path);
    return ImageGrid(n, std::move(values));
}

}  // namespace ert
