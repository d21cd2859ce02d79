// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "octovox/errors.hpp"

namespace octovox {

using Label = std::uint16_t;
using Vec3f = std::array<float, 3>;

// Cell counts along each axis.
struct GridDims {
    std::uint32_t x = 0;
    std::uint32_t y = 0;
    std::uint32_t z = 0;

    bool operator==(const GridDims&) const = default;

    std::uint64_t cell_count() const {
        return static_cast<std::uint64_t>(x) * y * z;
    }

    std::string to_string() const {
        return std::to_string(x) + "x" + std::to_string(y) + "x" + std::to_string(z);
    }
};

// Integer cell coordinate inside a grid box.
struct CellCoord {
    std::uint32_t x = 0;
    std::uint32_t y = 0;
    std::uint32_t z = 0;

    bool operator==(const CellCoord&) const = default;
};

// Linear cell index: x-major, z-fastest. Bijective over the cell box.
inline std::uint64_t linear_index(const GridDims& dims, std::uint32_t a, std::uint32_t b,
                                  std::uint32_t c) {
    if (a >= dims.x || b >= dims.y || c >= dims.z) {
        throw index_error("cell (" + std::to_string(a) + "," + std::to_string(b) + "," +
                          std::to_string(c) + ") outside grid " + dims.to_string());
    }
    return (static_cast<std::uint64_t>(a) * dims.y + b) * dims.z + c;
}

inline std::uint64_t linear_index(const GridDims& dims, const CellCoord& c) {
    return linear_index(dims, c.x, c.y, c.z);
}

inline CellCoord coord_of(const GridDims& dims, std::uint64_t index) {
    if (index >= dims.cell_count()) {
        throw index_error("linear index " + std::to_string(index) + " outside grid " +
                          dims.to_string());
    }
    CellCoord c;
    c.z = static_cast<std::uint32_t>(index % dims.z);
    index /= dims.z;
    c.y = static_cast<std::uint32_t>(index % dims.y);
    c.x = static_cast<std::uint32_t>(index / dims.y);
    return c;
}

// World placement of a grid: cell box, metric cell size, minimum corner.
struct GridGeometry {
    GridDims dims;
    Vec3f voxel_size{1.0f, 1.0f, 1.0f};
    Vec3f origin{0.0f, 0.0f, 0.0f};
};

// Dense 3D field of per-cell values. Values are immutable in spirit: all
// library operations build new grids rather than mutating inputs.
template <typename T>
class DenseGrid {
public:
    DenseGrid() = default;

    explicit DenseGrid(GridDims dims, T fill = T{})
        : dims_(dims), values_(dims.cell_count(), fill) {}

    DenseGrid(GridDims dims, Vec3f voxel_size, Vec3f origin, T fill = T{})
        : dims_(dims),
          voxel_size_(voxel_size),
          origin_(origin),
          values_(dims.cell_count(), fill) {}

    DenseGrid(const GridGeometry& geom, T fill = T{})
        : DenseGrid(geom.dims, geom.voxel_size, geom.origin, fill) {}

    const GridDims& dims() const { return dims_; }
    const Vec3f& voxel_size() const { return voxel_size_; }
    const Vec3f& origin() const { return origin_; }
    GridGeometry geometry() const { return GridGeometry{dims_, voxel_size_, origin_}; }

    void set_voxel_size(const Vec3f& s) { voxel_size_ = s; }
    void set_origin(const Vec3f& o) { origin_ = o; }

    std::uint64_t cell_count() const { return values_.size(); }

    T& at(std::uint32_t a, std::uint32_t b, std::uint32_t c) {
        return values_[linear_index(dims_, a, b, c)];
    }
    const T& at(std::uint32_t a, std::uint32_t b, std::uint32_t c) const {
        return values_[linear_index(dims_, a, b, c)];
    }
    T& at(const CellCoord& c) { return at(c.x, c.y, c.z); }
    const T& at(const CellCoord& c) const { return at(c.x, c.y, c.z); }

    // Unchecked access by linear index.
    T& operator[](std::uint64_t i) { return values_[i]; }
    const T& operator[](std::uint64_t i) const { return values_[i]; }

    std::vector<T>& values() { return values_; }
    const std::vector<T>& values() const { return values_; }

    bool operator==(const DenseGrid&) const = default;

private:
    GridDims dims_;
    Vec3f voxel_size_{1.0f, 1.0f, 1.0f};
    Vec3f origin_{0.0f, 0.0f, 0.0f};
    std::vector<T> values_;
};

namespace detail {

inline void require_even_dims(const GridDims& dims, const char* op) {
    if (dims.x % 2 != 0 || dims.y % 2 != 0 || dims.z % 2 != 0) {
        throw dimension_error(std::string(op) + ": dims " + dims.to_string() +
                              " must all be even");
    }
    if (dims.cell_count() == 0) {
        throw dimension_error(std::string(op) + ": empty grid");
    }
}

// Halved geometry: cells double their metric edge, origin unchanged.
inline GridGeometry halved_geometry(const GridGeometry& g) {
    GridGeometry out = g;
    out.dims = GridDims{g.dims.x / 2, g.dims.y / 2, g.dims.z / 2};
    out.voxel_size = Vec3f{g.voxel_size[0] * 2, g.voxel_size[1] * 2, g.voxel_size[2] * 2};
    return out;
}

inline GridGeometry doubled_geometry(const GridGeometry& g) {
    GridGeometry out = g;
    out.dims = GridDims{g.dims.x * 2, g.dims.y * 2, g.dims.z * 2};
    out.voxel_size = Vec3f{g.voxel_size[0] / 2, g.voxel_size[1] / 2, g.voxel_size[2] / 2};
    return out;
}

}  // namespace detail

// Each output cell is the arithmetic mean of its 8 source cells.
inline DenseGrid<float> average_pool_2x(const DenseGrid<float>& grid) {
    detail::require_even_dims(grid.dims(), "average_pool_2x");
    DenseGrid<float> out(detail::halved_geometry(grid.geometry()));
    const GridDims& d = out.dims();
    for (std::uint32_t a = 0; a < d.x; ++a) {
        for (std::uint32_t b = 0; b < d.y; ++b) {
            for (std::uint32_t c = 0; c < d.z; ++c) {
                double sum = 0.0;
                for (std::uint32_t da = 0; da < 2; ++da)
                    for (std::uint32_t db = 0; db < 2; ++db)
                        for (std::uint32_t dc = 0; dc < 2; ++dc)
                            sum += grid.at(2 * a + da, 2 * b + db, 2 * c + dc);
                out.at(a, b, c) = static_cast<float>(sum / 8.0);
            }
        }
    }
    return out;
}

// Each output cell is the most frequent label among its 8 source cells.
// Ties go to the smallest label id.
inline DenseGrid<Label> mode_pool_2x(const DenseGrid<Label>& grid) {
    detail::require_even_dims(grid.dims(), "mode_pool_2x");
    DenseGrid<Label> out(detail::halved_geometry(grid.geometry()));
    const GridDims& d = out.dims();
    std::array<Label, 8> octant;
    for (std::uint32_t a = 0; a < d.x; ++a) {
        for (std::uint32_t b = 0; b < d.y; ++b) {
            for (std::uint32_t c = 0; c < d.z; ++c) {
                std::size_t n = 0;
                for (std::uint32_t da = 0; da < 2; ++da)
                    for (std::uint32_t db = 0; db < 2; ++db)
                        for (std::uint32_t dc = 0; dc < 2; ++dc)
                            octant[n++] = grid.at(2 * a + da, 2 * b + db, 2 * c + dc);
                std::sort(octant.begin(), octant.end());
                Label best = octant[0];
                int best_count = 0;
                int run = 0;
                for (std::size_t i = 0; i < octant.size(); ++i) {
                    run = (i > 0 && octant[i] == octant[i - 1]) ? run + 1 : 1;
                    if (run > best_count) {
                        best_count = run;
                        best = octant[i];
                    }
                }
                out.at(a, b, c) = best;
            }
        }
    }
    return out;
}

// Each source cell's value is copied to its 8 children. Left inverse of
// average_pool_2x.
template <typename T>
DenseGrid<T> replicate_upsample_2x(const DenseGrid<T>& grid) {
    if (grid.cell_count() == 0) {
        throw dimension_error("replicate_upsample_2x: empty grid");
    }
    DenseGrid<T> out(detail::doubled_geometry(grid.geometry()));
    const GridDims& d = grid.dims();
    for (std::uint32_t a = 0; a < d.x; ++a) {
        for (std::uint32_t b = 0; b < d.y; ++b) {
            for (std::uint32_t c = 0; c < d.z; ++c) {
                const T v = grid.at(a, b, c);
                for (std::uint32_t da = 0; da < 2; ++da)
                    for (std::uint32_t db = 0; db < 2; ++db)
                        for (std::uint32_t dc = 0; dc < 2; ++dc)
                            out.at(2 * a + da, 2 * b + db, 2 * c + dc) = v;
            }
        }
    }
    return out;
}

}  // namespace octovox
