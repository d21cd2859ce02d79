// SPDX-License-Identifier: Apache-2.0
//
// Pinhole cameras and voxel-center projection.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "octovox/errors.hpp"
#include "octovox/grid.hpp"

namespace octovox {

using Vec3d = std::array<double, 3>;

struct CameraModel {
    // Row-major 3x3: fx 0 cx / 0 fy cy / 0 0 1.
    std::array<double, 9> intrinsics{};
    // Row-major 4x4 mapping world homogeneous coordinates into the camera
    // frame (z forward); bottom row 0 0 0 1.
    std::array<double, 16> extrinsics{};
    std::uint32_t image_width = 0;
    std::uint32_t image_height = 0;

    bool operator==(const CameraModel&) const = default;

    void validate() const {
        if (image_width < 1 || image_height < 1) {
            throw config_error("camera image size " + std::to_string(image_width) + "x" +
                               std::to_string(image_height) + " must be at least 1x1");
        }
        if (intrinsics[6] != 0.0 || intrinsics[7] != 0.0 || intrinsics[8] != 1.0) {
            throw config_error("camera intrinsics bottom row must be 0 0 1");
        }
        if (extrinsics[12] != 0.0 || extrinsics[13] != 0.0 || extrinsics[14] != 0.0 ||
            extrinsics[15] != 1.0) {
            throw config_error("camera extrinsics bottom row must be 0 0 0 1");
        }
    }
};

struct PixelHit {
    double u = 0.0;
    double v = 0.0;
    double depth = 0.0;  // camera-frame z, positive
};

// Projects a world point through extrinsics then intrinsics. Absent when the
// point sits at or behind the camera plane or lands outside [0,W) x [0,H).
inline std::optional<PixelHit> project_point(const CameraModel& cam, const Vec3d& p) {
    const auto& t = cam.extrinsics;
    const double qx = t[0] * p[0] + t[1] * p[1] + t[2] * p[2] + t[3];
    const double qy = t[4] * p[0] + t[5] * p[1] + t[6] * p[2] + t[7];
    const double qz = t[8] * p[0] + t[9] * p[1] + t[10] * p[2] + t[11];
    if (!(qz > 0.0)) return std::nullopt;
    const auto& k = cam.intrinsics;
    const double u = k[0] * qx / qz + k[2];
    const double v = k[4] * qy / qz + k[5];
    if (!(u >= 0.0 && u < static_cast<double>(cam.image_width))) return std::nullopt;
    if (!(v >= 0.0 && v < static_cast<double>(cam.image_height))) return std::nullopt;
    return PixelHit{u, v, qz};
}

// Raster cell under a hit; in range by the PixelHit bounds invariant.
inline std::pair<std::uint32_t, std::uint32_t> pixel_of(const PixelHit& hit) {
    return {static_cast<std::uint32_t>(std::floor(hit.u)),
            static_cast<std::uint32_t>(std::floor(hit.v))};
}

inline Vec3d voxel_center(const GridGeometry& geom, const CellCoord& coord) {
    if (coord.x >= geom.dims.x || coord.y >= geom.dims.y || coord.z >= geom.dims.z) {
        throw index_error("voxel_center: cell (" + std::to_string(coord.x) + "," +
                          std::to_string(coord.y) + "," + std::to_string(coord.z) +
                          ") outside dims " + geom.dims.to_string());
    }
    return Vec3d{
        static_cast<double>(geom.origin[0]) + (coord.x + 0.5) * static_cast<double>(geom.voxel_size[0]),
        static_cast<double>(geom.origin[1]) + (coord.y + 0.5) * static_cast<double>(geom.voxel_size[1]),
        static_cast<double>(geom.origin[2]) + (coord.z + 0.5) * static_cast<double>(geom.voxel_size[2]),
    };
}

}  // namespace octovox
