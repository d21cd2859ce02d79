// SPDX-License-Identifier: Apache-2.0
//
// Deterministic synthetic scenes and rendered segmentation maps, so every
// pipeline stage can be exercised without any dataset. Scenes mix box sizes
// across scales on purpose: small instances are the hard case for a
// fixed-resolution grid.

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "octovox/errors.hpp"
#include "octovox/geometry.hpp"
#include "octovox/grid.hpp"
#include "octovox/semantic_init.hpp"

namespace octovox {

struct BoxSpec {
    Label label = 0;
    CellCoord min_corner;
    GridDims size{1, 1, 1};

    bool operator==(const BoxSpec&) const = default;
};

struct SceneSpec {
    std::uint64_t seed = 0;
    GridDims dims;
    Vec3f voxel_size{1.0f, 1.0f, 1.0f};
    Vec3f origin{0.0f, 0.0f, 0.0f};
    std::uint32_t ground_height = 0;  // cells; z below this is ground
    Label ground_label = 1;
    std::vector<BoxSpec> boxes;
    std::uint32_t class_count = 8;

    bool operator==(const SceneSpec&) const = default;

    void validate() const {
        if (dims.cell_count() == 0) {
            throw config_error("scene dims " + dims.to_string() + " are empty");
        }
        if (class_count < 2) {
            throw config_error("scene class count must be at least 2");
        }
        if (ground_height > dims.z) {
            throw config_error("ground height " + std::to_string(ground_height) +
                               " exceeds dims.z " + std::to_string(dims.z));
        }
        if (ground_height > 0 && (ground_label < 1 || ground_label >= class_count)) {
            throw config_error("ground label " + std::to_string(ground_label) +
                               " outside [1, " + std::to_string(class_count) + ")");
        }
        for (std::size_t i = 0; i < boxes.size(); ++i) {
            const BoxSpec& box = boxes[i];
            if (box.label < 1 || box.label >= class_count) {
                throw config_error("box " + std::to_string(i) + " label " +
                                   std::to_string(box.label) + " outside [1, " +
                                   std::to_string(class_count) + ")");
            }
            if (box.size.cell_count() == 0) {
                throw config_error("box " + std::to_string(i) + " has an empty size");
            }
            if (box.min_corner.x + box.size.x > dims.x ||
                box.min_corner.y + box.size.y > dims.y ||
                box.min_corner.z + box.size.z > dims.z) {
                throw config_error("box " + std::to_string(i) + " exceeds scene dims " +
                                   dims.to_string());
            }
        }
    }
};

// Label 0 everywhere, ground slab below ground_height, then boxes painted
// in list order (later boxes overwrite).
inline DenseGrid<Label> make_scene(const SceneSpec& spec) {
    spec.validate();
    DenseGrid<Label> grid(spec.dims, spec.voxel_size, spec.origin, Label{0});
    for (std::uint32_t a = 0; a < spec.dims.x; ++a)
        for (std::uint32_t b = 0; b < spec.dims.y; ++b)
            for (std::uint32_t c = 0; c < spec.ground_height; ++c)
                grid.at(a, b, c) = spec.ground_label;
    for (const BoxSpec& box : spec.boxes) {
        for (std::uint32_t a = 0; a < box.size.x; ++a)
            for (std::uint32_t b = 0; b < box.size.y; ++b)
                for (std::uint32_t c = 0; c < box.size.z; ++c)
                    grid.at(box.min_corner.x + a, box.min_corner.y + b, box.min_corner.z + c) =
                        box.label;
    }
    return grid;
}

// Fills `spec.boxes` with seeded random boxes spanning three size classes,
// from single voxels up to about a third of the volume per axis.
inline SceneSpec random_scene_spec(std::uint64_t seed, const GridDims& dims,
                                   std::uint32_t class_count, std::uint32_t box_count,
                                   std::uint32_t ground_height) {
    SceneSpec spec;
    spec.seed = seed;
    spec.dims = dims;
    spec.class_count = class_count;
    spec.ground_height = ground_height;
    std::mt19937_64 rng(seed);
    const auto pick = [&rng](std::uint32_t n) {
        return static_cast<std::uint32_t>(rng() % n);
    };
    for (std::uint32_t i = 0; i < box_count; ++i) {
        BoxSpec box;
        const std::uint32_t scale = pick(3);
        const auto axis_size = [&](std::uint32_t extent) {
            std::uint32_t cap;
            switch (scale) {
                case 0: cap = 2; break;
                case 1: cap = std::max(2u, extent / 6); break;
                default: cap = std::max(2u, extent / 3); break;
            }
            cap = std::min(cap, extent);
            return 1 + pick(cap);
        };
        box.size = GridDims{axis_size(dims.x), axis_size(dims.y), axis_size(dims.z)};
        box.size.x = std::min(box.size.x, dims.x);
        box.size.y = std::min(box.size.y, dims.y);
        box.size.z = std::min(box.size.z, dims.z);
        box.min_corner = CellCoord{pick(dims.x - box.size.x + 1), pick(dims.y - box.size.y + 1),
                                   pick(dims.z - box.size.z + 1)};
        box.label = class_count > 2 ? static_cast<Label>(2 + pick(class_count - 2)) : Label{1};
        spec.boxes.push_back(box);
    }
    spec.validate();
    return spec;
}

// Label 0 is empty space, 1 the ground slab; the remaining ids alternate
// background / foreground so both categories appear in any nontrivial scene.
inline ClassTable default_class_table(std::uint32_t class_count) {
    ClassTable table;
    table.set(0, SemClass::none);
    if (class_count > 1) table.set(1, SemClass::ground);
    for (std::uint32_t id = 2; id < class_count; ++id) {
        table.set(static_cast<Label>(id),
                  id % 2 == 0 ? SemClass::background : SemClass::foreground);
    }
    return table;
}

// Cameras evenly spaced on a horizontal ring around the volume center, each
// aimed at the center, z-up world.
inline std::vector<CameraModel> camera_ring(std::uint32_t count, const GridGeometry& geom,
                                            std::uint32_t image_width, std::uint32_t image_height,
                                            double focal = 0.0, double radius_scale = 1.3) {
    if (count == 0) return {};
    if (image_width < 1 || image_height < 1) {
        throw config_error("camera ring image size must be at least 1x1");
    }
    const double ex = static_cast<double>(geom.dims.x) * geom.voxel_size[0];
    const double ey = static_cast<double>(geom.dims.y) * geom.voxel_size[1];
    const double ez = static_cast<double>(geom.dims.z) * geom.voxel_size[2];
    const Vec3d center{geom.origin[0] + ex / 2.0, geom.origin[1] + ey / 2.0,
                       geom.origin[2] + ez / 2.0};
    const double radius = radius_scale * std::max(ex, ey) / 2.0;
    if (focal <= 0.0) {
        focal = 0.6 * std::max(image_width, image_height);
    }

    std::vector<CameraModel> cams;
    cams.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        const double angle = 2.0 * 3.14159265358979323846 * i / count;
        const Vec3d eye{center[0] + radius * std::cos(angle),
                        center[1] + radius * std::sin(angle), center[2]};
        // Look-at basis: camera z toward the center, y down the world z axis.
        Vec3d f{center[0] - eye[0], center[1] - eye[1], center[2] - eye[2]};
        const double fn = std::sqrt(f[0] * f[0] + f[1] * f[1] + f[2] * f[2]);
        f = {f[0] / fn, f[1] / fn, f[2] / fn};
        Vec3d up{0.0, 0.0, 1.0};
        Vec3d x{f[1] * up[2] - f[2] * up[1], f[2] * up[0] - f[0] * up[2],
                f[0] * up[1] - f[1] * up[0]};
        const double xn = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
        if (xn < 1e-12) {
            up = {0.0, 1.0, 0.0};
            x = {f[1] * up[2] - f[2] * up[1], f[2] * up[0] - f[0] * up[2],
                 f[0] * up[1] - f[1] * up[0]};
        }
        const double xn2 = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
        x = {x[0] / xn2, x[1] / xn2, x[2] / xn2};
        const Vec3d y{f[1] * x[2] - f[2] * x[1], f[2] * x[0] - f[0] * x[2],
                      f[0] * x[1] - f[1] * x[0]};

        CameraModel cam;
        cam.image_width = image_width;
        cam.image_height = image_height;
        cam.intrinsics = {focal, 0.0, image_width / 2.0,
                          0.0,   focal, image_height / 2.0,
                          0.0,   0.0, 1.0};
        const Vec3d rows[3] = {x, y, f};
        for (int r = 0; r < 3; ++r) {
            const Vec3d& row = rows[r];
            cam.extrinsics[4 * r + 0] = row[0];
            cam.extrinsics[4 * r + 1] = row[1];
            cam.extrinsics[4 * r + 2] = row[2];
            cam.extrinsics[4 * r + 3] =
                -(row[0] * eye[0] + row[1] * eye[1] + row[2] * eye[2]);
        }
        cam.extrinsics[12] = 0.0;
        cam.extrinsics[13] = 0.0;
        cam.extrinsics[14] = 0.0;
        cam.extrinsics[15] = 1.0;
        cam.validate();
        cams.push_back(cam);
    }
    return cams;
}

// Center-point splatting with a depth buffer: each occupied voxel projects
// to at most one pixel; the nearest depth wins, equal depths go to the
// smaller voxel linear index. Unhit pixels stay void.
inline SegMap render_segmap(const DenseGrid<Label>& scene, const CameraModel& cam,
                            const ClassTable& table) {
    cam.validate();
    SegMap seg(cam.image_width, cam.image_height, SemClass::none);
    std::vector<double> depth(static_cast<std::size_t>(cam.image_width) * cam.image_height,
                              std::numeric_limits<double>::infinity());
    const GridGeometry geom = scene.geometry();
    const GridDims d = scene.dims();
    for (std::uint32_t a = 0; a < d.x; ++a) {
        for (std::uint32_t b = 0; b < d.y; ++b) {
            for (std::uint32_t c = 0; c < d.z; ++c) {
                const Label label = scene.at(a, b, c);
                if (label == 0) continue;
                const SemClass cls = table.require(label);
                const auto hit = project_point(cam, voxel_center(geom, CellCoord{a, b, c}));
                if (!hit) continue;
                const auto [pu, pv] = pixel_of(*hit);
                const std::size_t pi = static_cast<std::size_t>(pv) * cam.image_width + pu;
                if (hit->depth < depth[pi]) {
                    depth[pi] = hit->depth;
                    seg.classes[pi] = cls;
                }
            }
        }
    }
    return seg;
}

}  // namespace octovox
