// SPDX-License-Identifier: Apache-2.0
//
// Semantic-prior mask initialization: project finest voxel centers into
// per-camera segmentation maps, accumulate class-dependent weights, pool
// into a per-level split-probability mask.

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "octovox/errors.hpp"
#include "octovox/geometry.hpp"
#include "octovox/grid.hpp"
#include "octovox/octree.hpp"

namespace octovox {

// Coarse semantic category of a pixel. `none` is the unlabeled/empty class
// ("void" in the text formats); it never contributes weight.
enum class SemClass : std::uint8_t {
    none = 0,
    ground = 1,
    background = 2,
    foreground = 3,
};

inline const char* sem_class_name(SemClass c) {
    switch (c) {
        case SemClass::none: return "void";
        case SemClass::ground: return "ground";
        case SemClass::background: return "background";
        case SemClass::foreground: return "foreground";
    }
    return "void";
}

inline std::optional<SemClass> parse_sem_class(const std::string& name) {
    if (name == "void") return SemClass::none;
    if (name == "ground") return SemClass::ground;
    if (name == "background") return SemClass::background;
    if (name == "foreground") return SemClass::foreground;
    return std::nullopt;
}

struct SegMap {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::vector<SemClass> classes;  // row-major, classes[v * width + u]

    bool operator==(const SegMap&) const = default;

    SegMap() = default;
    SegMap(std::uint32_t w, std::uint32_t h, SemClass fill = SemClass::none)
        : width(w), height(h), classes(static_cast<std::size_t>(w) * h, fill) {}

    SemClass& at(std::uint32_t u, std::uint32_t v) {
        check(u, v);
        return classes[static_cast<std::size_t>(v) * width + u];
    }
    SemClass at(std::uint32_t u, std::uint32_t v) const {
        check(u, v);
        return classes[static_cast<std::size_t>(v) * width + u];
    }

private:
    void check(std::uint32_t u, std::uint32_t v) const {
        if (u >= width || v >= height) {
            throw index_error("segmap pixel (" + std::to_string(u) + "," + std::to_string(v) +
                              ") outside " + std::to_string(width) + "x" +
                              std::to_string(height));
        }
    }
};

// Per-category accumulation weights, deliberately unbalanced so that rare
// foreground content dominates large uniform regions.
struct InitWeights {
    double foreground_w = 1.0;
    double background_w = 0.5;
    double ground_w = 0.1;

    void validate() const {
        if (!(foreground_w >= background_w && background_w >= ground_w && ground_w >= 0.0)) {
            throw config_error("init weights must satisfy foreground >= background >= ground >= 0");
        }
    }

    double weight_of(SemClass c) const {
        switch (c) {
            case SemClass::none: return 0.0;
            case SemClass::ground: return ground_w;
            case SemClass::background: return background_w;
            case SemClass::foreground: return foreground_w;
        }
        return 0.0;
    }
};

// Label id -> semantic category. Labels absent from the table are unmapped;
// consumers that need totality reject them.
struct ClassTable {
    std::map<Label, SemClass> entries;

    bool operator==(const ClassTable&) const = default;

    void set(Label id, SemClass c) { entries[id] = c; }

    std::optional<SemClass> find(Label id) const {
        const auto it = entries.find(id);
        if (it == entries.end()) return std::nullopt;
        return it->second;
    }

    SemClass require(Label id) const {
        const auto c = find(id);
        if (!c) {
            throw config_error("label " + std::to_string(id) + " has no class-table entry");
        }
        return *c;
    }
};

enum class WeightAccum {
    sum,  // additive across cameras
    max,  // highest single-camera weight
};

// Per-voxel view evidence: each camera that sees a voxel's center
// contributes the weight of the pixel class it lands on.
inline DenseGrid<float> accumulate_weights(const GridGeometry& geom,
                                           const std::vector<CameraModel>& cameras,
                                           const std::vector<SegMap>& segmaps,
                                           const InitWeights& weights,
                                           WeightAccum accum = WeightAccum::sum) {
    if (cameras.size() != segmaps.size()) {
        throw config_error("got " + std::to_string(cameras.size()) + " cameras but " +
                           std::to_string(segmaps.size()) + " segmaps");
    }
    weights.validate();
    for (std::size_t i = 0; i < cameras.size(); ++i) {
        cameras[i].validate();
        if (segmaps[i].width != cameras[i].image_width ||
            segmaps[i].height != cameras[i].image_height) {
            throw config_error("segmap " + std::to_string(i) + " size " +
                               std::to_string(segmaps[i].width) + "x" +
                               std::to_string(segmaps[i].height) + " does not match camera " +
                               std::to_string(cameras[i].image_width) + "x" +
                               std::to_string(cameras[i].image_height));
        }
    }

    DenseGrid<float> out(geom);
    const GridDims d = geom.dims;
    for (std::uint32_t a = 0; a < d.x; ++a) {
        for (std::uint32_t b = 0; b < d.y; ++b) {
            for (std::uint32_t c = 0; c < d.z; ++c) {
                const Vec3d center = voxel_center(geom, CellCoord{a, b, c});
                double acc = 0.0;
                for (std::size_t i = 0; i < cameras.size(); ++i) {
                    const auto hit = project_point(cameras[i], center);
                    if (!hit) continue;
                    const auto [pu, pv] = pixel_of(*hit);
                    const double w = weights.weight_of(segmaps[i].at(pu, pv));
                    acc = (accum == WeightAccum::sum) ? acc + w : std::max(acc, w);
                }
                out.at(a, b, c) = static_cast<float>(acc);
            }
        }
    }
    return out;
}

// Average-pool the weight field down to every level, then rescale each level
// into [0, 1] by its own maximum (an all-zero level stays zero). Rank order
// within a level is unchanged by the rescale, so downstream top-k selection
// sees the raw-weight ordering.
inline OctreeMask build_initial_mask(const DenseGrid<float>& weights,
                                     const OctreeConfig& config) {
    config.validate();
    if (weights.dims() != config.finest_dims()) {
        throw dimension_error("build_initial_mask: weight dims " + weights.dims().to_string() +
                              ", config finest dims " + config.finest_dims().to_string());
    }
    for (float v : weights.values()) {
        if (!(v >= 0.0f)) {
            throw config_error("build_initial_mask: weight field holds a negative or NaN value");
        }
    }
    OctreeMask mask;
    mask.levels.resize(config.depth - 1);
    for (std::uint32_t l = 0; l < config.depth - 1; ++l) {
        const std::uint32_t scale = 1u << (config.depth - 1 - l);
        const GridDims d = config.level_dims(l);
        DenseGrid<float> level(d);
        for (std::uint32_t a = 0; a < d.x; ++a)
            for (std::uint32_t b = 0; b < d.y; ++b)
                for (std::uint32_t c = 0; c < d.z; ++c)
                    level.at(a, b, c) =
                        detail::pool_footprint_average(weights, CellCoord{a, b, c}, scale);
        float peak = 0.0f;
        for (float v : level.values()) peak = std::max(peak, v);
        if (peak > 0.0f) {
            for (float& v : level.values()) {
                v = static_cast<float>(static_cast<double>(v) / static_cast<double>(peak));
            }
        }
        mask.levels[l] = std::move(level);
    }
    return mask;
}

}  // namespace octovox
