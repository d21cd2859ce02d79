// SPDX-License-Identifier: Apache-2.0
//
// Iterative structure rectification: keep the highest-confidence split
// probabilities, re-estimate the rest through a pluggable provider, blend,
// re-derive the structure, repeat.

#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "octovox/errors.hpp"
#include "octovox/grid.hpp"
#include "octovox/octree.hpp"

namespace octovox {

struct RectifyConfig {
    // Fraction of nodes per level whose values are retained unchanged.
    std::vector<double> keep_ratios{0.10, 0.30};
    // Weight on the provider's value when blending into the low set.
    std::vector<double> blend_new{0.60, 0.50};
    std::uint32_t iterations = 3;

    void validate(std::uint32_t depth) const {
        if (iterations < 1) {
            throw config_error("rectify iterations must be at least 1");
        }
        const std::size_t want = depth - 1;
        if (keep_ratios.size() != want || blend_new.size() != want) {
            throw config_error("expected " + std::to_string(want) + " keep ratios and blend weights, got " +
                               std::to_string(keep_ratios.size()) + " and " +
                               std::to_string(blend_new.size()));
        }
        for (double k : keep_ratios) {
            if (!(k >= 0.0 && k <= 1.0)) {
                throw config_error("keep ratio " + std::to_string(k) + " outside [0, 1]");
            }
        }
        for (double b : blend_new) {
            if (!(b >= 0.0 && b <= 1.0)) {
                throw config_error("blend weight " + std::to_string(b) + " outside [0, 1]");
            }
        }
    }
};

// Source of re-estimated split probabilities, one value in [0, 1] per
// requested node. Stands in for a learned predictor.
class SplitProbabilityProvider {
public:
    virtual ~SplitProbabilityProvider() = default;

    virtual std::vector<double> split_probabilities(std::uint32_t level,
                                                    const std::vector<CellCoord>& coords) = 0;
};

// Answers from a binary split ground truth, optionally flipping each answer
// with a seeded noise rate. Fresh noise is drawn per query, so repeated
// queries of one node are independent trials.
class OracleProvider final : public SplitProbabilityProvider {
public:
    OracleProvider(OctreeGT gt, double noise_rate, std::uint64_t seed)
        : gt_(std::move(gt)), noise_rate_(noise_rate), rng_(seed) {
        if (!(noise_rate >= 0.0 && noise_rate <= 1.0)) {
            throw config_error("oracle noise rate " + std::to_string(noise_rate) +
                               " outside [0, 1]");
        }
        detail::check_pyramid_dims(gt_.levels, "oracle ground truth");
    }

    std::vector<double> split_probabilities(std::uint32_t level,
                                            const std::vector<CellCoord>& coords) override {
        if (level >= gt_.levels.size()) {
            throw provider_error("oracle queried at level " + std::to_string(level) +
                                 ", ground truth has " + std::to_string(gt_.levels.size()));
        }
        const auto& grid = gt_.levels[level];
        std::vector<double> out;
        out.reserve(coords.size());
        for (const CellCoord& c : coords) {
            if (c.x >= grid.dims().x || c.y >= grid.dims().y || c.z >= grid.dims().z) {
                throw provider_error("oracle queried outside level " + std::to_string(level) +
                                     " dims " + grid.dims().to_string());
            }
            double v = grid.at(c) ? 1.0 : 0.0;
            if (noise_rate_ > 0.0 && uniform01() < noise_rate_) v = 1.0 - v;
            out.push_back(v);
        }
        return out;
    }

private:
    // 53-bit mantissa draw; fixed construction keeps runs reproducible
    // across standard libraries.
    double uniform01() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

    OctreeGT gt_;
    double noise_rate_;
    std::mt19937_64 rng_;
};

class ConstantProvider final : public SplitProbabilityProvider {
public:
    explicit ConstantProvider(double value) : value_(value) {
        if (!(value >= 0.0 && value <= 1.0)) {
            throw config_error("constant provider value " + std::to_string(value) +
                               " outside [0, 1]");
        }
    }

    std::vector<double> split_probabilities(std::uint32_t /*level*/,
                                            const std::vector<CellCoord>& coords) override {
        return std::vector<double>(coords.size(), value_);
    }

private:
    double value_;
};

// Answers from a probability pyramid, e.g. one loaded from a mask file.
class MaskProvider final : public SplitProbabilityProvider {
public:
    explicit MaskProvider(OctreeMask mask) : mask_(std::move(mask)) {
        detail::check_pyramid_dims(mask_.levels, "provider mask");
    }

    std::vector<double> split_probabilities(std::uint32_t level,
                                            const std::vector<CellCoord>& coords) override {
        if (level >= mask_.levels.size()) {
            throw provider_error("mask provider queried at level " + std::to_string(level) +
                                 ", mask has " + std::to_string(mask_.levels.size()));
        }
        const auto& grid = mask_.levels[level];
        std::vector<double> out;
        out.reserve(coords.size());
        for (const CellCoord& c : coords) {
            if (c.x >= grid.dims().x || c.y >= grid.dims().y || c.z >= grid.dims().z) {
                throw provider_error("mask provider queried outside level " +
                                     std::to_string(level) + " dims " + grid.dims().to_string());
            }
            out.push_back(grid.at(c));
        }
        return out;
    }

private:
    OctreeMask mask_;
};

struct ConfidencePartition {
    // Linear indices, each list ascending; disjoint and jointly exhaustive.
    std::vector<std::uint64_t> high;
    std::vector<std::uint64_t> low;
};

// Top ceil(keep_ratio * n) values are high-confidence, ties to the smaller
// linear index; the rest are low.
inline ConfidencePartition partition_confidence(const DenseGrid<float>& level,
                                                double keep_ratio) {
    if (!(keep_ratio >= 0.0 && keep_ratio <= 1.0)) {
        throw config_error("keep ratio " + std::to_string(keep_ratio) + " outside [0, 1]");
    }
    const std::uint64_t n = level.cell_count();
    std::vector<std::uint64_t> order(n);
    for (std::uint64_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&level](std::uint64_t i, std::uint64_t j) {
        const float vi = level[i];
        const float vj = level[j];
        if (vi != vj) return vi > vj;
        return i < j;
    });
    const std::uint64_t k = detail::top_k_count(keep_ratio, n);
    ConfidencePartition part;
    part.high.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
    part.low.assign(order.begin() + static_cast<std::ptrdiff_t>(k), order.end());
    std::sort(part.high.begin(), part.high.end());
    std::sort(part.low.begin(), part.low.end());
    return part;
}

// High-set values are copied bitwise; each low-set value becomes
// blend_new * provider + (1 - blend_new) * old, computed in double.
inline DenseGrid<float> rectify_level(const DenseGrid<float>& level, double keep_ratio,
                                      double blend_new, SplitProbabilityProvider& provider,
                                      std::uint32_t level_index) {
    if (!(blend_new >= 0.0 && blend_new <= 1.0)) {
        throw config_error("blend weight " + std::to_string(blend_new) + " outside [0, 1]");
    }
    const ConfidencePartition part = partition_confidence(level, keep_ratio);

    std::vector<CellCoord> coords;
    coords.reserve(part.low.size());
    for (std::uint64_t i : part.low) coords.push_back(coord_of(level.dims(), i));
    const std::vector<double> fresh = provider.split_probabilities(level_index, coords);
    if (fresh.size() != coords.size()) {
        throw provider_error("provider returned " + std::to_string(fresh.size()) +
                             " values for " + std::to_string(coords.size()) + " nodes");
    }

    DenseGrid<float> out = level;
    for (std::size_t j = 0; j < part.low.size(); ++j) {
        const double p_new = fresh[j];
        if (!(p_new >= 0.0 && p_new <= 1.0)) {
            throw provider_error("provider value " + std::to_string(p_new) + " outside [0, 1]");
        }
        const std::uint64_t i = part.low[j];
        const double p_old = static_cast<double>(level[i]);
        out[i] = static_cast<float>(blend_new * p_new + (1.0 - blend_new) * p_old);
    }
    return out;
}

struct RectifyResult {
    OctreeMask final_mask;
    OctreeStructure final_structure;
    // Structure derived after each iteration, oldest first.
    std::vector<OctreeStructure> per_iteration;
};

// Runs {rectify every level, re-derive the structure} for the configured
// iteration count. The confidence partition is recomputed from the current
// mask each round, so high-confidence regions can change between rounds.
inline RectifyResult rectify_iterate(const OctreeMask& mask, const OctreeConfig& config,
                                     const RectifyConfig& rcfg,
                                     SplitProbabilityProvider& provider) {
    config.validate();
    rcfg.validate(config.depth);
    detail::check_pyramid_dims(mask.levels, "mask");
    if (mask.levels.size() != static_cast<std::size_t>(config.depth - 1) ||
        mask.base_dims() != config.base_dims) {
        throw dimension_error("rectify_iterate: mask shape " + mask.base_dims().to_string() +
                              " x" + std::to_string(mask.levels.size() + 1) +
                              " does not match config " + config.base_dims.to_string() + " x" +
                              std::to_string(config.depth));
    }

    RectifyResult result;
    result.final_mask = mask;
    result.per_iteration.reserve(rcfg.iterations);
    for (std::uint32_t it = 0; it < rcfg.iterations; ++it) {
        for (std::size_t l = 0; l < result.final_mask.levels.size(); ++l) {
            result.final_mask.levels[l] =
                rectify_level(result.final_mask.levels[l], rcfg.keep_ratios[l],
                              rcfg.blend_new[l], provider, static_cast<std::uint32_t>(l));
        }
        result.per_iteration.push_back(derive_structure(result.final_mask, config));
    }
    result.final_structure = result.per_iteration.back();
    return result;
}

}  // namespace octovox
