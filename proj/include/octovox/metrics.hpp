// SPDX-License-Identifier: Apache-2.0
//
// Evaluation: semantic mIoU, per-boundary split-quality IoU, focal loss on
// split probabilities, and structural compression accounting.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "octovox/errors.hpp"
#include "octovox/grid.hpp"
#include "octovox/octree.hpp"

namespace octovox {

struct ConfusionCounts {
    std::vector<std::uint64_t> tp;
    std::vector<std::uint64_t> fp;
    std::vector<std::uint64_t> fn;

    std::size_t class_count() const { return tp.size(); }

    // Counts over disjoint cell sets add.
    void merge(const ConfusionCounts& other) {
        if (other.tp.size() != tp.size()) {
            throw dimension_error("cannot merge confusion counts over different class counts");
        }
        for (std::size_t c = 0; c < tp.size(); ++c) {
            tp[c] += other.tp[c];
            fp[c] += other.fp[c];
            fn[c] += other.fn[c];
        }
    }
};

inline ConfusionCounts confusion_counts(const DenseGrid<Label>& pred, const DenseGrid<Label>& gt,
                                        std::uint32_t class_count,
                                        const std::vector<Label>& ignore = {}) {
    if (pred.dims() != gt.dims()) {
        throw dimension_error("confusion_counts: pred dims " + pred.dims().to_string() +
                              ", gt dims " + gt.dims().to_string());
    }
    if (class_count == 0) {
        throw config_error("confusion_counts: class count must be positive");
    }
    std::vector<bool> ignored(class_count, false);
    for (Label l : ignore) {
        if (l < class_count) ignored[l] = true;
    }
    ConfusionCounts counts;
    counts.tp.assign(class_count, 0);
    counts.fp.assign(class_count, 0);
    counts.fn.assign(class_count, 0);
    const auto& pv = pred.values();
    const auto& gv = gt.values();
    for (std::size_t i = 0; i < pv.size(); ++i) {
        const Label p = pv[i];
        const Label g = gv[i];
        if (p >= class_count || g >= class_count) {
            throw config_error("confusion_counts: label " + std::to_string(p >= class_count ? p : g) +
                               " outside class count " + std::to_string(class_count));
        }
        if (ignored[g]) continue;
        if (p == g) {
            ++counts.tp[g];
        } else {
            ++counts.fp[p];
            ++counts.fn[g];
        }
    }
    return counts;
}

enum class MeanMode {
    present_only,  // classes with zero IoU denominator are left out of the mean
    all_classes,   // divide by the full class count regardless
};

struct IouReport {
    // One entry per class; absent when the class appears in neither grid.
    std::vector<std::optional<double>> per_class;
    double mean = 0.0;
};

inline IouReport miou_from_counts(const ConfusionCounts& counts,
                                  MeanMode mode = MeanMode::present_only) {
    IouReport report;
    report.per_class.resize(counts.class_count());
    double sum = 0.0;
    std::size_t present = 0;
    for (std::size_t c = 0; c < counts.class_count(); ++c) {
        const std::uint64_t denom = counts.tp[c] + counts.fp[c] + counts.fn[c];
        if (denom == 0) continue;
        const double iou = static_cast<double>(counts.tp[c]) / static_cast<double>(denom);
        report.per_class[c] = iou;
        sum += iou;
        ++present;
    }
    if (mode == MeanMode::all_classes) {
        report.mean = sum / static_cast<double>(counts.class_count());
    } else {
        report.mean = present > 0 ? sum / static_cast<double>(present) : 0.0;
    }
    return report;
}

// Per-class IoU = TP / (TP + FP + FN); cells whose ground-truth label is in
// `ignore` are left out of every count.
inline IouReport miou(const DenseGrid<Label>& pred, const DenseGrid<Label>& gt,
                      std::uint32_t class_count, const std::vector<Label>& ignore = {},
                      MeanMode mode = MeanMode::present_only) {
    return miou_from_counts(confusion_counts(pred, gt, class_count, ignore), mode);
}

struct BinaryIouReport {
    std::optional<double> iou_split;
    std::optional<double> iou_nosplit;
    // Mean over the engaged classes.
    double mean = 0.0;
};

// Mean IoU over the two decision classes at one split boundary; nonzero
// cells count as split.
inline BinaryIouReport split_quality_miou(const DenseGrid<std::uint8_t>& pred,
                                          const DenseGrid<std::uint8_t>& gt) {
    if (pred.dims() != gt.dims()) {
        throw dimension_error("split_quality_miou: pred dims " + pred.dims().to_string() +
                              ", gt dims " + gt.dims().to_string());
    }
    std::uint64_t tp1 = 0, fp1 = 0, fn1 = 0;  // split class
    std::uint64_t tp0 = 0, fp0 = 0, fn0 = 0;  // no-split class
    const auto& pv = pred.values();
    const auto& gv = gt.values();
    for (std::size_t i = 0; i < pv.size(); ++i) {
        const bool p = pv[i] != 0;
        const bool g = gv[i] != 0;
        if (p && g) ++tp1;
        if (p && !g) { ++fp1; ++fn0; }
        if (!p && g) { ++fn1; ++fp0; }
        if (!p && !g) ++tp0;
    }
    BinaryIouReport report;
    double sum = 0.0;
    std::size_t present = 0;
    if (tp1 + fp1 + fn1 > 0) {
        report.iou_split = static_cast<double>(tp1) / static_cast<double>(tp1 + fp1 + fn1);
        sum += *report.iou_split;
        ++present;
    }
    if (tp0 + fp0 + fn0 > 0) {
        report.iou_nosplit = static_cast<double>(tp0) / static_cast<double>(tp0 + fp0 + fn0);
        sum += *report.iou_nosplit;
        ++present;
    }
    report.mean = present > 0 ? sum / static_cast<double>(present) : 0.0;
    return report;
}

// One report per split boundary, coarse first.
inline std::vector<BinaryIouReport> split_quality_levels(const OctreeStructure& pred,
                                                         const OctreeStructure& gt) {
    if (pred.split.size() != gt.split.size()) {
        throw dimension_error("split_quality_levels: pred has " +
                              std::to_string(pred.split.size()) + " boundaries, gt has " +
                              std::to_string(gt.split.size()));
    }
    std::vector<BinaryIouReport> out;
    out.reserve(pred.split.size());
    for (std::size_t l = 0; l < pred.split.size(); ++l) {
        out.push_back(split_quality_miou(pred.split[l], gt.split[l]));
    }
    return out;
}

// Mean of -alpha * (1 - p_t)^gamma * log(p_t) with p_t the probability
// assigned to the true decision; probabilities clamped to [eps, 1 - eps].
inline double focal_loss_mask(const DenseGrid<float>& pred, const DenseGrid<std::uint8_t>& gt,
                              double alpha = 0.25, double gamma = 2.0) {
    if (pred.dims() != gt.dims()) {
        throw dimension_error("focal_loss_mask: pred dims " + pred.dims().to_string() +
                              ", gt dims " + gt.dims().to_string());
    }
    if (pred.cell_count() == 0) return 0.0;
    constexpr double eps = 1e-7;
    double sum = 0.0;
    const auto& pv = pred.values();
    const auto& gv = gt.values();
    for (std::size_t i = 0; i < pv.size(); ++i) {
        double p = static_cast<double>(pv[i]);
        p = std::min(std::max(p, eps), 1.0 - eps);
        const double pt = gv[i] ? p : 1.0 - p;
        sum += -alpha * std::pow(1.0 - pt, gamma) * std::log(pt);
    }
    return sum / static_cast<double>(pv.size());
}

struct CompressionStats {
    std::vector<std::uint64_t> leaves_per_level;
    std::uint64_t total_leaves = 0;
    std::uint64_t dense_cells = 0;
    double leaf_fraction = 0.0;
    // Fraction of realized nodes at each boundary that split.
    std::vector<double> split_fractions;
};

inline CompressionStats compression_stats(const OctreeStructure& structure,
                                          const OctreeConfig& config) {
    config.validate();
    if (structure.depth() != config.depth || structure.base_dims() != config.base_dims) {
        throw dimension_error("compression_stats: structure shape " +
                              structure.base_dims().to_string() + " x" +
                              std::to_string(structure.depth()) + " does not match config " +
                              config.base_dims.to_string() + " x" + std::to_string(config.depth));
    }
    const LeafCensus census = leaf_census(structure);  // throws on invalid structure
    CompressionStats stats;
    stats.leaves_per_level = census.per_level;
    stats.total_leaves = census.total;
    stats.dense_cells = config.finest_dims().cell_count();
    stats.leaf_fraction =
        static_cast<double>(census.total) / static_cast<double>(stats.dense_cells);
    stats.split_fractions.reserve(structure.split.size());
    // Realized node count at boundary l: every node at level 0, eight per
    // split parent afterwards; splits at level l = leaves at l+1 ... / 8.
    std::uint64_t active = structure.base_dims().cell_count();
    for (std::size_t l = 0; l < structure.split.size(); ++l) {
        const std::uint64_t leaves_here = census.per_level[l];
        const std::uint64_t splits = active - leaves_here;
        stats.split_fractions.push_back(active > 0 ? static_cast<double>(splits) /
                                                         static_cast<double>(active)
                                                   : 0.0);
        active = splits * 8;
    }
    return stats;
}

}  // namespace octovox
