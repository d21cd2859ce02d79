// SPDX-License-Identifier: Apache-2.0
//
// Octree structures over dense grid pyramids.
//
// Level convention used throughout: level 0 is the coarsest grid
// (base_dims), level L-1 the finest (base_dims * 2^(L-1)). Split and
// probability pyramids hold L-1 levels (0 .. L-2), one per split boundary;
// level L-1 nodes are always leaves and carry no split decision.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "octovox/errors.hpp"
#include "octovox/grid.hpp"

namespace octovox {

struct OctreeConfig {
    // Level count L. L-1 split boundaries exist between the levels.
    std::uint32_t depth = 3;
    // Dims of the coarsest level.
    GridDims base_dims{50, 50, 4};
    // Fraction of candidate nodes chosen to split at each boundary,
    // coarse to fine. Each in (0, 1].
    std::vector<double> selection_ratios{0.20, 0.60};

    GridDims level_dims(std::uint32_t level) const {
        const std::uint32_t s = 1u << level;
        return GridDims{base_dims.x * s, base_dims.y * s, base_dims.z * s};
    }

    GridDims finest_dims() const { return level_dims(depth - 1); }

    void validate() const {
        if (depth < 2) {
            throw config_error("octree depth must be at least 2, got " + std::to_string(depth));
        }
        if (depth > 16) {
            throw config_error("octree depth " + std::to_string(depth) + " unreasonably large");
        }
        if (base_dims.x == 0 || base_dims.y == 0 || base_dims.z == 0) {
            throw config_error("base dims must be at least 1 per axis, got " +
                               base_dims.to_string());
        }
        if (selection_ratios.size() != static_cast<std::size_t>(depth - 1)) {
            throw config_error("expected " + std::to_string(depth - 1) +
                               " selection ratios, got " +
                               std::to_string(selection_ratios.size()));
        }
        for (double r : selection_ratios) {
            if (!(r > 0.0 && r <= 1.0)) {
                throw config_error("selection ratio " + std::to_string(r) +
                                   " outside (0, 1]");
            }
        }
    }
};

// Base dims for a given finest resolution; every axis must be divisible
// by 2^(depth-1).
inline GridDims base_dims_for_finest(const GridDims& finest, std::uint32_t depth) {
    if (depth < 2 || depth > 16) {
        throw config_error("octree depth must be in [2, 16], got " + std::to_string(depth));
    }
    const std::uint32_t s = 1u << (depth - 1);
    if (finest.x % s != 0 || finest.y % s != 0 || finest.z % s != 0) {
        throw config_error("finest dims " + finest.to_string() + " not divisible by " +
                           std::to_string(s));
    }
    return GridDims{finest.x / s, finest.y / s, finest.z / s};
}

// Per-level split probabilities, values in [0, 1].
struct OctreeMask {
    std::vector<DenseGrid<float>> levels;

    std::uint32_t depth() const { return static_cast<std::uint32_t>(levels.size()) + 1; }
    const GridDims& base_dims() const { return levels.front().dims(); }
};

// Per-level binary split decisions: nonzero = the node is a parent.
struct OctreeStructure {
    std::vector<DenseGrid<std::uint8_t>> split;

    std::uint32_t depth() const { return static_cast<std::uint32_t>(split.size()) + 1; }
    const GridDims& base_dims() const { return split.front().dims(); }
    GridDims finest_dims() const {
        const std::uint32_t s = 1u << (depth() - 1);
        const GridDims& b = base_dims();
        return GridDims{b.x * s, b.y * s, b.z * s};
    }
};

// Per-level binary labels: nonzero = the node's finest footprint is not
// label-uniform. Satisfies downward consistency (0 implies all-descendant 0),
// which is parent-chain monotonicity of the nonzero values.
struct OctreeGT {
    std::vector<DenseGrid<std::uint8_t>> levels;

    std::uint32_t depth() const { return static_cast<std::uint32_t>(levels.size()) + 1; }
    const GridDims& base_dims() const { return levels.front().dims(); }
};

inline OctreeStructure to_structure(const OctreeGT& gt) {
    return OctreeStructure{gt.levels};
}

inline OctreeGT to_octree_gt(const OctreeStructure& s) {
    return OctreeGT{s.split};
}

template <typename T>
struct OctreeLeaf {
    std::uint32_t level = 0;
    CellCoord coord;
    T payload{};

    bool operator==(const OctreeLeaf&) const = default;
};

// Leaf list realizing the sparse field: leaf regions are pairwise disjoint
// and tile the finest volume.
template <typename T>
struct SparseOctreeField {
    std::uint32_t depth = 0;
    GridDims base_dims;
    std::vector<OctreeLeaf<T>> leaves;

    bool operator==(const SparseOctreeField&) const = default;
};

enum class Pooling { average, mode };

struct StructureViolation {
    enum class Kind {
        monotonicity,  // split node under an unsplit parent
        coverage,      // finest cell covered by != 1 leaf
    };
    Kind kind;
    std::uint32_t level = 0;
    CellCoord coord;
};

struct LeafCensus {
    std::vector<std::uint64_t> per_level;  // one entry per level, 0 .. L-1
    std::uint64_t total = 0;
};

namespace detail {

// Shape check shared by every pyramid consumer: at least one level, dims
// doubling level to level, no empty level.
template <typename GridT>
void check_pyramid_dims(const std::vector<GridT>& levels, const char* what) {
    if (levels.empty()) {
        throw dimension_error(std::string(what) + ": no levels");
    }
    GridDims expect = levels.front().dims();
    if (expect.cell_count() == 0) {
        throw dimension_error(std::string(what) + ": empty base level");
    }
    for (std::size_t l = 0; l < levels.size(); ++l) {
        if (levels[l].dims() != expect) {
            throw dimension_error(std::string(what) + ": level " + std::to_string(l) +
                                  " dims " + levels[l].dims().to_string() + ", expected " +
                                  expect.to_string());
        }
        expect = GridDims{expect.x * 2, expect.y * 2, expect.z * 2};
    }
}

inline CellCoord parent_coord(const CellCoord& c) {
    return CellCoord{c.x / 2, c.y / 2, c.z / 2};
}

// ceil(ratio * n), clamped to [0, n].
inline std::uint64_t top_k_count(double ratio, std::uint64_t n) {
    if (n == 0) return 0;
    const double k = std::ceil(ratio * static_cast<double>(n));
    if (k <= 0.0) return 0;
    if (k >= static_cast<double>(n)) return n;
    return static_cast<std::uint64_t>(k);
}

// Sorts candidate linear indices by descending value, ties to the smaller
// index, and keeps the first k.
inline void select_top_k(std::vector<std::uint64_t>& candidates,
                         const DenseGrid<float>& values, std::uint64_t k) {
    std::sort(candidates.begin(), candidates.end(),
              [&values](std::uint64_t i, std::uint64_t j) {
                  const float vi = values[i];
                  const float vj = values[j];
                  if (vi != vj) return vi > vj;
                  return i < j;
              });
    candidates.resize(k);
}

// Active = the node exists in the realized tree (ancestors all split).
// Returns one activity grid per split level; level 0 is all-active.
// Throws on the first split decision found outside the active set.
inline std::vector<DenseGrid<std::uint8_t>> active_grids(const OctreeStructure& s) {
    check_pyramid_dims(s.split, "structure");
    std::vector<DenseGrid<std::uint8_t>> active;
    active.reserve(s.split.size());
    active.emplace_back(s.split[0].dims(), std::uint8_t{1});
    for (std::size_t l = 1; l < s.split.size(); ++l) {
        const GridDims d = s.split[l].dims();
        DenseGrid<std::uint8_t> act(d, std::uint8_t{0});
        const GridDims dp = s.split[l - 1].dims();
        for (std::uint32_t a = 0; a < dp.x; ++a)
            for (std::uint32_t b = 0; b < dp.y; ++b)
                for (std::uint32_t c = 0; c < dp.z; ++c) {
                    const std::uint64_t pi = linear_index(dp, a, b, c);
                    if (active[l - 1][pi] && s.split[l - 1][pi]) {
                        for (std::uint32_t da = 0; da < 2; ++da)
                            for (std::uint32_t db = 0; db < 2; ++db)
                                for (std::uint32_t dc = 0; dc < 2; ++dc)
                                    act.at(2 * a + da, 2 * b + db, 2 * c + dc) = 1;
                    }
                }
        active.push_back(std::move(act));
    }
    for (std::size_t l = 1; l < s.split.size(); ++l) {
        const auto& sp = s.split[l].values();
        const auto& act = active[l].values();
        for (std::size_t i = 0; i < sp.size(); ++i) {
            if (sp[i] && !act[i]) {
                const CellCoord c = coord_of(s.split[l].dims(), i);
                throw structure_error("split at level " + std::to_string(l) + " cell (" +
                                      std::to_string(c.x) + "," + std::to_string(c.y) + "," +
                                      std::to_string(c.z) + ") under an unsplit parent");
            }
        }
    }
    return active;
}

}  // namespace detail

// Binary split ground truth: a node needs a split exactly when its finest
// footprint holds more than one distinct label. Built bottom-up, so the
// result is downward consistent by construction.
inline OctreeGT generate_octree_gt(const DenseGrid<Label>& gt, const OctreeConfig& config) {
    config.validate();
    if (gt.dims() != config.finest_dims()) {
        throw dimension_error("generate_octree_gt: grid dims " + gt.dims().to_string() +
                              ", config finest dims " + config.finest_dims().to_string());
    }
    const std::uint32_t levels = config.depth - 1;
    OctreeGT out;
    out.levels.resize(levels);

    DenseGrid<std::uint8_t> child_uniform;
    DenseGrid<Label> child_label;
    for (std::uint32_t l = levels; l-- > 0;) {
        const GridDims d = config.level_dims(l);
        DenseGrid<std::uint8_t> uniform(d);
        DenseGrid<Label> label(d);
        for (std::uint32_t a = 0; a < d.x; ++a) {
            for (std::uint32_t b = 0; b < d.y; ++b) {
                for (std::uint32_t c = 0; c < d.z; ++c) {
                    bool uni = true;
                    Label first = 0;
                    bool have_first = false;
                    for (std::uint32_t da = 0; da < 2 && uni; ++da)
                        for (std::uint32_t db = 0; db < 2 && uni; ++db)
                            for (std::uint32_t dc = 0; dc < 2 && uni; ++dc) {
                                const std::uint32_t ca = 2 * a + da;
                                const std::uint32_t cb = 2 * b + db;
                                const std::uint32_t cc = 2 * c + dc;
                                Label v;
                                if (l == levels - 1) {
                                    v = gt.at(ca, cb, cc);
                                } else {
                                    if (!child_uniform.at(ca, cb, cc)) {
                                        uni = false;
                                        break;
                                    }
                                    v = child_label.at(ca, cb, cc);
                                }
                                if (!have_first) {
                                    first = v;
                                    have_first = true;
                                } else if (v != first) {
                                    uni = false;
                                }
                            }
                    uniform.at(a, b, c) = uni ? 1 : 0;
                    label.at(a, b, c) = first;
                }
            }
        }
        out.levels[l] = DenseGrid<std::uint8_t>(d);
        auto& vals = out.levels[l].values();
        const auto& u = uniform.values();
        for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = u[i] ? 0 : 1;
        child_uniform = std::move(uniform);
        child_label = std::move(label);
    }
    return out;
}

// Binarize a probability pyramid into split decisions.
//
// At level 0 every node is a candidate; at deeper levels only children of
// parents selected at the previous level are. ceil(ratio * candidate_count)
// candidates with the highest probabilities split, ties to the smaller
// linear index. Parent-chain monotonicity holds by construction.
inline OctreeStructure derive_structure(const OctreeMask& mask, const OctreeConfig& config) {
    config.validate();
    detail::check_pyramid_dims(mask.levels, "mask");
    if (mask.levels.size() != static_cast<std::size_t>(config.depth - 1) ||
        mask.base_dims() != config.base_dims) {
        throw dimension_error("derive_structure: mask shape " + mask.base_dims().to_string() +
                              " x" + std::to_string(mask.levels.size() + 1) +
                              " does not match config " + config.base_dims.to_string() + " x" +
                              std::to_string(config.depth));
    }
    for (std::size_t l = 0; l < mask.levels.size(); ++l) {
        for (float v : mask.levels[l].values()) {
            if (!(v >= 0.0f && v <= 1.0f)) {
                throw config_error("mask level " + std::to_string(l) +
                                   " holds a probability outside [0, 1]");
            }
        }
    }

    OctreeStructure out;
    out.split.reserve(mask.levels.size());
    std::vector<std::uint64_t> candidates;
    std::vector<std::uint64_t> parents;
    for (std::size_t l = 0; l < mask.levels.size(); ++l) {
        const DenseGrid<float>& level = mask.levels[l];
        const GridDims d = level.dims();
        candidates.clear();
        if (l == 0) {
            candidates.resize(d.cell_count());
            for (std::uint64_t i = 0; i < candidates.size(); ++i) candidates[i] = i;
        } else {
            const GridDims dp = mask.levels[l - 1].dims();
            candidates.reserve(parents.size() * 8);
            for (std::uint64_t pi : parents) {
                const CellCoord p = coord_of(dp, pi);
                for (std::uint32_t da = 0; da < 2; ++da)
                    for (std::uint32_t db = 0; db < 2; ++db)
                        for (std::uint32_t dc = 0; dc < 2; ++dc)
                            candidates.push_back(
                                linear_index(d, 2 * p.x + da, 2 * p.y + db, 2 * p.z + dc));
            }
        }
        const std::uint64_t k = detail::top_k_count(config.selection_ratios[l], candidates.size());
        detail::select_top_k(candidates, level, k);

        DenseGrid<std::uint8_t> split(d);
        for (std::uint64_t i : candidates) split[i] = 1;
        parents = candidates;
        out.split.push_back(std::move(split));
    }
    return out;
}

// The 8^(t - l) descendant coordinates of a level-l node at target level t,
// offsets in lexicographic order.
inline std::vector<CellCoord> children_indices(std::uint32_t level, const CellCoord& coord,
                                               std::uint32_t target_level) {
    if (target_level <= level) {
        throw config_error("children_indices: target level " + std::to_string(target_level) +
                           " not below level " + std::to_string(level));
    }
    const std::uint32_t gap = target_level - level;
    if (gap > 10) {
        throw config_error("children_indices: level gap " + std::to_string(gap) +
                           " too large to enumerate");
    }
    const std::uint32_t scale = 1u << gap;
    std::vector<CellCoord> out;
    out.reserve(static_cast<std::size_t>(scale) * scale * scale);
    for (std::uint32_t da = 0; da < scale; ++da)
        for (std::uint32_t db = 0; db < scale; ++db)
            for (std::uint32_t dc = 0; dc < scale; ++dc)
                out.push_back(CellCoord{coord.x * scale + da, coord.y * scale + db,
                                        coord.z * scale + dc});
    return out;
}

// Structure invariant scan as data: monotonicity defects (split under an
// unsplit parent) plus finest-cell coverage defects, judging leaves by the
// local parent decision so the two rules are checked independently.
inline std::vector<StructureViolation> validate_structure(const OctreeStructure& s) {
    detail::check_pyramid_dims(s.split, "structure");
    std::vector<StructureViolation> out;
    const std::size_t boundaries = s.split.size();
    for (std::size_t l = 1; l < boundaries; ++l) {
        const GridDims d = s.split[l].dims();
        for (std::uint32_t a = 0; a < d.x; ++a)
            for (std::uint32_t b = 0; b < d.y; ++b)
                for (std::uint32_t c = 0; c < d.z; ++c) {
                    if (s.split[l].at(a, b, c) &&
                        !s.split[l - 1].at(a / 2, b / 2, c / 2)) {
                        out.push_back(StructureViolation{
                            StructureViolation::Kind::monotonicity,
                            static_cast<std::uint32_t>(l), CellCoord{a, b, c}});
                    }
                }
    }

    const std::uint32_t depth = s.depth();
    const GridDims fd = s.finest_dims();
    DenseGrid<std::uint8_t> cover(fd, std::uint8_t{0});
    for (std::uint32_t l = 0; l < depth; ++l) {
        const std::uint32_t scale = 1u << (depth - 1 - l);
        const GridDims d = (l < depth - 1) ? s.split[l].dims() : fd;
        for (std::uint32_t a = 0; a < d.x; ++a)
            for (std::uint32_t b = 0; b < d.y; ++b)
                for (std::uint32_t c = 0; c < d.z; ++c) {
                    bool is_leaf;
                    if (l == 0) {
                        is_leaf = !s.split[0].at(a, b, c);
                    } else if (l < depth - 1) {
                        is_leaf = !s.split[l].at(a, b, c) &&
                                  s.split[l - 1].at(a / 2, b / 2, c / 2);
                    } else {
                        is_leaf = s.split[l - 1].at(a / 2, b / 2, c / 2) != 0;
                    }
                    if (!is_leaf) continue;
                    for (std::uint32_t da = 0; da < scale; ++da)
                        for (std::uint32_t db = 0; db < scale; ++db)
                            for (std::uint32_t dc = 0; dc < scale; ++dc)
                                ++cover.at(a * scale + da, b * scale + db, c * scale + dc);
                }
    }
    for (std::uint32_t a = 0; a < fd.x; ++a)
        for (std::uint32_t b = 0; b < fd.y; ++b)
            for (std::uint32_t c = 0; c < fd.z; ++c)
                if (cover.at(a, b, c) != 1) {
                    out.push_back(StructureViolation{StructureViolation::Kind::coverage,
                                                     depth - 1, CellCoord{a, b, c}});
                }
    return out;
}

// Per-level leaf counts. Level l leaves weigh 8^(L-1-l) finest cells, so the
// weighted total always equals the finest cell count.
inline LeafCensus leaf_census(const OctreeStructure& s) {
    const auto active = detail::active_grids(s);  // throws structure_error when invalid
    const std::uint32_t depth = s.depth();
    LeafCensus census;
    census.per_level.assign(depth, 0);
    std::uint64_t parents_last = 0;
    for (std::size_t l = 0; l < s.split.size(); ++l) {
        std::uint64_t act = 0;
        std::uint64_t par = 0;
        const auto& sp = s.split[l].values();
        const auto& ac = active[l].values();
        for (std::size_t i = 0; i < sp.size(); ++i) {
            if (ac[i]) {
                ++act;
                if (sp[i]) ++par;
            }
        }
        census.per_level[l] = act - par;
        parents_last = par;
    }
    census.per_level[depth - 1] = parents_last * 8;
    for (std::uint64_t n : census.per_level) census.total += n;
    return census;
}

namespace detail {

template <typename T>
T pool_footprint_average(const DenseGrid<T>& field, const CellCoord& coord,
                         std::uint32_t scale) {
    double sum = 0.0;
    for (std::uint32_t da = 0; da < scale; ++da)
        for (std::uint32_t db = 0; db < scale; ++db)
            for (std::uint32_t dc = 0; dc < scale; ++dc)
                sum += field.at(coord.x * scale + da, coord.y * scale + db,
                                coord.z * scale + dc);
    return static_cast<T>(sum / (static_cast<double>(scale) * scale * scale));
}

template <typename T>
T pool_footprint_mode(const DenseGrid<T>& field, const CellCoord& coord,
                      std::uint32_t scale) {
    std::vector<std::pair<T, std::uint32_t>> counts;
    for (std::uint32_t da = 0; da < scale; ++da)
        for (std::uint32_t db = 0; db < scale; ++db)
            for (std::uint32_t dc = 0; dc < scale; ++dc) {
                const T v = field.at(coord.x * scale + da, coord.y * scale + db,
                                     coord.z * scale + dc);
                bool found = false;
                for (auto& [val, n] : counts) {
                    if (val == v) {
                        ++n;
                        found = true;
                        break;
                    }
                }
                if (!found) counts.emplace_back(v, 1);
            }
    T best = counts.front().first;
    std::uint32_t best_count = 0;
    for (const auto& [val, n] : counts) {
        if (n > best_count || (n == best_count && val < best)) {
            best = val;
            best_count = n;
        }
    }
    return best;
}

}  // namespace detail

// Retain every leaf of the structure, pooling the field over each leaf's
// footprint. Leaves are emitted coarse level first, then by linear index.
template <typename T>
SparseOctreeField<T> dense_to_octree(const DenseGrid<T>& field, const OctreeStructure& structure,
                                     Pooling pooling) {
    if (pooling == Pooling::average && std::is_integral_v<T>) {
        throw config_error("average pooling requires a scalar field");
    }
    const auto active = detail::active_grids(structure);
    const std::uint32_t depth = structure.depth();
    if (field.dims() != structure.finest_dims()) {
        throw dimension_error("dense_to_octree: field dims " + field.dims().to_string() +
                              ", structure finest dims " +
                              structure.finest_dims().to_string());
    }

    SparseOctreeField<T> out;
    out.depth = depth;
    out.base_dims = structure.base_dims();
    for (std::uint32_t l = 0; l < depth; ++l) {
        const std::uint32_t scale = 1u << (depth - 1 - l);
        const GridDims d = (l < depth - 1) ? structure.split[l].dims() : field.dims();
        const std::uint64_t n = d.cell_count();
        for (std::uint64_t i = 0; i < n; ++i) {
            bool is_leaf;
            if (l < depth - 1) {
                is_leaf = active[l][i] && !structure.split[l][i];
            } else {
                const CellCoord c = coord_of(d, i);
                const std::uint64_t pi =
                    linear_index(structure.split[depth - 2].dims(), c.x / 2, c.y / 2, c.z / 2);
                is_leaf = structure.split[depth - 2][pi] != 0;
            }
            if (!is_leaf) continue;
            const CellCoord c = coord_of(d, i);
            T payload;
            if (scale == 1) {
                payload = field.at(c);
            } else if (pooling == Pooling::average) {
                payload = detail::pool_footprint_average(field, c, scale);
            } else {
                payload = detail::pool_footprint_mode(field, c, scale);
            }
            out.leaves.push_back(OctreeLeaf<T>{l, c, payload});
        }
    }
    return out;
}

// Broadcast each leaf payload over its finest footprint. The sparse field
// must carry exactly the structure's leaf set.
template <typename T>
DenseGrid<T> octree_to_dense(const SparseOctreeField<T>& sparse,
                             const OctreeStructure& structure) {
    const auto active = detail::active_grids(structure);
    const std::uint32_t depth = structure.depth();
    if (sparse.depth != depth || sparse.base_dims != structure.base_dims()) {
        throw structure_error("octree_to_dense: sparse field shape " +
                              sparse.base_dims.to_string() + " x" + std::to_string(sparse.depth) +
                              " does not match structure " + structure.base_dims().to_string() +
                              " x" + std::to_string(depth));
    }
    const GridDims fd = structure.finest_dims();

    // The leaf sets must agree as sets of (level, cell).
    std::vector<std::pair<std::uint32_t, std::uint64_t>> expect;
    for (std::uint32_t l = 0; l < depth; ++l) {
        const GridDims d = (l < depth - 1) ? structure.split[l].dims() : fd;
        const std::uint64_t n = d.cell_count();
        for (std::uint64_t i = 0; i < n; ++i) {
            bool is_leaf;
            if (l < depth - 1) {
                is_leaf = active[l][i] && !structure.split[l][i];
            } else {
                const CellCoord c = coord_of(d, i);
                const std::uint64_t pi =
                    linear_index(structure.split[depth - 2].dims(), c.x / 2, c.y / 2, c.z / 2);
                is_leaf = structure.split[depth - 2][pi] != 0;
            }
            if (is_leaf) expect.emplace_back(l, i);
        }
    }
    std::vector<std::pair<std::uint32_t, std::uint64_t>> got;
    got.reserve(sparse.leaves.size());
    for (const auto& leaf : sparse.leaves) {
        if (leaf.level >= depth) {
            throw structure_error("octree_to_dense: leaf level " + std::to_string(leaf.level) +
                                  " outside depth " + std::to_string(depth));
        }
        const GridDims d = (leaf.level < depth - 1) ? structure.split[leaf.level].dims() : fd;
        if (leaf.coord.x >= d.x || leaf.coord.y >= d.y || leaf.coord.z >= d.z) {
            throw structure_error("octree_to_dense: leaf cell outside level " +
                                  std::to_string(leaf.level) + " dims " + d.to_string());
        }
        got.emplace_back(leaf.level, linear_index(d, leaf.coord));
    }
    std::sort(expect.begin(), expect.end());
    std::sort(got.begin(), got.end());
    if (expect != got) {
        throw structure_error("octree_to_dense: sparse leaf set inconsistent with structure (" +
                              std::to_string(got.size()) + " leaves, structure has " +
                              std::to_string(expect.size()) + ")");
    }

    DenseGrid<T> out(fd);
    for (const auto& leaf : sparse.leaves) {
        const std::uint32_t scale = 1u << (depth - 1 - leaf.level);
        for (std::uint32_t da = 0; da < scale; ++da)
            for (std::uint32_t db = 0; db < scale; ++db)
                for (std::uint32_t dc = 0; dc < scale; ++dc)
                    out.at(leaf.coord.x * scale + da, leaf.coord.y * scale + db,
                           leaf.coord.z * scale + dc) = leaf.payload;
    }
    return out;
}

}  // namespace octovox
