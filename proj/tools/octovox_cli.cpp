// SPDX-License-Identifier: Apache-2.0
//
// Command-line pipeline over the octovox library. Stages communicate only
// through the documented file formats, so any stage can be rerun or swapped
// in isolation.
//
// Exit codes: 0 success, 1 usage, 2 file parse/format fault, 3 invariant or
// configuration violation.

#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "octovox/octovox.hpp"

namespace {

using json = nlohmann::json;
using namespace octovox;

GridDims dims_from(const std::vector<std::uint32_t>& v) {
    return GridDims{v[0], v[1], v[2]};
}

Vec3f vec3f_from(const std::vector<double>& v) {
    return Vec3f{static_cast<float>(v[0]), static_cast<float>(v[1]), static_cast<float>(v[2])};
}

// Per-level flag lists may give one value to broadcast across all levels.
std::vector<double> per_level(std::vector<double> values, std::size_t levels,
                              const char* flag) {
    if (values.size() == 1) {
        return std::vector<double>(levels, values[0]);
    }
    if (values.size() != levels) {
        throw config_error(std::string(flag) + " needs 1 or " + std::to_string(levels) +
                           " values, got " + std::to_string(values.size()));
    }
    return values;
}

OctreeConfig config_for(std::uint32_t depth, const GridDims& base,
                        const std::vector<double>& ratios_flag) {
    OctreeConfig config;
    config.depth = depth;
    config.base_dims = base;
    if (!ratios_flag.empty()) {
        config.selection_ratios = per_level(ratios_flag, depth - 1, "--ratios");
    } else if (depth == 3) {
        config.selection_ratios = {0.20, 0.60};
    } else {
        throw config_error("--ratios is required when --depth is not 3");
    }
    config.validate();
    return config;
}

// Selection ratios that never influence the result (ground-truth derivation,
// stats) still need a syntactically complete config.
OctreeConfig neutral_config(std::uint32_t depth, const GridDims& base) {
    OctreeConfig config;
    config.depth = depth;
    config.base_dims = base;
    config.selection_ratios.assign(depth - 1, 0.5);
    config.validate();
    return config;
}

GridGeometry geometry_of_variant(const GridVariant& grid) {
    return std::visit([](const auto& g) { return g.geometry(); }, grid);
}

GridGeometry resolve_geometry(const GridDims& dims, const std::string& like_path,
                              const std::vector<double>& voxel_size,
                              const std::vector<double>& origin) {
    GridGeometry geom;
    geom.dims = dims;
    if (!like_path.empty()) {
        const GridGeometry ref = geometry_of_variant(read_grid_any(like_path));
        if (ref.dims != dims) {
            throw dimension_error("--like grid dims " + ref.dims.to_string() +
                                  " do not match the decoded dims " + dims.to_string());
        }
        geom.voxel_size = ref.voxel_size;
        geom.origin = ref.origin;
    }
    if (!voxel_size.empty()) geom.voxel_size = vec3f_from(voxel_size);
    if (!origin.empty()) geom.origin = vec3f_from(origin);
    return geom;
}

void write_report(const std::string& path, const json& report) {
    const std::string text = report.dump(2) + "\n";
    octovox::detail::save_bytes_atomic(path, text.data(), text.size());
}

std::string percent(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g%%", fraction * 100.0);
    return buf;
}

std::string real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// ---- synth -----------------------------------------------------------------

struct SynthArgs {
    std::string out;
    std::string spec_in;
    std::string spec_out;
    std::string cameras_out;
    std::string segmaps_out;
    std::string class_table_path;
    std::uint64_t seed = 0;
    std::vector<std::uint32_t> dims{200, 200, 16};
    std::vector<double> voxel_size;
    std::vector<double> origin;
    std::uint32_t boxes = 12;
    std::uint32_t ground = 2;
    std::uint32_t classes = 8;
    std::uint32_t num_cameras = 6;
    std::vector<std::uint32_t> image_size{160, 120};
};

void run_synth(const SynthArgs& a) {
    SceneSpec spec;
    if (!a.spec_in.empty()) {
        spec = read_scene_spec(a.spec_in);
    } else {
        spec = random_scene_spec(a.seed, dims_from(a.dims), a.classes, a.boxes, a.ground);
        if (!a.voxel_size.empty()) spec.voxel_size = vec3f_from(a.voxel_size);
        if (!a.origin.empty()) spec.origin = vec3f_from(a.origin);
    }
    const DenseGrid<Label> scene = make_scene(spec);
    write_grid(a.out, scene);
    std::printf("scene: %s cells, %zu boxes -> %s\n", scene.dims().to_string().c_str(),
                spec.boxes.size(), a.out.c_str());
    if (!a.spec_out.empty()) {
        write_scene_spec(a.spec_out, spec);
        std::printf("scene spec -> %s\n", a.spec_out.c_str());
    }

    std::vector<CameraModel> cameras;
    if (!a.cameras_out.empty() || !a.segmaps_out.empty()) {
        cameras = camera_ring(a.num_cameras, scene.geometry(), a.image_size[0], a.image_size[1]);
    }
    if (!a.cameras_out.empty()) {
        write_cameras(a.cameras_out, cameras);
        std::printf("%zu cameras -> %s\n", cameras.size(), a.cameras_out.c_str());
    }
    if (!a.segmaps_out.empty()) {
        const ClassTable table = a.class_table_path.empty()
                                     ? default_class_table(spec.class_count)
                                     : read_class_table(a.class_table_path);
        const std::string ref = a.class_table_path.empty() ? "builtin" : a.class_table_path;
        for (std::size_t i = 0; i < cameras.size(); ++i) {
            const SegMap seg = render_segmap(scene, cameras[i], table);
            const std::string path = a.segmaps_out + std::to_string(i) + ".oseg";
            write_segmap(path, seg, ref);
            std::printf("segmap -> %s\n", path.c_str());
        }
    }
}

// ---- gt-octree -------------------------------------------------------------

struct GtArgs {
    std::string in;
    std::string out;
    std::uint32_t depth = 3;
    std::vector<std::uint32_t> base_dims;
};

void run_gt_octree(const GtArgs& a) {
    const DenseGrid<Label> grid = read_label_grid(a.in);
    const GridDims base = a.base_dims.empty() ? base_dims_for_finest(grid.dims(), a.depth)
                                              : dims_from(a.base_dims);
    const OctreeConfig config = neutral_config(a.depth, base);
    const OctreeGT gt = generate_octree_gt(grid, config);
    write_structure(a.out, to_structure(gt));
    const LeafCensus census = leaf_census(to_structure(gt));
    std::printf("octree gt: depth %u base %s, %llu leaves -> %s\n", a.depth,
                base.to_string().c_str(), static_cast<unsigned long long>(census.total),
                a.out.c_str());
}

// ---- init ------------------------------------------------------------------

struct InitArgs {
    std::string grid;
    std::string cameras;
    std::vector<std::string> segmaps;
    std::string out;
    std::string weights_out;
    std::uint32_t depth = 3;
    std::vector<std::uint32_t> base_dims;
    std::vector<double> weights{1.0, 0.5, 0.1};
    std::string accum = "sum";
};

void run_init(const InitArgs& a) {
    const GridGeometry geom = geometry_of_variant(read_grid_any(a.grid));
    const std::vector<CameraModel> cameras = read_cameras(a.cameras);
    std::vector<SegMap> segmaps;
    segmaps.reserve(a.segmaps.size());
    for (const std::string& path : a.segmaps) {
        segmaps.push_back(read_segmap(path).map);
    }
    InitWeights weights;
    weights.foreground_w = a.weights[0];
    weights.background_w = a.weights[1];
    weights.ground_w = a.weights[2];
    const WeightAccum accum = a.accum == "max" ? WeightAccum::max : WeightAccum::sum;

    const DenseGrid<float> field = accumulate_weights(geom, cameras, segmaps, weights, accum);
    if (!a.weights_out.empty()) {
        write_grid(a.weights_out, field);
        std::printf("weight field -> %s\n", a.weights_out.c_str());
    }
    const GridDims base = a.base_dims.empty() ? base_dims_for_finest(geom.dims, a.depth)
                                              : dims_from(a.base_dims);
    const OctreeMask mask = build_initial_mask(field, neutral_config(a.depth, base));
    write_mask(a.out, mask);
    std::printf("initial mask: depth %u base %s -> %s\n", a.depth, base.to_string().c_str(),
                a.out.c_str());
}

// ---- rectify ---------------------------------------------------------------

struct RectifyArgs {
    std::string mask;
    std::string out_mask;
    std::string out_structure;
    std::string provider;
    std::string gt;
    std::string json_report;
    std::uint32_t iters = 3;
    std::uint64_t seed = 0;
    std::vector<double> keep;
    std::vector<double> blend;
    std::vector<double> ratios;
};

void run_rectify(const RectifyArgs& a) {
    const OctreeMask mask = read_mask(a.mask);
    const std::uint32_t depth = mask.depth();
    const OctreeConfig config = config_for(depth, mask.base_dims(), a.ratios);

    RectifyConfig rcfg;
    rcfg.iterations = a.iters;
    if (!a.keep.empty()) {
        rcfg.keep_ratios = per_level(a.keep, depth - 1, "--keep");
    } else if (depth != 3) {
        throw config_error("--keep is required when the mask depth is not 3");
    }
    if (!a.blend.empty()) {
        rcfg.blend_new = per_level(a.blend, depth - 1, "--blend");
    } else if (depth != 3) {
        throw config_error("--blend is required when the mask depth is not 3");
    }

    std::unique_ptr<SplitProbabilityProvider> provider = make_provider(a.provider, a.seed);
    const RectifyResult result = rectify_iterate(mask, config, rcfg, *provider);
    if (!a.out_mask.empty()) {
        write_mask(a.out_mask, result.final_mask);
        std::printf("rectified mask -> %s\n", a.out_mask.c_str());
    }
    if (!a.out_structure.empty()) {
        write_structure(a.out_structure, result.final_structure);
        std::printf("structure -> %s\n", a.out_structure.c_str());
    }

    json report;
    report["command"] = "rectify";
    report["iterations"] = json::array();
    if (!a.gt.empty()) {
        const OctreeStructure gt = read_structure(a.gt);
        for (std::size_t it = 0; it < result.per_iteration.size(); ++it) {
            const auto levels = split_quality_levels(result.per_iteration[it], gt);
            double sum = 0.0;
            json jlevels = json::array();
            std::string text;
            for (std::size_t l = 0; l < levels.size(); ++l) {
                sum += levels[l].mean;
                jlevels.push_back({{"boundary", l}, {"miou", levels[l].mean}});
                if (!text.empty()) text += ", ";
                text += "boundary " + std::to_string(l) + " miou " + real(levels[l].mean);
            }
            const double mean = levels.empty() ? 0.0 : sum / static_cast<double>(levels.size());
            report["iterations"].push_back(
                {{"iteration", it + 1}, {"levels", jlevels}, {"mean_miou", mean}});
            std::printf("iteration %zu: %s, mean %s\n", it + 1, text.c_str(),
                        real(mean).c_str());
        }
    }
    if (!a.json_report.empty()) {
        write_report(a.json_report, report);
    }
}

// ---- encode / decode -------------------------------------------------------

struct EncodeArgs {
    std::string grid;
    std::string structure;
    std::string out;
    std::string pooling = "mode";
};

void run_encode(const EncodeArgs& a) {
    const OctreeStructure structure = read_structure(a.structure);
    const Pooling pooling = a.pooling == "average" ? Pooling::average : Pooling::mode;
    GridVariant grid = read_grid_any(a.grid);
    std::size_t leaves = 0;
    if (auto* labels = std::get_if<DenseGrid<Label>>(&grid)) {
        const auto sparse = dense_to_octree(*labels, structure, pooling);
        leaves = sparse.leaves.size();
        write_sparse(a.out, sparse);
    } else if (auto* scalars = std::get_if<DenseGrid<float>>(&grid)) {
        const auto sparse = dense_to_octree(*scalars, structure, pooling);
        leaves = sparse.leaves.size();
        write_sparse(a.out, sparse);
    } else {
        throw config_error("encode expects a label or scalar grid");
    }
    std::printf("encoded %zu leaves -> %s\n", leaves, a.out.c_str());
}

struct DecodeArgs {
    std::string sparse;
    std::string structure;
    std::string out;
    std::string like;
    std::vector<double> voxel_size;
    std::vector<double> origin;
};

void run_decode(const DecodeArgs& a) {
    const OctreeStructure structure = read_structure(a.structure);
    const OctreeFileKind kind = peek_octree_kind(a.sparse);
    if (kind == OctreeFileKind::sparse_label) {
        DenseGrid<Label> grid = octree_to_dense(read_sparse_label(a.sparse), structure);
        const GridGeometry geom =
            resolve_geometry(grid.dims(), a.like, a.voxel_size, a.origin);
        grid.set_voxel_size(geom.voxel_size);
        grid.set_origin(geom.origin);
        write_grid(a.out, grid);
    } else if (kind == OctreeFileKind::sparse_scalar) {
        DenseGrid<float> grid = octree_to_dense(read_sparse_scalar(a.sparse), structure);
        const GridGeometry geom =
            resolve_geometry(grid.dims(), a.like, a.voxel_size, a.origin);
        grid.set_voxel_size(geom.voxel_size);
        grid.set_origin(geom.origin);
        write_grid(a.out, grid);
    } else {
        throw config_error(a.sparse + " is not a sparse field file");
    }
    std::printf("decoded -> %s\n", a.out.c_str());
}

// ---- eval ------------------------------------------------------------------

struct EvalArgs {
    std::string pred;
    std::string gt;
    std::string pred_structure;
    std::string gt_structure;
    std::string pred_mask;
    std::string json_report;
    std::uint32_t classes = 8;
    std::vector<std::uint32_t> ignore;
    bool all_classes = false;
    double alpha = 0.25;
    double gamma = 2.0;
};

void run_eval(const EvalArgs& a) {
    json report;
    report["command"] = "eval";
    if (!a.pred.empty()) {
        if (a.gt.empty()) throw config_error("--pred needs --gt");
        const DenseGrid<Label> pred = read_label_grid(a.pred);
        const DenseGrid<Label> gt = read_label_grid(a.gt);
        std::vector<Label> ignore;
        for (std::uint32_t v : a.ignore) ignore.push_back(static_cast<Label>(v));
        const IouReport r =
            miou(pred, gt, a.classes, ignore,
                 a.all_classes ? MeanMode::all_classes : MeanMode::present_only);
        json per_class = json::array();
        for (std::size_t c = 0; c < r.per_class.size(); ++c) {
            if (r.per_class[c]) {
                std::printf("class %zu: iou %s\n", c, real(*r.per_class[c]).c_str());
                per_class.push_back(*r.per_class[c]);
            } else {
                std::printf("class %zu: absent\n", c);
                per_class.push_back(nullptr);
            }
        }
        std::printf("mean iou: %s\n", real(r.mean).c_str());
        report["mode"] = "labels";
        report["per_class"] = per_class;
        report["mean_iou"] = r.mean;
    } else if (!a.pred_structure.empty()) {
        if (a.gt_structure.empty()) throw config_error("--pred-structure needs --gt-structure");
        const OctreeStructure pred = read_structure(a.pred_structure);
        const OctreeStructure gt = read_structure(a.gt_structure);
        const auto levels = split_quality_levels(pred, gt);
        double sum = 0.0;
        json jlevels = json::array();
        for (std::size_t l = 0; l < levels.size(); ++l) {
            std::printf("boundary %zu: split iou %s, no-split iou %s, miou %s\n", l,
                        levels[l].iou_split ? real(*levels[l].iou_split).c_str() : "absent",
                        levels[l].iou_nosplit ? real(*levels[l].iou_nosplit).c_str() : "absent",
                        real(levels[l].mean).c_str());
            sum += levels[l].mean;
            jlevels.push_back({{"boundary", l}, {"miou", levels[l].mean}});
        }
        const double mean = levels.empty() ? 0.0 : sum / static_cast<double>(levels.size());
        std::printf("mean split miou: %s\n", real(mean).c_str());
        report["mode"] = "split";
        report["levels"] = jlevels;
        report["mean_miou"] = mean;
    } else if (!a.pred_mask.empty()) {
        if (a.gt_structure.empty()) throw config_error("--pred-mask needs --gt-structure");
        const OctreeMask mask = read_mask(a.pred_mask);
        const OctreeStructure gt = read_structure(a.gt_structure);
        if (mask.levels.size() != gt.split.size()) {
            throw dimension_error("mask has " + std::to_string(mask.levels.size()) +
                                  " boundaries, gt structure has " +
                                  std::to_string(gt.split.size()));
        }
        double sum = 0.0;
        json jlevels = json::array();
        for (std::size_t l = 0; l < mask.levels.size(); ++l) {
            const double loss = focal_loss_mask(mask.levels[l], gt.split[l], a.alpha, a.gamma);
            std::printf("boundary %zu: focal loss %s\n", l, real(loss).c_str());
            sum += loss;
            jlevels.push_back({{"boundary", l}, {"focal_loss", loss}});
        }
        const double mean =
            mask.levels.empty() ? 0.0 : sum / static_cast<double>(mask.levels.size());
        std::printf("mean focal loss: %s\n", real(mean).c_str());
        report["mode"] = "mask-loss";
        report["levels"] = jlevels;
        report["mean_focal_loss"] = mean;
    } else {
        throw config_error("eval needs --pred, --pred-structure, or --pred-mask");
    }
    if (!a.json_report.empty()) {
        write_report(a.json_report, report);
    }
}

// ---- stats -----------------------------------------------------------------

struct StatsArgs {
    std::string structure;
    std::string json_report;
};

void run_stats(const StatsArgs& a) {
    const OctreeStructure structure = read_structure(a.structure);
    const OctreeConfig config = neutral_config(structure.depth(), structure.base_dims());
    const CompressionStats stats = compression_stats(structure, config);
    for (std::size_t l = 0; l < stats.leaves_per_level.size(); ++l) {
        if (l < stats.split_fractions.size()) {
            std::printf("level %zu: %llu leaves (split %s)\n", l,
                        static_cast<unsigned long long>(stats.leaves_per_level[l]),
                        percent(stats.split_fractions[l]).c_str());
        } else {
            std::printf("level %zu: %llu leaves\n", l,
                        static_cast<unsigned long long>(stats.leaves_per_level[l]));
        }
    }
    std::printf("total leaves: %llu of %llu dense cells (%s)\n",
                static_cast<unsigned long long>(stats.total_leaves),
                static_cast<unsigned long long>(stats.dense_cells),
                percent(stats.leaf_fraction).c_str());
    if (!a.json_report.empty()) {
        json report;
        report["command"] = "stats";
        report["leaves_per_level"] = stats.leaves_per_level;
        report["total_leaves"] = stats.total_leaves;
        report["dense_cells"] = stats.dense_cells;
        report["leaf_fraction"] = stats.leaf_fraction;
        report["split_fractions"] = stats.split_fractions;
        write_report(a.json_report, report);
    }
}

// ---- export ----------------------------------------------------------------

struct ExportArgs {
    std::string sparse;
    std::string out;
    std::string like;
    std::vector<double> voxel_size;
    std::vector<double> origin;
};

void run_export(const ExportArgs& a) {
    const OctreeFileKind kind = peek_octree_kind(a.sparse);
    if (kind == OctreeFileKind::sparse_label) {
        const auto field = read_sparse_label(a.sparse);
        const std::uint32_t s = 1u << (field.depth - 1);
        const GridDims finest{field.base_dims.x * s, field.base_dims.y * s,
                              field.base_dims.z * s};
        write_point_list(a.out, field, resolve_geometry(finest, a.like, a.voxel_size, a.origin));
    } else if (kind == OctreeFileKind::sparse_scalar) {
        const auto field = read_sparse_scalar(a.sparse);
        const std::uint32_t s = 1u << (field.depth - 1);
        const GridDims finest{field.base_dims.x * s, field.base_dims.y * s,
                              field.base_dims.z * s};
        write_point_list(a.out, field, resolve_geometry(finest, a.like, a.voxel_size, a.origin));
    } else {
        throw config_error(a.sparse + " is not a sparse field file");
    }
    std::printf("point list -> %s\n", a.out.c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"octree occupancy grid toolkit"};
    app.require_subcommand(1);

    SynthArgs synth_args;
    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic labeled scene");
    synth->add_option("--out", synth_args.out, "output grid file")->required();
    synth->add_option("--spec", synth_args.spec_in, "scene spec file to build instead of a random scene");
    synth->add_option("--spec-out", synth_args.spec_out, "write the generated scene spec");
    synth->add_option("--seed", synth_args.seed, "random seed");
    synth->add_option("--dims", synth_args.dims, "finest dims X,Y,Z")->delimiter(',')->expected(3);
    synth->add_option("--voxel-size", synth_args.voxel_size, "voxel size in meters")->delimiter(',')->expected(3);
    synth->add_option("--origin", synth_args.origin, "world origin of cell (0,0,0)")->delimiter(',')->expected(3);
    synth->add_option("--boxes", synth_args.boxes, "number of random boxes");
    synth->add_option("--ground", synth_args.ground, "ground slab height in cells");
    synth->add_option("--classes", synth_args.classes, "semantic class count");
    synth->add_option("--cameras-out", synth_args.cameras_out, "write a camera ring to this file");
    synth->add_option("--num-cameras", synth_args.num_cameras, "cameras in the ring");
    synth->add_option("--image-size", synth_args.image_size, "camera image size W,H")->delimiter(',')->expected(2);
    synth->add_option("--segmaps-out", synth_args.segmaps_out, "prefix for rendered segmaps (<prefix><i>.oseg)");
    synth->add_option("--class-table", synth_args.class_table_path, "label-to-category table for rendering");
    synth->callback([&] { run_synth(synth_args); });

    GtArgs gt_args;
    CLI::App* gt = app.add_subcommand("gt-octree", "derive the octree split ground truth from a label grid");
    gt->add_option("--in", gt_args.in, "input label grid")->required();
    gt->add_option("--out", gt_args.out, "output structure file")->required();
    gt->add_option("--depth", gt_args.depth, "octree level count");
    gt->add_option("--base-dims", gt_args.base_dims, "coarsest dims X,Y,Z (default: derived)")->delimiter(',')->expected(3);
    gt->callback([&] { run_gt_octree(gt_args); });

    InitArgs init_args;
    CLI::App* init = app.add_subcommand("init", "build the initial mask from cameras and segmaps");
    init->add_option("--grid", init_args.grid, "grid file fixing the finest geometry")->required();
    init->add_option("--cameras", init_args.cameras, "camera file")->required();
    init->add_option("--segmaps", init_args.segmaps, "segmap files, one per camera")->required()->delimiter(',');
    init->add_option("--out", init_args.out, "output mask file")->required();
    init->add_option("--weights-out", init_args.weights_out, "also write the raw weight field");
    init->add_option("--depth", init_args.depth, "octree level count");
    init->add_option("--base-dims", init_args.base_dims, "coarsest dims X,Y,Z (default: derived)")->delimiter(',')->expected(3);
    init->add_option("--weights", init_args.weights, "category weights foreground,background,ground")->delimiter(',')->expected(3);
    init->add_option("--accum", init_args.accum, "cross-camera accumulation: sum or max")
        ->check(CLI::IsMember({"sum", "max"}));
    init->callback([&] { run_init(init_args); });

    RectifyArgs rect_args;
    CLI::App* rect = app.add_subcommand("rectify", "iteratively rectify a mask and derive structures");
    rect->add_option("--mask", rect_args.mask, "input mask file")->required();
    rect->add_option("--out-mask", rect_args.out_mask, "output rectified mask file");
    rect->add_option("--out-structure", rect_args.out_structure, "output structure file");
    rect->add_option("--provider", rect_args.provider,
                     "probability source: oracle:<path>:<noise> | const:<v> | file:<path>")
        ->required();
    rect->add_option("--iters", rect_args.iters, "rectification iterations");
    rect->add_option("--seed", rect_args.seed, "seed for the oracle noise stream");
    rect->add_option("--keep", rect_args.keep, "high-confidence keep ratio per level")->delimiter(',');
    rect->add_option("--blend", rect_args.blend, "weight on provider values per level")->delimiter(',');
    rect->add_option("--ratios", rect_args.ratios, "selection ratio per level")->delimiter(',');
    rect->add_option("--gt", rect_args.gt, "structure file to score each iteration against");
    rect->add_option("--json-report", rect_args.json_report, "write a JSON quality report");
    rect->callback([&] { run_rectify(rect_args); });

    EncodeArgs enc_args;
    CLI::App* enc = app.add_subcommand("encode", "pool a dense grid onto a structure's leaves");
    enc->add_option("--grid", enc_args.grid, "input grid file")->required();
    enc->add_option("--structure", enc_args.structure, "structure file")->required();
    enc->add_option("--out", enc_args.out, "output sparse field file")->required();
    enc->add_option("--pooling", enc_args.pooling, "leaf pooling: mode or average")
        ->check(CLI::IsMember({"mode", "average"}));
    enc->callback([&] { run_encode(enc_args); });

    DecodeArgs dec_args;
    CLI::App* dec = app.add_subcommand("decode", "broadcast a sparse field back to a dense grid");
    dec->add_option("--sparse", dec_args.sparse, "input sparse field file")->required();
    dec->add_option("--structure", dec_args.structure, "structure file")->required();
    dec->add_option("--out", dec_args.out, "output grid file")->required();
    dec->add_option("--like", dec_args.like, "grid file supplying voxel size and origin");
    dec->add_option("--voxel-size", dec_args.voxel_size, "voxel size override")->delimiter(',')->expected(3);
    dec->add_option("--origin", dec_args.origin, "origin override")->delimiter(',')->expected(3);
    dec->callback([&] { run_decode(dec_args); });

    EvalArgs eval_args;
    CLI::App* eval = app.add_subcommand("eval", "score predictions against ground truth");
    eval->add_option("--pred", eval_args.pred, "predicted label grid");
    eval->add_option("--gt", eval_args.gt, "ground-truth label grid");
    eval->add_option("--pred-structure", eval_args.pred_structure, "predicted structure file");
    eval->add_option("--gt-structure", eval_args.gt_structure, "ground-truth structure file");
    eval->add_option("--pred-mask", eval_args.pred_mask, "predicted mask file (focal loss mode)");
    eval->add_option("--classes", eval_args.classes, "semantic class count");
    eval->add_option("--ignore", eval_args.ignore, "ground-truth labels to exclude")->delimiter(',');
    eval->add_flag("--all-classes", eval_args.all_classes, "divide the mean by the full class count");
    eval->add_option("--alpha", eval_args.alpha, "focal loss alpha");
    eval->add_option("--gamma", eval_args.gamma, "focal loss gamma");
    eval->add_option("--json-report", eval_args.json_report, "write a JSON report");
    eval->callback([&] { run_eval(eval_args); });

    StatsArgs stats_args;
    CLI::App* stats = app.add_subcommand("stats", "report leaf counts and compression of a structure");
    stats->add_option("--structure", stats_args.structure, "structure file")->required();
    stats->add_option("--json-report", stats_args.json_report, "write a JSON report");
    stats->callback([&] { run_stats(stats_args); });

    ExportArgs export_args;
    CLI::App* exp = app.add_subcommand("export", "write sparse leaves as a viewer point list");
    exp->add_option("--sparse", export_args.sparse, "input sparse field file")->required();
    exp->add_option("--out", export_args.out, "output text file (x y z size label)")->required();
    exp->add_option("--like", export_args.like, "grid file supplying voxel size and origin");
    exp->add_option("--voxel-size", export_args.voxel_size, "voxel size override")->delimiter(',')->expected(3);
    exp->add_option("--origin", export_args.origin, "origin override")->delimiter(',')->expected(3);
    exp->callback([&] { run_export(export_args); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const parse_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const io_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}
