// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <limits>
#include <random>

#include "octovox/semantic_init.hpp"

using namespace octovox;

namespace {

CameraModel forward_camera() {
    CameraModel cam;
    cam.intrinsics = {100.0, 0.0, 64.0, 0.0, 100.0, 48.0, 0.0, 0.0, 1.0};
    cam.extrinsics = {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1};
    cam.image_width = 128;
    cam.image_height = 96;
    return cam;
}

GridGeometry single_voxel_ahead() {
    GridGeometry geom;
    geom.dims = GridDims{1, 1, 1};
    geom.voxel_size = Vec3f{1.0f, 1.0f, 1.0f};
    geom.origin = Vec3f{-0.5f, -0.5f, 1.0f};  // center (0, 0, 1.5)
    return geom;
}

}  // namespace

TEST_CASE("class names and weights map as documented") {
    REQUIRE(sem_class_name(SemClass::none) == std::string("void"));
    REQUIRE(sem_class_name(SemClass::ground) == std::string("ground"));
    REQUIRE(sem_class_name(SemClass::background) == std::string("background"));
    REQUIRE(sem_class_name(SemClass::foreground) == std::string("foreground"));
    for (const SemClass c : {SemClass::none, SemClass::ground, SemClass::background,
                             SemClass::foreground}) {
        REQUIRE(parse_sem_class(sem_class_name(c)) == c);
    }
    REQUIRE(!parse_sem_class("sky").has_value());

    const InitWeights w;
    REQUIRE(w.weight_of(SemClass::none) == 0.0);
    REQUIRE(w.weight_of(SemClass::ground) == 0.1);
    REQUIRE(w.weight_of(SemClass::background) == 0.5);
    REQUIRE(w.weight_of(SemClass::foreground) == 1.0);
}

TEST_CASE("init weights must be ordered foreground >= background >= ground >= 0") {
    InitWeights w;
    w.background_w = 2.0;
    REQUIRE_THROWS_AS(w.validate(), config_error);
    w = InitWeights{};
    w.ground_w = -0.1;
    REQUIRE_THROWS_AS(w.validate(), config_error);
    InitWeights{}.validate();
}

TEST_CASE("no cameras means zero evidence everywhere") {
    GridGeometry geom;
    geom.dims = GridDims{2, 2, 2};
    const DenseGrid<float> acc = accumulate_weights(geom, {}, {}, InitWeights{});
    for (float v : acc.values()) REQUIRE(v == 0.0f);
}

TEST_CASE("a visible voxel receives the weight of the pixel class it hits") {
    const CameraModel cam = forward_camera();
    const SegMap fg(cam.image_width, cam.image_height, SemClass::foreground);
    const DenseGrid<float> acc =
        accumulate_weights(single_voxel_ahead(), {cam}, {fg}, InitWeights{});
    REQUIRE(acc.cell_count() == 1);
    REQUIRE(acc[0] == 1.0f);
}

TEST_CASE("accumulation mode controls how cameras combine") {
    const CameraModel cam = forward_camera();
    const SegMap ground(cam.image_width, cam.image_height, SemClass::ground);
    const auto geom = single_voxel_ahead();

    const DenseGrid<float> summed =
        accumulate_weights(geom, {cam, cam}, {ground, ground}, InitWeights{}, WeightAccum::sum);
    REQUIRE(summed[0] == 0.2f);

    const DenseGrid<float> maxed =
        accumulate_weights(geom, {cam, cam}, {ground, ground}, InitWeights{}, WeightAccum::max);
    REQUIRE(maxed[0] == 0.1f);
}

TEST_CASE("void pixels contribute nothing") {
    const CameraModel cam = forward_camera();
    const SegMap blank(cam.image_width, cam.image_height, SemClass::none);
    const DenseGrid<float> acc =
        accumulate_weights(single_voxel_ahead(), {cam}, {blank}, InitWeights{});
    REQUIRE(acc[0] == 0.0f);
}

TEST_CASE("camera and segmap lists must line up") {
    const CameraModel cam = forward_camera();
    const SegMap fg(cam.image_width, cam.image_height, SemClass::foreground);
    const auto geom = single_voxel_ahead();
    REQUIRE_THROWS_AS(accumulate_weights(geom, {cam, cam}, {fg}, InitWeights{}), config_error);
    const SegMap wrong(64, 64, SemClass::foreground);
    REQUIRE_THROWS_AS(accumulate_weights(geom, {cam}, {wrong}, InitWeights{}), config_error);
}

TEST_CASE("segmap access is bounds checked") {
    SegMap map(4, 3);
    map.at(3, 2) = SemClass::ground;
    REQUIRE(map.at(3, 2) == SemClass::ground);
    REQUIRE_THROWS_AS(map.at(4, 0), index_error);
    REQUIRE_THROWS_AS(map.at(0, 3), index_error);
}

TEST_CASE("class tables resolve labels or reject them") {
    ClassTable table;
    table.set(Label{1}, SemClass::ground);
    table.set(Label{7}, SemClass::foreground);
    REQUIRE(table.require(1) == SemClass::ground);
    REQUIRE(table.find(7) == SemClass::foreground);
    REQUIRE(!table.find(2).has_value());
    REQUIRE_THROWS_AS(table.require(2), config_error);
}

TEST_CASE("an all-zero weight field yields an all-zero mask") {
    OctreeConfig config;
    config.depth = 2;
    config.base_dims = GridDims{2, 1, 1};
    config.selection_ratios = {0.5};
    const OctreeMask mask =
        build_initial_mask(DenseGrid<float>(config.finest_dims(), 0.0f), config);
    REQUIRE(mask.levels.size() == 1);
    for (float v : mask.levels[0].values()) REQUIRE(v == 0.0f);
}

TEST_CASE("a constant weight field normalizes to all ones") {
    OctreeConfig config;
    config.depth = 3;
    config.base_dims = GridDims{2, 1, 1};
    config.selection_ratios = {0.5, 0.5};
    const OctreeMask mask =
        build_initial_mask(DenseGrid<float>(config.finest_dims(), 0.375f), config);
    REQUIRE(mask.levels.size() == 2);
    for (const auto& level : mask.levels)
        for (float v : level.values()) REQUIRE(v == 1.0f);
}

TEST_CASE("a one-hot weight field normalizes its own cell to one") {
    OctreeConfig config;
    config.depth = 2;
    config.base_dims = GridDims{2, 1, 1};
    config.selection_ratios = {0.5};
    DenseGrid<float> weights(config.finest_dims(), 0.0f);  // 4x2x2
    weights.at(2, 0, 0) = 1.0f;
    const OctreeMask mask = build_initial_mask(weights, config);
    REQUIRE(mask.levels[0].at(0, 0, 0) == 0.0f);
    REQUIRE(mask.levels[0].at(1, 0, 0) == 1.0f);
}

TEST_CASE("mask building rejects bad inputs") {
    OctreeConfig config;
    config.depth = 2;
    config.base_dims = GridDims{2, 1, 1};
    config.selection_ratios = {0.5};
    REQUIRE_THROWS_AS(build_initial_mask(DenseGrid<float>(GridDims{2, 2, 2}), config),
                      dimension_error);
    DenseGrid<float> negative(config.finest_dims(), 0.0f);
    negative[0] = -0.25f;
    REQUIRE_THROWS_AS(build_initial_mask(negative, config), config_error);
    DenseGrid<float> poisoned(config.finest_dims(), 0.0f);
    poisoned[0] = std::numeric_limits<float>::quiet_NaN();
    REQUIRE_THROWS_AS(build_initial_mask(poisoned, config), config_error);
}

TEST_CASE("uniformly scaling the weights changes nothing downstream") {
    OctreeConfig config;
    config.depth = 3;
    config.base_dims = GridDims{2, 2, 2};
    config.selection_ratios = {0.4, 0.5};
    std::mt19937_64 rng(21);
    DenseGrid<float> weights(config.finest_dims());
    for (auto& v : weights.values()) {
        v = static_cast<float>(static_cast<double>(rng() >> 11) * 0x1.0p-53);
    }
    DenseGrid<float> doubled = weights;
    for (auto& v : doubled.values()) v *= 2.0f;

    const OctreeMask a = build_initial_mask(weights, config);
    const OctreeMask b = build_initial_mask(doubled, config);
    // Doubling is exact in binary floating point, so the normalized masks are
    // bitwise identical and so are the structures derived from them.
    REQUIRE(a.levels == b.levels);
    const OctreeStructure sa = derive_structure(a, config);
    const OctreeStructure sb = derive_structure(b, config);
    REQUIRE(sa.split == sb.split);
}
