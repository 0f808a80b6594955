#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nlohmann/json.hpp>

#include "amodal/occlusion/analysis.hpp"
#include "test_util.hpp"

using namespace amodal;
using namespace amodal::testutil;

TEST_CASE("find_neighbors respects the dilation radius") {
    const int w = 60, h = 60;
    const BinaryMask modal = rect_mask(w, h, {10, 10, 20, 20});

    InstanceSet instances;
    instances.push_back({modal, "cat", 0.9});                           // the query itself
    instances.push_back({rect_mask(w, h, {22, 10, 30, 20}), "a", 0.9});  // gap 2
    instances.push_back({rect_mask(w, h, {40, 10, 50, 20}), "b", 0.9});  // gap 20
    instances.push_back({BinaryMask(w, h), "empty", 0.9});

    const auto near = find_neighbors(instances, modal, 5);
    REQUIRE(near.size() == 1);
    CHECK(near[0] == instances[1].mask);

    // Radius large enough to reach the far instance.
    CHECK(find_neighbors(instances, modal, 25).size() == 2);
    // Radius 0: only true overlaps count, and there are none.
    CHECK(find_neighbors(instances, modal, 0).empty());
}

TEST_CASE("find_neighbors excludes any instance that is mostly the query") {
    const int w = 40, h = 40;
    const BinaryMask modal = rect_mask(w, h, {10, 10, 30, 30});
    // Same object re-detected with a slightly different mask.
    const BinaryMask redetect = rect_mask(w, h, {11, 10, 31, 30});
    InstanceSet instances{{redetect, "cat", 0.8}};
    CHECK(find_neighbors(instances, modal, 5).empty());
}

TEST_CASE("select_occluders keeps only instances in front") {
    const ScriptedScene scene = simple_scene();
    BackendSet backends = make_mock_backends(scene);
    const ImageBuffer img = scene.render_window();

    const BinaryMask cat_visible = rect_mask(120, 100, {20, 30, 45, 70});
    const BinaryMask fence = rect_mask(120, 100, {45, 20, 60, 90});
    const BinaryMask bg_patch = rect_mask(120, 100, {0, 0, 10, 10});

    const auto occluders =
        select_occluders(img, cat_visible, {fence, bg_patch}, *backends.depth);
    REQUIRE(occluders.size() == 1);
    CHECK(occluders[0] == fence);

    // Flip roles: nothing occludes the fence.
    CHECK(select_occluders(img, fence, {cat_visible}, *backends.depth).empty());
}

TEST_CASE("unknown depth verdicts never create occluders") {
    ScriptedScene scene = simple_scene();
    scene.unknown_depth_pairs = {{0, 1}};
    BackendSet backends = make_mock_backends(scene);
    const ImageBuffer img = simple_scene().render_window();

    const BinaryMask cat_visible = rect_mask(120, 100, {20, 30, 45, 70});
    const BinaryMask fence = rect_mask(120, 100, {45, 20, 60, 90});
    CHECK(select_occluders(img, cat_visible, {fence}, *backends.depth).empty());
}

TEST_CASE("occlusion report: occluder union is dilated and excludes modal") {
    const ScriptedScene scene = simple_scene();
    PipelineConfig config;
    config.open_vocabulary = {"cat", "fence"};
    BackendSet backends = make_mock_backends(scene);
    const ImageBuffer img = scene.render_window();
    const BinaryMask modal = rect_mask(120, 100, {20, 30, 45, 70});

    const OcclusionReport report = build_occlusion_report(img, modal, config, backends);
    CHECK(report.is_occluded);
    CHECK(report.occluder_masks.size() == 1);
    CHECK(report.boundary_sides.empty());

    // Union = dilate(fence visible mask, 2 px chebyshev) minus modal.
    const BinaryMask fence = rect_mask(120, 100, {45, 20, 60, 90});
    const BinaryMask expected = mask_difference(mask_dilate(fence, 1), modal);
    CHECK(report.occluder_union == expected);
    CHECK(mask_area(mask_intersect(report.occluder_union, modal)) == 0);

    const nlohmann::json j = report.to_json();
    CHECK(j.at("occluder_count") == 1);
    CHECK(j.at("is_occluded") == true);
}

TEST_CASE("boundary contact alone marks the object occluded") {
    // One lonely object flush against the left edge.
    ScriptedScene scene = make_scene(100, 100, BBox{0, 0, 100, 100}, kBgTag);
    add_rect_layer(scene, kObjectTag, "cat", 1, BBox{0, 30, 40, 70});
    PipelineConfig config;
    config.open_vocabulary = {"cat"};
    BackendSet backends = make_mock_backends(scene);

    const BinaryMask modal = rect_mask(100, 100, {0, 30, 40, 70});
    const OcclusionReport report =
        build_occlusion_report(scene.render_window(), modal, config, backends);
    CHECK(report.is_occluded);
    CHECK(mask_area(report.occluder_union) == 0);
    CHECK(report.boundary_sides == std::set<Side>{Side::left});
}

TEST_CASE("unoccluded object yields a quiet report") {
    ScriptedScene scene = make_scene(100, 100, BBox{0, 0, 100, 100}, kBgTag);
    add_rect_layer(scene, kObjectTag, "cat", 1, BBox{30, 30, 70, 70});
    PipelineConfig config;
    config.open_vocabulary = {"cat"};
    BackendSet backends = make_mock_backends(scene);

    const BinaryMask modal = rect_mask(100, 100, {30, 30, 70, 70});
    const OcclusionReport report =
        build_occlusion_report(scene.render_window(), modal, config, backends);
    CHECK_FALSE(report.is_occluded);
    CHECK(report.neighbor_masks.empty());
    CHECK(mask_area(report.occluder_union) == 0);
}

TEST_CASE("segmentation vocabulary is the category plus configured terms") {
    PipelineConfig config;
    config.open_vocabulary = {"fence", "pole"};
    const auto vocab = segmentation_vocabulary("cat", config);
    REQUIRE(vocab.size() == 3);
    CHECK(vocab[0] == "cat");
    CHECK(vocab[1] == "fence");
    CHECK(vocab[2] == "pole");

    // The category is not duplicated when already listed.
    config.open_vocabulary = {"cat", "fence"};
    CHECK(segmentation_vocabulary("cat", config).size() == 2);
}
