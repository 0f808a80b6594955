#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_util.hpp"

using namespace amodal;
using namespace amodal::testutil;

namespace {

ImageBuffer decode_fill(DiffusionBackend& d, const ImageBuffer& img,
                        const BinaryMask& mask, int e = 50) {
    return d.decode(d.diffuse_from_image(img, mask, "cat", e));
}

}  // namespace

TEST_CASE("scene rendering stacks layers by z over the background") {
    const ScriptedScene scene = simple_scene();
    const ImageBuffer img = scene.render_window();
    CHECK(img.width() == 120);
    CHECK(img.height() == 100);
    CHECK(img.at(5, 5).r == kBgTag);
    CHECK(img.at(25, 40).r == kObjectTag);
    CHECK(img.at(50, 40).r == kOccluderTag);  // occluder wins inside overlap
    // Position coding: pixel (x, y) carries its canvas coordinates.
    CHECK(img.at(25, 40).g == 25);
    CHECK(img.at(25, 40).b == 40);
}

TEST_CASE("offset registration survives crops and inconsistent minorities") {
    const MockSceneContext ctx(simple_scene());
    const ImageBuffer img = ctx.scene().render_window();

    const BBox box{17, 23, 90, 80};
    const ImageBuffer crop = image_crop(img, box);
    const auto offset = ctx.register_offset(crop);
    CHECK(offset.x() == 17);
    CHECK(offset.y() == 23);

    // Pad with white (offset votes must ignore it).
    const ImageBuffer padded = image_pad(crop, 9, 0, 4, 0, Rgb{255, 255, 255});
    const auto offset2 = ctx.register_offset(padded);
    CHECK(offset2.x() == 8);
    CHECK(offset2.y() == 19);

    // Paste an alien patch voting for a different offset; majority rules.
    ImageBuffer corrupted = crop;
    image_paste(corrupted, coded_appearance(kOccluderTag, 12, 12), 0, 0);
    const auto offset3 = ctx.register_offset(corrupted);
    CHECK(offset3.x() == 17);
    CHECK(offset3.y() == 23);
}

TEST_CASE("mock diffusion fill reveals occluded layers") {
    const ScriptedScene scene = simple_scene();
    BackendSet backends = make_mock_backends(scene);
    const ImageBuffer img = scene.render_window();

    // Inpainting the occluder reveals the object and background behind it.
    const BinaryMask occ = rect_mask(120, 100, {45, 20, 60, 90});
    const ImageBuffer filled = decode_fill(*backends.diffusion, img, occ);
    CHECK(filled.at(50, 40).r == kObjectTag);
    CHECK(filled.at(50, 25).r == kBgTag);
    // Pixels outside the mask are untouched.
    for (int y = 0; y < 100; ++y) {
        for (int x = 0; x < 120; ++x) {
            if (!occ.at(x, y)) {
                REQUIRE(filled.at(x, y) == img.at(x, y));
            }
        }
    }
}

TEST_CASE("fill works identically on crops of the scene") {
    const ScriptedScene scene = simple_scene();
    BackendSet backends = make_mock_backends(scene);
    const BBox box{30, 10, 100, 95};
    const ImageBuffer crop = image_crop(scene.render_window(), box);
    const BinaryMask occ = rect_mask(box.width(), box.height(),
                                     {45 - box.x0, 20 - box.y0, 60 - box.x0, 90 - box.y0});
    const ImageBuffer filled = decode_fill(*backends.diffusion, crop, occ);
    CHECK(filled.at(50 - box.x0, 40 - box.y0).r == kObjectTag);
    CHECK(filled.at(50 - box.x0, 40 - box.y0).g == 50);  // canvas-coded
}

TEST_CASE("layers absent from the input are never repainted") {
    const ScriptedScene scene = simple_scene();
    BackendSet backends = make_mock_backends(scene);
    const ImageBuffer img = scene.render_window();

    const BinaryMask occ = rect_mask(120, 100, {45, 20, 60, 90});
    const ImageBuffer once = decode_fill(*backends.diffusion, img, occ);
    // Inpaint a second time over a region straddling the removed occluder:
    // it must not come back.
    const BinaryMask again = rect_mask(120, 100, {40, 25, 65, 85});
    const ImageBuffer twice = decode_fill(*backends.diffusion, once, again);
    for (int y = 0; y < 100; ++y) {
        for (int x = 0; x < 120; ++x) {
            REQUIRE(twice.at(x, y).r != kOccluderTag);
        }
    }
}

TEST_CASE("reveal script overrides the default fill rule per call") {
    ScriptedScene scene = simple_scene();
    scene.reveal_script = {{1}};  // keep only the occluder on the first call
    BackendSet backends = make_mock_backends(scene);
    const ImageBuffer img = scene.render_window();

    const BinaryMask occ = rect_mask(120, 100, {45, 20, 60, 90});
    const ImageBuffer first = decode_fill(*backends.diffusion, img, occ);
    CHECK(first.at(50, 40).r == kOccluderTag);  // scripted: occluder stays

    // Script exhausted: the default context rule applies again.
    const ImageBuffer second = decode_fill(*backends.diffusion, img, occ);
    CHECK(second.at(50, 40).r == kObjectTag);
}

TEST_CASE("empty inpaint mask is a no-op and does not consume the script") {
    ScriptedScene scene = simple_scene();
    scene.reveal_script = {{1}};
    BackendSet backends = make_mock_backends(scene);
    auto* diffusion = dynamic_cast<MockDiffusionBackend*>(backends.diffusion.get());
    REQUIRE(diffusion != nullptr);

    const ImageBuffer img = scene.render_window();
    const ImageBuffer out = decode_fill(*backends.diffusion, img, BinaryMask(120, 100));
    CHECK(out == img);
    CHECK(diffusion->fill_calls() == 0);
}

TEST_CASE("timestep plumbing and validation") {
    BackendSet backends = make_mock_backends(simple_scene(), 50);
    const ImageBuffer img = simple_scene().render_window();
    const BinaryMask mask = rect_mask(120, 100, {45, 20, 60, 90});

    const NoisyState mid = backends.diffusion->diffuse_from_image(img, mask, "cat", 20);
    CHECK(mid.timestep == 20);
    const NoisyState done =
        backends.diffusion->diffuse_from_state(mid, mask, "cat", 50);
    CHECK(done.timestep == 50);
    CHECK(backends.diffusion->decode(done) ==
          backends.diffusion->decode(mid));  // mock fill is range-invariant

    CHECK_THROWS_AS(backends.diffusion->diffuse_from_image(img, mask, "cat", 0),
                    ContractError);
    CHECK_THROWS_AS(backends.diffusion->diffuse_from_image(img, mask, "cat", 51),
                    ContractError);
    CHECK_THROWS_AS(backends.diffusion->diffuse_from_state(mid, mask, "cat", 10),
                    ContractError);
    CHECK_THROWS_AS(backends.diffusion->add_noise(img, -1), ContractError);
    CHECK_THROWS_AS(backends.diffusion->extract_decoder_features(mid, 0),
                    ContractError);
    CHECK_THROWS_AS(backends.diffusion->extract_decoder_features(done, 3),
                    ContractError);  // t must satisfy 0 < t < N
}

TEST_CASE("decoder features are one-hot scene labels") {
    const ScriptedScene scene = simple_scene();
    const MockSceneContext ctx(scene);
    BackendSet backends = make_mock_backends(scene);
    const ImageBuffer img = scene.render_window();
    const NoisyState state = backends.diffusion->add_noise(img, 20);

    const FeatureMap f = backends.diffusion->extract_decoder_features(state, 3);
    CHECK(f.grid_w == 120);
    CHECK(f.grid_h == 100);
    CHECK(f.dim == ctx.label_count());
    const PlaneU8 labels = ctx.label_grid(img);
    for (int y = 0; y < 100; y += 7) {
        for (int x = 0; x < 120; x += 11) {
            const Eigen::Index cell = static_cast<Eigen::Index>(y) * 120 + x;
            REQUIRE(f.values(cell, labels(y, x)) == doctest::Approx(1.0f));
            REQUIRE(f.values.row(cell).sum() == doctest::Approx(1.0f));
        }
    }
}

TEST_CASE("mock segmentation returns visible instance masks") {
    const ScriptedScene scene = simple_scene();
    BackendSet backends = make_mock_backends(scene);
    const InstanceSet instances =
        backends.segmentation->segment(scene.render_window(), {"cat", "fence"});
    REQUIRE(instances.size() == 2);
    CHECK(instances[0].category == "cat");
    // The cat's visible mask excludes the fence overlap.
    CHECK(mask_area(instances[0].mask) == 60 * 40 - 15 * 40);
    CHECK(instances[1].category == "fence");
    CHECK(mask_area(instances[1].mask) == 15 * 70);
    for (const auto& inst : instances) CHECK(inst.score == doctest::Approx(0.9));
}

TEST_CASE("mock depth ordering is antisymmetric and honors unknown pairs") {
    ScriptedScene scene = simple_scene();
    scene.unknown_depth_pairs = {{0, 1}};  // layer indices: cat, fence
    const ImageBuffer img = scene.render_window();

    SUBCASE("z order decides") {
        BackendSet backends = make_mock_backends(simple_scene());
        const BinaryMask cat = rect_mask(120, 100, {20, 30, 45, 70});
        const BinaryMask fence = rect_mask(120, 100, {45, 20, 60, 90});
        CHECK(backends.depth->order(img, fence, cat) == DepthVerdict::first_closer);
        CHECK(backends.depth->order(img, cat, fence) == DepthVerdict::second_closer);
    }
    SUBCASE("scripted unknown pair") {
        BackendSet backends = make_mock_backends(scene);
        const BinaryMask cat = rect_mask(120, 100, {20, 30, 45, 70});
        const BinaryMask fence = rect_mask(120, 100, {45, 20, 60, 90});
        CHECK(backends.depth->order(img, cat, fence) == DepthVerdict::unknown);
        CHECK(backends.depth->order(img, fence, cat) == DepthVerdict::unknown);
    }
}

TEST_CASE("mock removal reveals background and preserves the rest") {
    const ScriptedScene scene = simple_scene();
    BackendSet backends = make_mock_backends(scene);
    const ImageBuffer img = scene.render_window();
    const BinaryMask everything =
        rect_mask(120, 100, {20, 20, 80, 90});  // covers object + occluder

    const ImageBuffer removed = backends.removal->remove(img, everything);
    CHECK(removed.at(25, 40).r == kBgTag);
    CHECK(removed.at(50, 40).r == kBgTag);
    CHECK(removed.at(5, 5) == img.at(5, 5));
}

TEST_CASE("mock metric is deterministic and zero for identical images") {
    BackendSet backends = make_mock_backends(simple_scene(), 50, /*with_metric=*/true);
    REQUIRE(backends.metric);
    const ImageBuffer img = simple_scene().render_window();
    CHECK(backends.metric->score("lpips", img, img, "") == doctest::Approx(0.0));
    CHECK(backends.metric->score("dreamsim", img, img, "") == doctest::Approx(0.0));
    const double clip1 = backends.metric->score("clip", img, img, "a cat");
    const double clip2 = backends.metric->score("clip", img, img, "a cat");
    CHECK(clip1 == clip2);
    CHECK_THROWS(backends.metric->score("fid", img, img, ""));
}

TEST_CASE("mock diffusion runs are reproducible") {
    const ScriptedScene scene = two_stage_scene();
    const ImageBuffer img = scene.render_window();
    const BinaryMask occ = rect_mask(140, 100, {28, 18, 62, 92});

    BackendSet a = make_mock_backends(scene);
    BackendSet b = make_mock_backends(scene);
    a.diffusion->set_seed(123);
    b.diffusion->set_seed(123);
    CHECK(decode_fill(*a.diffusion, img, occ) == decode_fill(*b.diffusion, img, occ));
}
