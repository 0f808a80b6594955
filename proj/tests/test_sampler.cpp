#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "amodal/sampler/mc.hpp"
#include "test_util.hpp"

using namespace amodal;
using namespace amodal::testutil;

namespace {

/// Decorator that records every inpaint mask handed to the diffusion model.
class RecordingDiffusion : public DiffusionBackend {
public:
    explicit RecordingDiffusion(std::shared_ptr<DiffusionBackend> inner)
        : inner_(std::move(inner)) {}

    std::string name() const override { return inner_->name(); }
    std::string version() const override { return inner_->version(); }
    NoisyState diffuse_from_image(const ImageBuffer& image, const BinaryMask& mask,
                                  const std::string& prompt, int e) override {
        masks.push_back(mask);
        return inner_->diffuse_from_image(image, mask, prompt, e);
    }
    NoisyState diffuse_from_state(const NoisyState& state, const BinaryMask& mask,
                                  const std::string& prompt, int e) override {
        masks.push_back(mask);
        return inner_->diffuse_from_state(state, mask, prompt, e);
    }
    NoisyState add_noise(const ImageBuffer& image, int k) override {
        return inner_->add_noise(image, k);
    }
    ImageBuffer decode(const NoisyState& state) override { return inner_->decode(state); }
    FeatureMap extract_decoder_features(const NoisyState& state, int layer) override {
        return inner_->extract_decoder_features(state, layer);
    }
    int total_steps() const override { return inner_->total_steps(); }
    void set_seed(std::uint64_t seed) override { inner_->set_seed(seed); }

    std::vector<BinaryMask> masks;

private:
    std::shared_ptr<DiffusionBackend> inner_;
};

FramedInputs framed_from_scene(const ScriptedScene& scene, const BinaryMask& modal,
                               const BinaryMask& occ) {
    FramedInputs framed;
    framed.image = scene.render_window();
    framed.modal = modal;
    framed.occ_mask = occ;
    framed.transform.original_w = framed.image.width();
    framed.transform.original_h = framed.image.height();
    framed.transform.crop = BBox{0, 0, framed.image.width(), framed.image.height()};
    framed.transform.framed_w = framed.image.width();
    framed.transform.framed_h = framed.image.height();
    return framed;
}

}  // namespace

TEST_CASE("swap_background keeps only modal pixels over the backdrop") {
    DeterministicRng rng(11);
    const ImageBuffer img = random_image(20, 16, rng);
    const BinaryMask modal = rect_mask(20, 16, {4, 4, 12, 12});

    const ImageBuffer gray = swap_background(img, modal, CleanBackground::gray);
    for (int y = 0; y < 16; ++y) {
        for (int x = 0; x < 20; ++x) {
            if (modal.at(x, y)) {
                REQUIRE(gray.at(x, y) == img.at(x, y));
            } else {
                REQUIRE(gray.at(x, y) == Rgb{128, 128, 128});
            }
        }
    }
    CHECK(swap_background(img, modal, CleanBackground::original) == img);
    CHECK(swap_background(img, modal, CleanBackground::sky).at(0, 0) ==
          Rgb{135, 206, 235});
}

TEST_CASE("cluster segmentation recovers the object exactly from one-hot features") {
    const ScriptedScene scene = simple_scene();
    BackendSet backends = make_mock_backends(scene);
    PipelineConfig config;

    const BinaryMask modal = rect_mask(120, 100, {20, 30, 45, 70});
    const BinaryMask occ =
        mask_difference(mask_dilate(rect_mask(120, 100, {45, 20, 60, 90}), 1), modal);

    const ImageBuffer i_syn =
        swap_background(scene.render_window(), modal, config.clean_background);
    const NoisyState syn_k =
        denoise_synthetic(i_syn, occ, "cat", config.composite_step, *backends.diffusion);
    const auto [mask, diag] =
        segment_noisy_object(syn_k, modal, occ, config, *backends.diffusion);

    // The scene object within modal ∪ occ, i.e. its full extent here.
    const BinaryMask gt = rect_mask(120, 100, {20, 30, 80, 70});
    CHECK(mask == mask_intersect(gt, mask_union(modal, occ)));
    CHECK(mask_subset(modal, mask));
    CHECK(mask_subset(mask, mask_union(modal, occ)));
    CHECK(diag.k_effective >= 2);
    CHECK(diag.chosen.size() == 1);
}

TEST_CASE("cluster invariant holds over random scenes") {
    DeterministicRng rng(12);
    PipelineConfig config;
    for (int trial = 0; trial < 25; ++trial) {
        const int w = 80, h = 80;
        ScriptedScene scene = make_scene(w, h, BBox{0, 0, w, h}, kBgTag);
        const BinaryMask obj = random_blob(w, h, rng, 10);
        const BinaryMask occluder = random_blob(w, h, rng, 10);
        add_mask_layer(scene, kObjectTag, "cat", 1, obj);
        add_mask_layer(scene, kOccluderTag, "fence", 2, occluder);
        const BinaryMask modal = mask_difference(obj, occluder);
        if (mask_area(modal) == 0) continue;
        const BinaryMask occ = mask_difference(mask_dilate(occluder, 1), modal);

        BackendSet backends = make_mock_backends(scene);
        const ImageBuffer i_syn =
            swap_background(scene.render_window(), modal, config.clean_background);
        const NoisyState syn_k = denoise_synthetic(i_syn, occ, "cat",
                                                   config.composite_step,
                                                   *backends.diffusion);
        const auto [mask, diag] =
            segment_noisy_object(syn_k, modal, occ, config, *backends.diffusion);
        REQUIRE(mask_subset(modal, mask));
        REQUIRE(mask_subset(mask, mask_union(modal, occ)));
    }
}

TEST_CASE("composite mixes the two states per pixel at the shared timestep") {
    const ScriptedScene scene = simple_scene();
    BackendSet backends = make_mock_backends(scene);
    DeterministicRng rng(13);
    const ImageBuffer a = random_image(24, 24, rng);
    const ImageBuffer b = random_image(24, 24, rng);
    const BinaryMask pick = random_blob(24, 24, rng);

    const NoisyState sa = backends.diffusion->add_noise(a, 20);
    const NoisyState sb = backends.diffusion->add_noise(b, 20);
    const NoisyState mixed = composite(sa, sb, pick, *backends.diffusion);
    CHECK(mixed.timestep == 20);

    const ImageBuffer out = backends.diffusion->decode(mixed);
    for (int y = 0; y < 24; ++y) {
        for (int x = 0; x < 24; ++x) {
            REQUIRE(out.at(x, y) == (pick.at(x, y) ? a.at(x, y) : b.at(x, y)));
        }
    }

    const NoisyState other = backends.diffusion->add_noise(a, 30);
    CHECK_THROWS_AS(composite(sa, other, pick, *backends.diffusion), ContractError);
}

TEST_CASE("mixed context completion recovers the object and spares the rest") {
    const ScriptedScene scene = simple_scene();
    BackendSet backends = make_mock_backends(scene);
    PipelineConfig config;

    const BinaryMask modal = rect_mask(120, 100, {20, 30, 45, 70});
    const BinaryMask occ = mask_difference(
        mask_dilate(rect_mask(120, 100, {45, 20, 60, 90}), 1), modal);
    const FramedInputs framed = framed_from_scene(scene, modal, occ);

    const auto [completed, trace] =
        mixed_context_complete(framed, "cat", config, backends);
    // Hidden object pixels are back.
    CHECK(completed.at(50, 40).r == kObjectTag);
    CHECK(completed.at(50, 25).r == kBgTag);
    // Pixels outside the inpaint region are untouched.
    for (int y = 0; y < 100; ++y) {
        for (int x = 0; x < 120; ++x) {
            if (!occ.at(x, y)) {
                REQUIRE(completed.at(x, y) == framed.image.at(x, y));
            }
        }
    }
    CHECK(trace.syn_k.timestep == config.composite_step);
    CHECK(trace.composited.timestep == config.composite_step);
    CHECK(mask_subset(modal, trace.amodal_k));
}

TEST_CASE("plain completion inpaints in one pass") {
    const ScriptedScene scene = simple_scene();
    BackendSet backends = make_mock_backends(scene);
    PipelineConfig config;
    const BinaryMask modal = rect_mask(120, 100, {20, 30, 45, 70});
    const BinaryMask occ = mask_difference(
        rect_mask(120, 100, {45, 20, 60, 90}), modal);
    const FramedInputs framed = framed_from_scene(scene, modal, occ);

    const ImageBuffer out = plain_complete(framed, "cat", config, backends);
    CHECK(out.at(50, 40).r == kObjectTag);

    FramedInputs quiet = framed;
    quiet.occ_mask = BinaryMask(120, 100);
    CHECK(plain_complete(quiet, "cat", config, backends) == framed.image);
}

TEST_CASE("naive outpainting inpaints exactly the modal complement") {
    const ScriptedScene scene = simple_scene();
    BackendSet base = make_mock_backends(scene);
    auto recorder = std::make_shared<RecordingDiffusion>(base.diffusion);
    BackendSet backends = base;
    backends.diffusion = recorder;
    PipelineConfig config;

    DeterministicRng rng(14);
    for (int trial = 0; trial < 30; ++trial) {
        const BinaryMask modal = random_blob(120, 100, rng);
        naive_outpaint(scene.render_window(), modal, "cat", config, backends);
        REQUIRE(recorder->masks.back() == mask_complement(modal));
    }

    // Full-frame modal: nothing to outpaint.
    recorder->masks.clear();
    const BinaryMask full(120, 100, true);
    CHECK(naive_outpaint(scene.render_window(), full, "cat", config, backends) ==
          scene.render_window());
    CHECK(recorder->masks.empty());
}
