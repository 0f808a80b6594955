#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "amodal/backends/backend.hpp"
#include "amodal/core/geometry.hpp"
#include "amodal/core/image.hpp"
#include "amodal/core/mask.hpp"

namespace amodal {

// Deterministic scripted backends. A ScriptedScene is an ordered stack of
// layers over a background; the mock "models" answer every query from the
// scene script, with no noise and no learned components, so end-to-end
// pipeline expectations are exact.
//
// Scene appearances are position-coded: pixel (x, y) of an element with
// identity tag T is RGB(T, x, y). The mocks classify pixels by tag and
// recover crop/pad alignment from the coded coordinates, which lets them
// answer correctly for any crop the pipeline presents. Canvas dimensions
// are therefore limited to 256, and the tags 0, 128 and 255 are reserved
// (black, the gray backdrop and white padding).

struct SceneLayer {
    BinaryMask mask;         // full unoccluded mask, canvas dims
    ImageBuffer appearance;  // canvas dims
    std::string category;
    int z = 0;  // larger = closer to camera
    int tag = 0;
};

struct ScriptedScene {
    int canvas_w = 0;
    int canvas_h = 0;
    BBox window;  // the nominal input image is this canvas window
    ImageBuffer background;  // canvas dims
    int background_tag = 0;
    std::vector<SceneLayer> layers;

    // Optional per-fill-call reveal script: entry i lists the layer ids the
    // mock inpainter keeps exposed on the i-th inpainting call. When absent
    // (or exhausted) a layer is hidden iff the call's inpaint mask covers
    // the majority of its visible region.
    std::vector<std::vector<int>> reveal_script;

    std::vector<std::pair<int, int>> unknown_depth_pairs;

    /// Composite the window: the nominal input image fed to the pipeline.
    ImageBuffer render_window() const;

    /// Canvas mask of the pixels where layer i is topmost.
    BinaryMask visible_canvas_mask(int layer) const;

    /// Layer i's full mask restricted to the window raster.
    BinaryMask layer_mask_in_window(int layer) const;
};

ImageBuffer coded_appearance(int tag, int w, int h);
ScriptedScene make_scene(int canvas_w, int canvas_h, BBox window, int background_tag);
void add_rect_layer(ScriptedScene& scene, int tag, std::string category, int z,
                    const BBox& rect);
void add_mask_layer(ScriptedScene& scene, int tag, std::string category, int z,
                    BinaryMask canvas_mask, std::optional<ImageBuffer> appearance = {});

ScriptedScene load_scene_json(const std::string& path);

/// Shared scene interpreter used by every mock backend.
class MockSceneContext {
public:
    explicit MockSceneContext(ScriptedScene scene);

    const ScriptedScene& scene() const { return scene_; }

    // Label ids: 0 = background, 1..n = layers, n+1 = backdrop/padding/other.
    int label_count() const { return static_cast<int>(scene_.layers.size()) + 2; }
    int other_label() const { return label_count() - 1; }
    PlaneU8 label_grid(const ImageBuffer& img) const;

    /// Image-to-canvas offset recovered by majority vote over coded pixels.
    Eigen::Vector2i register_offset(const ImageBuffer& img) const;

    Rgb compose_at(int cx, int cy, const std::vector<char>& exposed) const;

    std::vector<char> default_exposed(const ImageBuffer& img, const BinaryMask& mask,
                                      const Eigen::Vector2i& offset) const;

private:
    ScriptedScene scene_;
};

class MockDiffusionBackend : public DiffusionBackend {
public:
    MockDiffusionBackend(std::shared_ptr<MockSceneContext> ctx, int total_steps = 50);

    std::string name() const override { return "mock-diffusion"; }
    std::string version() const override { return "scripted-1"; }

    NoisyState diffuse_from_image(const ImageBuffer& image, const BinaryMask& mask,
                                  const std::string& prompt, int e) override;
    NoisyState diffuse_from_state(const NoisyState& state, const BinaryMask& mask,
                                  const std::string& prompt, int e) override;
    NoisyState add_noise(const ImageBuffer& image, int k) override;
    ImageBuffer decode(const NoisyState& state) override;
    FeatureMap extract_decoder_features(const NoisyState& state, int layer) override;
    int total_steps() const override { return total_steps_; }
    void set_seed(std::uint64_t seed) override { seed_ = seed; }

    int fill_calls() const { return fill_calls_; }

private:
    ImageBuffer fill(const ImageBuffer& input, const BinaryMask& mask);
    NoisyState make_state(ImageBuffer raster, int t) const;
    const ImageBuffer& raster_of(const NoisyState& state) const;

    std::shared_ptr<MockSceneContext> ctx_;
    int total_steps_;
    std::uint64_t seed_ = 0;
    int fill_calls_ = 0;
};

class MockSegmentationBackend : public SegmentationBackend {
public:
    explicit MockSegmentationBackend(std::shared_ptr<MockSceneContext> ctx)
        : ctx_(std::move(ctx)) {}
    std::string name() const override { return "mock-segmentation"; }
    std::string version() const override { return "scripted-1"; }
    InstanceSet segment(const ImageBuffer& image,
                        const std::vector<std::string>& vocabulary) override;

private:
    std::shared_ptr<MockSceneContext> ctx_;
};

class MockDepthBackend : public DepthBackend {
public:
    explicit MockDepthBackend(std::shared_ptr<MockSceneContext> ctx)
        : ctx_(std::move(ctx)) {}
    std::string name() const override { return "mock-depth"; }
    std::string version() const override { return "scripted-1"; }
    DepthVerdict order(const ImageBuffer& image, const BinaryMask& a,
                       const BinaryMask& b) override;

private:
    std::shared_ptr<MockSceneContext> ctx_;
};

class MockRemovalBackend : public RemovalBackend {
public:
    explicit MockRemovalBackend(std::shared_ptr<MockSceneContext> ctx)
        : ctx_(std::move(ctx)) {}
    std::string name() const override { return "mock-removal"; }
    std::string version() const override { return "scripted-1"; }
    ImageBuffer remove(const ImageBuffer& image, const BinaryMask& mask) override;

private:
    std::shared_ptr<MockSceneContext> ctx_;
};

class MockMetricBackend : public MetricBackend {
public:
    std::string name() const override { return "mock-metric"; }
    std::string version() const override { return "scripted-1"; }
    double score(const std::string& kind, const ImageBuffer& a, const ImageBuffer& b,
                 const std::string& text) override;
};

/// Wire all mock backends to one scene.
BackendSet make_mock_backends(const ScriptedScene& scene, int total_steps = 50,
                              bool with_metric = false);

}  // namespace amodal
