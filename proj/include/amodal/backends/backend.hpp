#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "amodal/backends/types.hpp"
#include "amodal/core/image.hpp"
#include "amodal/core/mask.hpp"

namespace amodal {

/// Text-conditioned diffusion inpainting, abstracted as a timestep range
/// runner F_{s->e}(input, mask, prompt) plus noise/decode/feature hooks.
/// Pixels outside the inpaint mask are preserved (exactly for the mock,
/// within codec tolerance for remote backends).
class DiffusionBackend {
public:
    virtual ~DiffusionBackend() = default;

    virtual std::string name() const = 0;
    virtual std::string version() const = 0;

    /// Start from a clean image at s = 0 and run to timestep e.
    virtual NoisyState diffuse_from_image(const ImageBuffer& image,
                                          const BinaryMask& inpaint_mask,
                                          const std::string& prompt, int e) = 0;

    /// Resume from a state at its own timestep and run to e.
    virtual NoisyState diffuse_from_state(const NoisyState& state,
                                          const BinaryMask& inpaint_mask,
                                          const std::string& prompt, int e) = 0;

    virtual NoisyState add_noise(const ImageBuffer& image, int k) = 0;

    virtual ImageBuffer decode(const NoisyState& state) = 0;

    /// Mid-denoise decoder features; requires 0 < t < N.
    virtual FeatureMap extract_decoder_features(const NoisyState& state,
                                                int layer) = 0;

    virtual int total_steps() const = 0;
    virtual void set_seed(std::uint64_t seed) = 0;
};

class SegmentationBackend {
public:
    virtual ~SegmentationBackend() = default;
    virtual std::string name() const = 0;
    virtual std::string version() const = 0;
    virtual InstanceSet segment(const ImageBuffer& image,
                                const std::vector<std::string>& vocabulary) = 0;
};

class DepthBackend {
public:
    virtual ~DepthBackend() = default;
    virtual std::string name() const = 0;
    virtual std::string version() const = 0;
    /// Pairwise ordering; antisymmetric by contract.
    virtual DepthVerdict order(const ImageBuffer& image, const BinaryMask& a,
                               const BinaryMask& b) = 0;
};

class RemovalBackend {
public:
    virtual ~RemovalBackend() = default;
    virtual std::string name() const = 0;
    virtual std::string version() const = 0;
    /// Fill the masked region with plausible background; unmasked pixels
    /// are preserved exactly.
    virtual ImageBuffer remove(const ImageBuffer& image, const BinaryMask& mask) = 0;
};

/// Optional perceptual-metric service used by the evaluation harness.
class MetricBackend {
public:
    virtual ~MetricBackend() = default;
    virtual std::string name() const = 0;
    virtual std::string version() const = 0;
    /// kind in {"clip", "dreamsim", "lpips"}. For "clip", `text` is the
    /// category prompt and `b` is ignored.
    virtual double score(const std::string& kind, const ImageBuffer& a,
                         const ImageBuffer& b, const std::string& text) = 0;
};

struct BackendSet {
    std::shared_ptr<DiffusionBackend> diffusion;
    std::shared_ptr<SegmentationBackend> segmentation;
    std::shared_ptr<DepthBackend> depth;
    std::shared_ptr<RemovalBackend> removal;
    std::shared_ptr<MetricBackend> metric;  // optional
};

}  // namespace amodal
