#pragma once

#include <set>
#include <utility>
#include <vector>

#include "amodal/backends/backend.hpp"
#include "amodal/core/image.hpp"
#include "amodal/core/mask.hpp"
#include "amodal/core/types.hpp"
#include "amodal/framing/framing.hpp"

namespace amodal {

struct ClusterDiagnostics {
    PlaneU8 assignments;  // crop-resolution label grid (nearest-neighbor upsample)
    std::set<int> chosen;
    std::vector<double> ratios;  // overlap with modal, per cluster; -1 for empty
    int k_effective = 0;
};

/// Everything the mixed-context run touched, for debug traces and bundles.
struct McTrace {
    ImageBuffer i_syn;
    NoisyState syn_k;
    NoisyState bg_k;
    BinaryMask amodal_k;
    NoisyState composited;
    ClusterDiagnostics clusters;
};

/// Replace everything outside the modal mask with the clean backdrop
/// (product-photography style). `original` keeps the image as is.
ImageBuffer swap_background(const ImageBuffer& image, const BinaryMask& modal,
                            CleanBackground clean);

/// Synthetic path: inpaint the occluder region of I_syn up to timestep k.
NoisyState denoise_synthetic(const ImageBuffer& i_syn, const BinaryMask& occ,
                             const std::string& prompt, int k,
                             DiffusionBackend& diffusion);

/// Background path: remove query + occluders, then add noise to timestep k.
NoisyState object_removed_background(const ImageBuffer& image, const BinaryMask& modal,
                                     const BinaryMask& occ, int k,
                                     const BackendSet& backends);

/// Cluster decoder features of the noisy synthetic image and pick the
/// clusters aligned with the modal mask. The result always satisfies
/// modal ⊆ mask ⊆ modal ∪ occ.
std::pair<BinaryMask, ClusterDiagnostics> segment_noisy_object(
    const NoisyState& state, const BinaryMask& modal, const BinaryMask& occ,
    const PipelineConfig& config, DiffusionBackend& diffusion);

/// Per-pixel selection: syn where mask, bg elsewhere, at the shared timestep.
NoisyState composite(const NoisyState& syn_k, const NoisyState& bg_k,
                     const BinaryMask& amodal_k, DiffusionBackend& diffusion);

/// Run the remaining N-k steps over the occluder mask and decode.
ImageBuffer resume(const NoisyState& composited, const BinaryMask& occ,
                   const std::string& prompt, int total_steps,
                   DiffusionBackend& diffusion);

/// Mixed Context Diffusion Sampling, end to end on one framed crop.
std::pair<ImageBuffer, McTrace> mixed_context_complete(const FramedInputs& framed,
                                                       const std::string& prompt,
                                                       const PipelineConfig& config,
                                                       const BackendSet& backends);

/// Single full-range inpaint over the occluder mask (no mixed context).
ImageBuffer plain_complete(const FramedInputs& framed, const std::string& prompt,
                           const PipelineConfig& config, const BackendSet& backends);

/// Baseline: outpaint everything exterior to the modal mask.
ImageBuffer naive_outpaint(const ImageBuffer& image, const BinaryMask& modal,
                           const std::string& prompt, const PipelineConfig& config,
                           const BackendSet& backends);

}  // namespace amodal
