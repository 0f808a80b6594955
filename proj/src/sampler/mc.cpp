#include "amodal/sampler/mc.hpp"

#include "amodal/cluster/kmeans.hpp"

namespace amodal {

ImageBuffer swap_background(const ImageBuffer& image, const BinaryMask& modal,
                            CleanBackground clean) {
    if (!image.same_dims(modal)) throw DimensionError("swap_background: dims mismatch");
    if (clean == CleanBackground::original) return image;
    const ImageBuffer backdrop(image.width(), image.height(),
                               clean_background_color(clean));
    return image_blend(backdrop, image, modal);
}

NoisyState denoise_synthetic(const ImageBuffer& i_syn, const BinaryMask& occ,
                             const std::string& prompt, int k,
                             DiffusionBackend& diffusion) {
    if (mask_area(occ) == 0) return diffusion.add_noise(i_syn, k);
    return diffusion.diffuse_from_image(i_syn, occ, prompt, k);
}

NoisyState object_removed_background(const ImageBuffer& image, const BinaryMask& modal,
                                     const BinaryMask& occ, int k,
                                     const BackendSet& backends) {
    const BinaryMask removal_mask = mask_union(modal, occ);
    const ImageBuffer clean = backends.removal->remove(image, removal_mask);
    return backends.diffusion->add_noise(clean, k);
}

std::pair<BinaryMask, ClusterDiagnostics> segment_noisy_object(
    const NoisyState& state, const BinaryMask& modal, const BinaryMask& occ,
    const PipelineConfig& config, DiffusionBackend& diffusion) {
    if (!modal.same_dims(occ)) throw DimensionError("segment_noisy_object: dims mismatch");
    const FeatureMap features =
        diffusion.extract_decoder_features(state, config.decoder_layer);
    const KMeansResult clustered = kmeans(features.values, config.cluster_count);

    // Nearest-neighbor upsample of the assignment grid to crop resolution.
    const int w = modal.width();
    const int h = modal.height();
    ClusterDiagnostics diag;
    diag.k_effective = clustered.k_effective;
    diag.assignments.resize(h, w);
    for (int y = 0; y < h; ++y) {
        const int gy = static_cast<int>(static_cast<std::int64_t>(y) * features.grid_h / h);
        for (int x = 0; x < w; ++x) {
            const int gx =
                static_cast<int>(static_cast<std::int64_t>(x) * features.grid_w / w);
            diag.assignments(y, x) = static_cast<std::uint8_t>(
                clustered.assignments(static_cast<Eigen::Index>(gy) * features.grid_w + gx));
        }
    }

    BinaryMask selected(w, h);
    diag.ratios.assign(static_cast<std::size_t>(clustered.k_effective), -1.0);
    for (int c = 0; c < clustered.k_effective; ++c) {
        BinaryMask cluster_mask(MaskArray(diag.assignments.cast<int>() == c));
        if (mask_area(cluster_mask) == 0) continue;
        const double ratio = overlap_ratio(cluster_mask, modal);
        diag.ratios[static_cast<std::size_t>(c)] = ratio;
        if (ratio > config.overlap_threshold) {
            diag.chosen.insert(c);
            selected = mask_union(selected, cluster_mask);
        }
    }

    // Include the modal mask, constrain to modal ∪ occ. When nothing passes
    // the threshold this degrades to modal alone, which still makes progress.
    BinaryMask result = mask_intersect(mask_union(selected, modal), mask_union(modal, occ));
    return {std::move(result), std::move(diag)};
}

NoisyState composite(const NoisyState& syn_k, const NoisyState& bg_k,
                     const BinaryMask& amodal_k, DiffusionBackend& diffusion) {
    if (syn_k.timestep != bg_k.timestep) {
        throw ContractError("composite: timestep mismatch");
    }
    if (syn_k.width != bg_k.width || syn_k.height != bg_k.height ||
        syn_k.width != amodal_k.width() || syn_k.height != amodal_k.height()) {
        throw DimensionError("composite: dims mismatch");
    }
    const ImageBuffer syn = diffusion.decode(syn_k);
    const ImageBuffer bg = diffusion.decode(bg_k);
    return diffusion.add_noise(image_blend(bg, syn, amodal_k), syn_k.timestep);
}

ImageBuffer resume(const NoisyState& composited, const BinaryMask& occ,
                   const std::string& prompt, int total_steps,
                   DiffusionBackend& diffusion) {
    if (mask_area(occ) == 0) {
        if (composited.timestep == total_steps) return diffusion.decode(composited);
        return diffusion.decode(
            diffusion.diffuse_from_state(composited, occ, prompt, total_steps));
    }
    return diffusion.decode(
        diffusion.diffuse_from_state(composited, occ, prompt, total_steps));
}

std::pair<ImageBuffer, McTrace> mixed_context_complete(const FramedInputs& framed,
                                                       const std::string& prompt,
                                                       const PipelineConfig& config,
                                                       const BackendSet& backends) {
    const int k = config.composite_step;
    McTrace trace;
    trace.i_syn = swap_background(framed.image, framed.modal, config.clean_background);
    trace.syn_k = denoise_synthetic(trace.i_syn, framed.occ_mask, prompt, k,
                                    *backends.diffusion);
    trace.bg_k = object_removed_background(framed.image, framed.modal, framed.occ_mask,
                                           k, backends);
    auto [amodal_k, diag] = segment_noisy_object(trace.syn_k, framed.modal,
                                                 framed.occ_mask, config,
                                                 *backends.diffusion);
    trace.amodal_k = std::move(amodal_k);
    trace.clusters = std::move(diag);
    trace.composited = composite(trace.syn_k, trace.bg_k, trace.amodal_k,
                                 *backends.diffusion);
    ImageBuffer out = resume(trace.composited, framed.occ_mask, prompt,
                             config.total_steps, *backends.diffusion);
    return {std::move(out), std::move(trace)};
}

ImageBuffer plain_complete(const FramedInputs& framed, const std::string& prompt,
                           const PipelineConfig& config, const BackendSet& backends) {
    if (mask_area(framed.occ_mask) == 0) return framed.image;
    return backends.diffusion->decode(backends.diffusion->diffuse_from_image(
        framed.image, framed.occ_mask, prompt, config.total_steps));
}

ImageBuffer naive_outpaint(const ImageBuffer& image, const BinaryMask& modal,
                           const std::string& prompt, const PipelineConfig& config,
                           const BackendSet& backends) {
    const BinaryMask outside = mask_complement(modal);
    if (mask_area(outside) == 0) return image;
    return backends.diffusion->decode(backends.diffusion->diffuse_from_image(
        image, outside, prompt, config.total_steps));
}

}  // namespace amodal
