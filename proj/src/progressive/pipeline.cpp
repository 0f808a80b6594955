#include "amodal/progressive/pipeline.hpp"

#include <algorithm>
#include <cstdint>

namespace amodal {

std::string to_string(Termination t) {
    switch (t) {
        case Termination::unoccluded: return "unoccluded";
        case Termination::max_iterations: return "max_iterations";
    }
    throw ContractError("unknown termination");
}

BinaryMask resolve_query(const InstanceSet& instances, const QuerySpec& query) {
    query.validate();
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        if (instances[i].category == query.category &&
            mask_area(instances[i].mask) > 0) {
            candidates.push_back(i);
        }
    }
    if (candidates.empty()) {
        throw QueryResolutionError("no instance matches category '" + query.category +
                                   "'");
    }
    if (query.seed_point) {
        const auto [sx, sy] = *query.seed_point;
        std::vector<std::size_t> containing;
        for (std::size_t i : candidates) {
            const BinaryMask& m = instances[i].mask;
            if (sx >= 0 && sy >= 0 && sx < m.width() && sy < m.height() &&
                m.at(sx, sy)) {
                containing.push_back(i);
            }
        }
        if (!containing.empty()) candidates = std::move(containing);
    }
    const std::size_t best = *std::min_element(
        candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
            if (instances[a].score != instances[b].score) {
                return instances[a].score > instances[b].score;
            }
            const auto area_a = mask_area(instances[a].mask);
            const auto area_b = mask_area(instances[b].mask);
            if (area_a != area_b) return area_a > area_b;
            return a < b;
        });
    return instances[best].mask;
}

std::pair<BinaryMask, bool> new_amodal_mask(const ImageBuffer& completed,
                                            const BinaryMask& prev_modal,
                                            const QuerySpec& query,
                                            const PipelineConfig& config,
                                            const BackendSet& backends) {
    if (!completed.same_dims(prev_modal)) {
        throw DimensionError("new_amodal_mask: dims mismatch");
    }
    const InstanceSet instances = backends.segmentation->segment(
        completed, segmentation_vocabulary(query.category, config));

    std::int64_t best_overlap = 0;
    const BinaryMask* best = nullptr;
    for (const Instance& inst : instances) {
        if (!inst.mask.same_dims(prev_modal)) continue;
        const auto overlap = mask_area(mask_intersect(inst.mask, prev_modal));
        if (overlap > best_overlap) {
            best_overlap = overlap;
            best = &inst.mask;
        }
    }
    if (!best) return {prev_modal, true};
    return {mask_union(*best, prev_modal), false};
}

CompletionBundle run_pipeline(const ImageBuffer& image, const QuerySpec& query,
                              const PipelineConfig& config, const BackendSet& backends,
                              SamplerKind sampler) {
    query.validate();
    config.validate();
    if (!backends.diffusion || !backends.segmentation || !backends.depth ||
        !backends.removal) {
        throw ContractError("run_pipeline: incomplete backend set");
    }
    backends.diffusion->set_seed(config.rng_seed);

    CompletionBundle bundle;
    bundle.original = image;
    bundle.query = query;
    bundle.config = config;
    bundle.sampler = sampler;

    const InstanceSet instances = backends.segmentation->segment(
        image, segmentation_vocabulary(query.category, config));
    bundle.original_modal = resolve_query(instances, query);

    ImageBuffer frame = image;
    BinaryMask mask = bundle.original_modal;
    int sampled = 0;

    while (true) {
        IterationRecord rec;
        rec.input_image = frame;
        rec.input_modal = mask;
        rec.report = build_occlusion_report(frame, mask, config, backends);

        if (!rec.report.is_occluded) {
            bundle.termination = Termination::unoccluded;
            if (bundle.iterations.empty()) {
                // Report-only record: the object was never occluded.
                rec.amodal_mask = mask;
                bundle.iterations.push_back(std::move(rec));
            }
            break;
        }
        if (sampled == config.max_iterations) {
            bundle.termination = Termination::max_iterations;
            break;
        }

        PaddedInputs padded =
            conditional_pad(frame, rec.report.occluder_union, mask,
                            rec.report.boundary_sides, config);
        FramedInputs framed =
            square_crop(padded, !rec.report.boundary_sides.empty(), config);

        ImageBuffer completed;
        switch (sampler) {
            case SamplerKind::mc: {
                auto [out, trace] =
                    mixed_context_complete(framed, query.category, config, backends);
                completed = std::move(out);
                rec.trace = std::move(trace);
                break;
            }
            case SamplerKind::plain:
                completed = plain_complete(framed, query.category, config, backends);
                break;
            case SamplerKind::naive:
                completed = naive_outpaint(framed.image, framed.modal, query.category,
                                           config, backends);
                break;
        }

        auto [crop_mask, fallback] =
            new_amodal_mask(completed, framed.modal, query, config, backends);
        rec.sampled = true;
        rec.transform = framed.transform;
        rec.completed_crop = completed;
        rec.segmenter_fallback = fallback;

        ImageBuffer next_frame = padded.image;
        image_paste(next_frame, completed, framed.transform.crop.x0,
                    framed.transform.crop.y0);
        BinaryMask next_mask = padded.modal;
        mask_paste(next_mask, crop_mask, framed.transform.crop.x0,
                   framed.transform.crop.y0);
        rec.amodal_mask = next_mask;

        bundle.origin_x += padded.transform.pad_left;
        bundle.origin_y += padded.transform.pad_top;
        frame = std::move(next_frame);
        mask = std::move(next_mask);
        ++sampled;
        bundle.iterations.push_back(std::move(rec));
    }

    bundle.final_image = frame;
    bundle.final_mask = mask;

    FrameTransform t;
    t.pad_left = bundle.origin_x;
    t.pad_top = bundle.origin_y;
    t.pad_right = frame.width() - image.width() - bundle.origin_x;
    t.pad_bottom = frame.height() - image.height() - bundle.origin_y;
    t.crop = BBox{0, 0, frame.width(), frame.height()};
    t.original_w = image.width();
    t.original_h = image.height();
    t.framed_w = frame.width();
    t.framed_h = frame.height();
    bundle.overlay = uncrop_overlay(frame, mask, t, image);
    return bundle;
}

}  // namespace amodal
