#include "amodal/occlusion/analysis.hpp"

#include <nlohmann/json.hpp>

namespace amodal {

namespace {

// Chebyshev dilation by an exact pixel radius (the 5x5 morphology kernel
// moves in 2 px quanta, too coarse for the neighbor test).
BinaryMask dilate_by_px(const BinaryMask& m, int radius) {
    if (radius <= 0) return m;
    const int w = m.width();
    const int h = m.height();
    BinaryMask out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!m.at(x, y)) continue;
            const int y0 = std::max(0, y - radius), y1 = std::min(h - 1, y + radius);
            const int x0 = std::max(0, x - radius), x1 = std::min(w - 1, x + radius);
            for (int yy = y0; yy <= y1; ++yy)
                for (int xx = x0; xx <= x1; ++xx) out.set(xx, yy, true);
        }
    }
    return out;
}

const char* side_name(Side s) {
    switch (s) {
        case Side::left: return "left";
        case Side::right: return "right";
        case Side::top: return "top";
        case Side::bottom: return "bottom";
    }
    return "?";
}

}  // namespace

nlohmann::json OcclusionReport::to_json() const {
    nlohmann::json sides = nlohmann::json::array();
    for (Side s : boundary_sides) sides.push_back(side_name(s));
    nlohmann::json occluders = nlohmann::json::array();
    for (const auto& m : occluder_masks) occluders.push_back(mask_area(m));
    return nlohmann::json{{"neighbor_count", neighbor_masks.size()},
                          {"occluder_count", occluder_masks.size()},
                          {"occluder_areas", occluders},
                          {"occluder_union_area", mask_area(occluder_union)},
                          {"boundary_sides", sides},
                          {"is_occluded", is_occluded}};
}

std::vector<BinaryMask> find_neighbors(const InstanceSet& instances,
                                       const BinaryMask& modal, int radius) {
    const BinaryMask reach = dilate_by_px(modal, radius);
    std::vector<BinaryMask> out;
    for (const auto& inst : instances) {
        if (!inst.mask.same_dims(modal)) {
            throw DimensionError("find_neighbors: instance/modal dims mismatch");
        }
        if (mask_area(inst.mask) == 0) continue;
        // Skip the query instance itself: majority overlap with modal.
        const std::int64_t inter = mask_area(mask_intersect(inst.mask, modal));
        if (2 * inter > mask_area(inst.mask)) continue;
        if (mask_area(mask_intersect(inst.mask, reach)) > 0) out.push_back(inst.mask);
    }
    return out;
}

std::vector<BinaryMask> select_occluders(const ImageBuffer& image,
                                         const BinaryMask& modal,
                                         const std::vector<BinaryMask>& neighbors,
                                         DepthBackend& depth) {
    std::vector<BinaryMask> out;
    for (const auto& n : neighbors) {
        if (depth.order(image, n, modal) == DepthVerdict::first_closer) {
            out.push_back(n);
        }
    }
    return out;
}

OcclusionReport build_occlusion_report(const ImageBuffer& image, const BinaryMask& modal,
                                       const PipelineConfig& config,
                                       const BackendSet& backends) {
    if (!image.same_dims(modal)) {
        throw DimensionError("build_occlusion_report: image/modal dims mismatch");
    }
    OcclusionReport report;
    const InstanceSet instances =
        backends.segmentation->segment(image, config.open_vocabulary);
    report.neighbor_masks = find_neighbors(instances, modal, config.neighbor_radius);
    report.occluder_masks =
        select_occluders(image, modal, report.neighbor_masks, *backends.depth);

    BinaryMask occ(modal.width(), modal.height());
    for (const auto& m : report.occluder_masks) {
        // Swallow anti-aliased seams around each occluder before unioning.
        occ = mask_union(occ, dilate_by_px(m, config.occluder_dilation_px));
    }
    report.occluder_union = mask_difference(occ, modal);
    report.boundary_sides = touches_boundary(modal, config.boundary_eps);
    report.is_occluded =
        mask_area(report.occluder_union) > 0 || !report.boundary_sides.empty();
    return report;
}

std::vector<std::string> segmentation_vocabulary(const std::string& category,
                                                 const PipelineConfig& config) {
    std::vector<std::string> vocab{category};
    for (const auto& v : config.open_vocabulary) {
        if (v != category) vocab.push_back(v);
    }
    return vocab;
}

}  // namespace amodal
