#include "amodal/curation/curation.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>

#include "amodal/progressive/pipeline.hpp"

namespace amodal {

std::string to_string(CurationLabel l) {
    return l == CurationLabel::complete ? "complete" : "incomplete";
}

std::string to_string(CurationReason r) {
    switch (r) {
        case CurationReason::boundary_proximity: return "boundary_proximity";
        case CurationReason::contained_in_dilation: return "contained_in_dilation";
        case CurationReason::major_extension: return "major_extension";
        case CurationReason::minor_extension_tolerated:
            return "minor_extension_tolerated";
    }
    throw ContractError("unknown curation reason");
}

BinaryMask counterfactual_mask(const BinaryMask& amodal, double corner_frac) {
    if (corner_frac < 0.0 || corner_frac > 0.5) {
        throw ContractError("counterfactual_mask: corner_frac out of [0, 0.5]");
    }
    const int w = amodal.width();
    const int h = amodal.height();
    const int side =
        static_cast<int>(std::lround(corner_frac * std::min(w, h)));

    BinaryMask keep = amodal;
    for (int y = 0; y < h; ++y) {
        const bool y_corner = y < side || y >= h - side;
        if (!y_corner) continue;
        for (int x = 0; x < w; ++x) {
            if (x < side || x >= w - side) keep.set(x, y, true);
        }
    }
    return mask_complement(keep);
}

std::pair<CurationLabel, CurationReason> decide_completion(const BinaryMask& amodal,
                                                           const BinaryMask& m_prime,
                                                           int gamma, int delta,
                                                           double epsilon) {
    if (!amodal.same_dims(m_prime)) {
        throw DimensionError("decide_completion: dims mismatch");
    }
    if (mask_area(amodal) == 0) throw ContractError("decide_completion: empty mask");

    if (!touches_boundary(m_prime, gamma).empty()) {
        return {CurationLabel::incomplete, CurationReason::boundary_proximity};
    }
    if (mask_subset(m_prime, mask_dilate(amodal, delta))) {
        return {CurationLabel::complete, CurationReason::contained_in_dilation};
    }
    const double ratio = static_cast<double>(mask_area(m_prime)) /
                         static_cast<double>(mask_area(amodal));
    if (ratio > epsilon) {
        return {CurationLabel::incomplete, CurationReason::major_extension};
    }
    return {CurationLabel::complete, CurationReason::minor_extension_tolerated};
}

CurationVerdict classify_completion(const ImageBuffer& i_amodal,
                                    const BinaryMask& m_amodal,
                                    const std::string& prompt,
                                    const PipelineConfig& config,
                                    const BackendSet& backends) {
    if (!i_amodal.same_dims(m_amodal)) {
        throw DimensionError("classify_completion: dims mismatch");
    }
    if (mask_area(m_amodal) == 0) {
        throw ContractError("classify_completion: empty amodal mask");
    }

    CurationVerdict v;
    const BinaryMask outpaint = counterfactual_mask(m_amodal, config.corner_frac);
    if (mask_area(outpaint) == 0) {
        v.i_prime = i_amodal;
    } else {
        v.i_prime = backends.diffusion->decode(backends.diffusion->diffuse_from_image(
            i_amodal, outpaint, prompt, config.total_steps));
    }

    QuerySpec query{prompt, std::nullopt};
    auto [m_prime, fallback] =
        new_amodal_mask(v.i_prime, m_amodal, query, config, backends);
    (void)fallback;  // falling back to M itself reads as complete, which is fine
    v.m_prime = std::move(m_prime);
    v.area_ratio = static_cast<double>(mask_area(v.m_prime)) /
                   static_cast<double>(mask_area(m_amodal));
    std::tie(v.label, v.reason) =
        decide_completion(m_amodal, v.m_prime, config.curation_gamma,
                          config.curation_delta, config.curation_epsilon);
    return v;
}

nlohmann::json curation_metrics(int tp, int tn, int fp, int fn) {
    const int total = tp + tn + fp + fn;
    nlohmann::json out{{"tp", tp}, {"tn", tn}, {"fp", fp}, {"fn", fn},
                       {"n", total}};
    out["accuracy"] =
        total > 0 ? static_cast<double>(tp + tn) / total : 0.0;
    out["precision"] =
        tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
    out["recall"] = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
    return out;
}

nlohmann::json curate_batch(const std::vector<CurationItem>& items,
                            const PipelineConfig& config, const BackendSet& backends) {
    nlohmann::json rows = nlohmann::json::array();
    int tp = 0, tn = 0, fp = 0, fn = 0;
    bool any_labels = false;

    for (const CurationItem& item : items) {
        const CurationVerdict v =
            classify_completion(item.image, item.mask, item.category, config, backends);
        nlohmann::json row{{"id", item.id},
                           {"category", item.category},
                           {"label", to_string(v.label)},
                           {"reason", to_string(v.reason)},
                           {"area_ratio", v.area_ratio}};
        if (item.label_complete) {
            any_labels = true;
            const bool truth = *item.label_complete;
            const bool pred = v.label == CurationLabel::complete;
            row["ground_truth"] = truth ? "complete" : "incomplete";
            if (pred && truth) ++tp;
            else if (!pred && !truth) ++tn;
            else if (pred && !truth) ++fp;
            else ++fn;
        }
        rows.push_back(std::move(row));
    }

    nlohmann::json out{{"items", std::move(rows)}};
    if (any_labels) out["metrics"] = curation_metrics(tp, tn, fp, fn);
    return out;
}

}  // namespace amodal
