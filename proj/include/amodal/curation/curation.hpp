#pragma once

#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <string>
#include <vector>

#include "amodal/backends/backend.hpp"
#include "amodal/core/image.hpp"
#include "amodal/core/mask.hpp"
#include "amodal/core/types.hpp"

namespace amodal {

enum class CurationLabel { complete, incomplete };
enum class CurationReason {
    boundary_proximity,
    contained_in_dilation,
    major_extension,
    minor_extension_tolerated,
};

std::string to_string(CurationLabel l);
std::string to_string(CurationReason r);

struct CurationVerdict {
    CurationLabel label = CurationLabel::complete;
    CurationReason reason = CurationReason::contained_in_dilation;
    BinaryMask m_prime;
    double area_ratio = 0.0;
    ImageBuffer i_prime;
};

/// Outpaint target for the counterfactual: everything except the candidate
/// amodal mask and four corner squares of side corner_frac * min(H, W).
/// The preserved corners anchor the outpainter to a plausible background.
BinaryMask counterfactual_mask(const BinaryMask& amodal, double corner_frac);

/// The pure decision rule, no backends involved. Order: any re-extracted
/// pixel within gamma of the boundary -> incomplete; containment in
/// dilate(amodal, delta) -> complete; area grown past epsilon -> incomplete;
/// otherwise the minor extension is tolerated.
std::pair<CurationLabel, CurationReason> decide_completion(const BinaryMask& amodal,
                                                           const BinaryMask& m_prime,
                                                           int gamma, int delta,
                                                           double epsilon);

/// Full counterfactual check: outpaint around the candidate, re-extract its
/// mask, then apply the decision rule.
CurationVerdict classify_completion(const ImageBuffer& i_amodal,
                                    const BinaryMask& m_amodal,
                                    const std::string& prompt,
                                    const PipelineConfig& config,
                                    const BackendSet& backends);

struct CurationItem {
    std::string id;
    ImageBuffer image;
    BinaryMask mask;
    std::string category;
    std::optional<bool> label_complete;  // ground truth, when known
};

/// Accuracy / precision / recall with "complete" as the positive class.
nlohmann::json curation_metrics(int tp, int tn, int fp, int fn);

/// Verdict per item plus aggregate metrics when ground-truth labels exist.
nlohmann::json curate_batch(const std::vector<CurationItem>& items,
                            const PipelineConfig& config, const BackendSet& backends);

}  // namespace amodal
