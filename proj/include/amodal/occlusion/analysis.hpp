#pragma once

#include <nlohmann/json_fwd.hpp>
#include <set>
#include <vector>

#include "amodal/backends/backend.hpp"
#include "amodal/core/mask.hpp"
#include "amodal/core/types.hpp"

namespace amodal {

/// Result of one mask-analysis pass: who hides the query object, and
/// whether the image boundary counts as an occluder.
struct OcclusionReport {
    std::vector<BinaryMask> neighbor_masks;
    std::vector<BinaryMask> occluder_masks;  // subset of neighbor_masks
    BinaryMask occluder_union;               // clipped to exclude modal pixels
    std::set<Side> boundary_sides;
    bool is_occluded = false;

    nlohmann::json to_json() const;
};

/// Instances whose mask intersects dilate(modal, radius), the query
/// instance itself excluded (any instance mostly inside modal).
std::vector<BinaryMask> find_neighbors(const InstanceSet& instances,
                                       const BinaryMask& modal, int radius);

/// Neighbors judged closer to the camera than the modal mask.
/// Unknown verdicts are not occluders.
std::vector<BinaryMask> select_occluders(const ImageBuffer& image,
                                         const BinaryMask& modal,
                                         const std::vector<BinaryMask>& neighbors,
                                         DepthBackend& depth);

OcclusionReport build_occlusion_report(const ImageBuffer& image, const BinaryMask& modal,
                                       const PipelineConfig& config,
                                       const BackendSet& backends);

/// Segmenter vocabulary for a query: its category plus the configured
/// open-vocabulary list.
std::vector<std::string> segmentation_vocabulary(const std::string& category,
                                                 const PipelineConfig& config);

}  // namespace amodal
