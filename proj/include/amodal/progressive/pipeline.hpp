#pragma once

#include <optional>
#include <vector>

#include "amodal/backends/backend.hpp"
#include "amodal/core/types.hpp"
#include "amodal/framing/framing.hpp"
#include "amodal/occlusion/analysis.hpp"
#include "amodal/sampler/mc.hpp"

namespace amodal {

/// One pass of the progressive loop. When `sampled` is false the record is
/// report-only (the object was already unoccluded) and `transform`,
/// `completed_crop` and `trace` are meaningless.
struct IterationRecord {
    ImageBuffer input_image;  // working frame at iteration start
    BinaryMask input_modal;
    OcclusionReport report;
    bool sampled = false;
    FrameTransform transform;
    ImageBuffer completed_crop;
    BinaryMask amodal_mask;  // working frame at iteration end
    std::optional<McTrace> trace;
    bool segmenter_fallback = false;  // re-segmentation found no overlap
};

enum class Termination { unoccluded, max_iterations };
std::string to_string(Termination t);

struct CompletionBundle {
    ImageBuffer original;
    BinaryMask original_modal;
    ImageBuffer final_image;  // working frame: original plus accumulated padding
    BinaryMask final_mask;    // amodal mask in working-frame coordinates
    ImageBuffer overlay;      // completed object written back over the original
    // Where the original's top-left corner sits in the working frame.
    int origin_x = 0;
    int origin_y = 0;
    std::vector<IterationRecord> iterations;
    QuerySpec query;
    PipelineConfig config;
    SamplerKind sampler = SamplerKind::mc;
    Termination termination = Termination::unoccluded;
};

/// Pick the instance matching the query. Tie-break order: category match,
/// then seed-point containment, then maximal score, then maximal area, then
/// lowest instance index. Throws QueryResolutionError when nothing matches.
BinaryMask resolve_query(const InstanceSet& instances, const QuerySpec& query);

/// Segment the completed crop again and grow the modal mask: the instance
/// overlapping the previous modal mask most, unioned with it. Falls back to
/// the previous mask (flag set) when no instance overlaps.
std::pair<BinaryMask, bool> new_amodal_mask(const ImageBuffer& completed,
                                            const BinaryMask& prev_modal,
                                            const QuerySpec& query,
                                            const PipelineConfig& config,
                                            const BackendSet& backends);

/// The full progressive occlusion-removal loop.
CompletionBundle run_pipeline(const ImageBuffer& image, const QuerySpec& query,
                              const PipelineConfig& config, const BackendSet& backends,
                              SamplerKind sampler);

}  // namespace amodal
