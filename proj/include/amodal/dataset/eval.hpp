#pragma once

#include <filesystem>
#include <functional>
#include <nlohmann/json_fwd.hpp>
#include <optional>

#include "amodal/backends/backend.hpp"
#include "amodal/core/types.hpp"
#include "amodal/dataset/dataset.hpp"

namespace amodal {

/// Object pixels kept, everything else black. The canonical frame the
/// pixel-space metrics are computed in.
ImageBuffer extract_on_black(const ImageBuffer& image, const BinaryMask& mask);

double mask_iou(const BinaryMask& a, const BinaryMask& b);

/// One dataset sample, loaded back from disk.
struct EvalSample {
    std::string id;
    std::string difficulty;
    std::string category;
    std::string occluder_category;
    ImageBuffer occluded;
    BinaryMask modal;
    ImageBuffer gt_image;
    BinaryMask gt_mask;
    BinaryMask occluder_mask;
};

/// Per-sample backend supplier: mock evaluation rebuilds a scripted scene
/// from the sample's ground truth; remote evaluation returns one shared set.
using BackendFactory = std::function<BackendSet(const EvalSample&)>;

/// Scripted-scene factory answering from the sample's ground truth; element
/// identity tags are read off the stored images (pool images are expected to
/// be position-coded).
BackendFactory mock_backend_factory();

struct EvalOptions {
    std::string method = "mc";  // mc | plain | naive | external
    SamplerKind sampler = SamplerKind::mc;
    std::vector<std::string> metrics{"iou", "l1", "psnr"};
    // For method "external": a flat directory of <id>.png + <id>.mask.png.
    std::optional<std::filesystem::path> results_dir;
    PipelineConfig config;
};

/// Run (or load) completions for every sample and aggregate metric means
/// split by difficulty. Perceptual metrics need a configured metric backend
/// and are skipped with a notice otherwise.
nlohmann::json evaluate(const std::filesystem::path& dataset_dir,
                        const EvalOptions& options, const BackendFactory& factory);

/// Rows: method, difficulty, metric, mean, n.
std::string report_to_csv(const nlohmann::json& report);

}  // namespace amodal
