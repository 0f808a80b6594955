#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "amodal/core/error.hpp"
#include "amodal/core/image.hpp"

namespace amodal {

/// The user's object selection: prompt text plus an optional seed point
/// used to pick among segmenter instances.
struct QuerySpec {
    std::string category;
    std::optional<std::pair<int, int>> seed_point;  // (x, y)

    void validate() const {
        if (category.empty()) throw ContractError("QuerySpec: empty category");
    }
};

enum class CleanBackground { gray, white, black, forest, sky, original };

Rgb clean_background_color(CleanBackground bg);
std::string to_string(CleanBackground bg);
CleanBackground clean_background_from_string(const std::string& s);

enum class SamplerKind { mc, plain, naive };
std::string to_string(SamplerKind s);
SamplerKind sampler_from_string(const std::string& s);

struct PipelineConfig {
    int total_steps = 50;        // N
    int composite_step = 20;     // k
    int decoder_layer = 3;       // l, in [1, 4]
    double overlap_threshold = 0.20;
    int pad_alpha = 60;          // crop margin, pixels per side
    int pad_beta = 60;           // extra margin for boundary-touching objects
    int boundary_eps = 10;       // lambda
    int curation_gamma = 2;      // boundary proximity, pixels
    int curation_delta = 4;      // dilation iterations
    double curation_epsilon = 1.2;  // area-ratio threshold
    double corner_frac = 0.15;   // counterfactual corner square, frac of short side
    CleanBackground clean_background = CleanBackground::gray;
    int cluster_count = 6;
    int max_iterations = 5;
    int neighbor_radius = 5;     // modal dilation when finding neighbors
    int occluder_dilation_px = 2;  // swallow anti-aliased seams
    std::uint64_t rng_seed = 0;
    std::vector<std::string> open_vocabulary;  // extra segmenter vocabulary

    void validate() const;
};

}  // namespace amodal
