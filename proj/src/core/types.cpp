#include "amodal/core/types.hpp"

namespace amodal {

Rgb clean_background_color(CleanBackground bg) {
    switch (bg) {
        case CleanBackground::gray: return {128, 128, 128};
        case CleanBackground::white: return {255, 255, 255};
        case CleanBackground::black: return {0, 0, 0};
        case CleanBackground::forest: return {34, 85, 34};
        case CleanBackground::sky: return {135, 206, 235};
        case CleanBackground::original: break;
    }
    throw ContractError("clean_background_color: 'original' has no swap color");
}

std::string to_string(CleanBackground bg) {
    switch (bg) {
        case CleanBackground::gray: return "gray";
        case CleanBackground::white: return "white";
        case CleanBackground::black: return "black";
        case CleanBackground::forest: return "forest";
        case CleanBackground::sky: return "sky";
        case CleanBackground::original: return "original";
    }
    return "gray";
}

CleanBackground clean_background_from_string(const std::string& s) {
    if (s == "gray") return CleanBackground::gray;
    if (s == "white") return CleanBackground::white;
    if (s == "black") return CleanBackground::black;
    if (s == "forest") return CleanBackground::forest;
    if (s == "sky") return CleanBackground::sky;
    if (s == "original") return CleanBackground::original;
    throw ContractError("unknown clean background: " + s);
}

std::string to_string(SamplerKind s) {
    switch (s) {
        case SamplerKind::mc: return "mc";
        case SamplerKind::plain: return "plain";
        case SamplerKind::naive: return "naive";
    }
    return "mc";
}

SamplerKind sampler_from_string(const std::string& s) {
    if (s == "mc") return SamplerKind::mc;
    if (s == "plain") return SamplerKind::plain;
    if (s == "naive") return SamplerKind::naive;
    throw ContractError("unknown sampler: " + s);
}

void PipelineConfig::validate() const {
    if (total_steps < 1) throw ContractError("config: total_steps < 1");
    if (composite_step <= 0 || composite_step >= total_steps) {
        throw ContractError("config: need 0 < composite_step < total_steps");
    }
    if (decoder_layer < 1 || decoder_layer > 4) {
        throw ContractError("config: decoder_layer outside [1,4]");
    }
    if (overlap_threshold <= 0.0) throw ContractError("config: overlap_threshold <= 0");
    if (pad_alpha < 0 || pad_beta < 0) throw ContractError("config: negative padding");
    if (boundary_eps <= 0) throw ContractError("config: boundary_eps <= 0");
    if (curation_gamma <= 0) throw ContractError("config: curation_gamma <= 0");
    if (curation_delta < 0) throw ContractError("config: curation_delta < 0");
    if (curation_epsilon <= 1.0) throw ContractError("config: curation_epsilon <= 1");
    if (corner_frac <= 0.0 || corner_frac >= 0.5) {
        throw ContractError("config: corner_frac outside (0, 0.5)");
    }
    if (cluster_count < 1) throw ContractError("config: cluster_count < 1");
    if (max_iterations < 1) throw ContractError("config: max_iterations < 1");
    if (neighbor_radius < 0) throw ContractError("config: neighbor_radius < 0");
    if (occluder_dilation_px < 0) throw ContractError("config: occluder_dilation_px < 0");
}

}  // namespace amodal
