#include "amodal/core/serialize.hpp"

#include <set>

namespace amodal {

nlohmann::json config_to_json(const PipelineConfig& c) {
    return nlohmann::json{
        {"total_steps", c.total_steps},
        {"composite_step", c.composite_step},
        {"decoder_layer", c.decoder_layer},
        {"overlap_threshold", c.overlap_threshold},
        {"pad_alpha", c.pad_alpha},
        {"pad_beta", c.pad_beta},
        {"boundary_eps", c.boundary_eps},
        {"curation_gamma", c.curation_gamma},
        {"curation_delta", c.curation_delta},
        {"curation_epsilon", c.curation_epsilon},
        {"corner_frac", c.corner_frac},
        {"clean_background", to_string(c.clean_background)},
        {"cluster_count", c.cluster_count},
        {"max_iterations", c.max_iterations},
        {"neighbor_radius", c.neighbor_radius},
        {"occluder_dilation_px", c.occluder_dilation_px},
        {"rng_seed", c.rng_seed},
        {"open_vocabulary", c.open_vocabulary},
    };
}

PipelineConfig config_from_json(const nlohmann::json& j, PipelineConfig base) {
    if (!j.is_object()) throw ContractError("config: expected a JSON object");
    static const std::set<std::string> known = {
        "total_steps",     "composite_step",   "decoder_layer",
        "overlap_threshold", "pad_alpha",      "pad_beta",
        "boundary_eps",    "curation_gamma",   "curation_delta",
        "curation_epsilon", "corner_frac",     "clean_background",
        "cluster_count",   "max_iterations",   "neighbor_radius",
        "occluder_dilation_px", "rng_seed",    "open_vocabulary",
    };
    for (const auto& [key, _] : j.items()) {
        if (!known.count(key)) throw ContractError("config: unknown key '" + key + "'");
    }

    const auto get = [&j](const char* key, auto& out) {
        if (j.contains(key)) j.at(key).get_to(out);
    };
    get("total_steps", base.total_steps);
    get("composite_step", base.composite_step);
    get("decoder_layer", base.decoder_layer);
    get("overlap_threshold", base.overlap_threshold);
    get("pad_alpha", base.pad_alpha);
    get("pad_beta", base.pad_beta);
    get("boundary_eps", base.boundary_eps);
    get("curation_gamma", base.curation_gamma);
    get("curation_delta", base.curation_delta);
    get("curation_epsilon", base.curation_epsilon);
    get("corner_frac", base.corner_frac);
    if (j.contains("clean_background")) {
        base.clean_background =
            clean_background_from_string(j.at("clean_background").get<std::string>());
    }
    get("cluster_count", base.cluster_count);
    get("max_iterations", base.max_iterations);
    get("neighbor_radius", base.neighbor_radius);
    get("occluder_dilation_px", base.occluder_dilation_px);
    get("rng_seed", base.rng_seed);
    get("open_vocabulary", base.open_vocabulary);
    base.validate();
    return base;
}

}  // namespace amodal
