#include "cli_config.hpp"

#include <cstdlib>
#include <fstream>
#include <nlohmann/json.hpp>

#include "amodal/backends/mock.hpp"
#include "amodal/backends/remote.hpp"
#include "amodal/core/serialize.hpp"

namespace amodal::cli {

AppConfig load_app_config(const std::optional<std::string>& config_path) {
    AppConfig out;
    if (config_path) {
        std::ifstream in(*config_path);
        if (!in) throw ContractError("cannot open config file: " + *config_path);
        nlohmann::json doc;
        try {
            in >> doc;
        } catch (const nlohmann::json::exception& e) {
            throw ContractError("bad config file: " + std::string(e.what()));
        }
        nlohmann::json pipeline = doc;
        if (doc.contains("backends")) {
            const auto& b = doc.at("backends");
            out.backends.mode = b.value("mode", out.backends.mode);
            out.backends.url = b.value("url", out.backends.url);
            out.backends.scene = b.value("scene", out.backends.scene);
            pipeline.erase("backends");
        }
        out.pipeline = config_from_json(pipeline, out.pipeline);
    }
    if (const char* url = std::getenv("AMODAL_BACKEND_URL")) {
        out.backends.url = url;
    }
    if (out.backends.mode != "mock" && out.backends.mode != "remote") {
        throw ContractError("backends.mode must be mock or remote");
    }
    return out;
}

BackendSet make_backends(const AppConfig& config, bool with_metric) {
    if (config.backends.mode == "remote") {
        return make_remote_backends(config.backends.url, config.pipeline.total_steps,
                                    with_metric);
    }
    if (config.backends.scene.empty()) {
        throw ContractError("mock backends need a scene (--scene or config)");
    }
    const ScriptedScene scene = load_scene_json(config.backends.scene);
    return make_mock_backends(scene, config.pipeline.total_steps, with_metric);
}

}  // namespace amodal::cli
