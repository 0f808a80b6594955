#pragma once

#include <optional>
#include <string>

#include "amodal/backends/backend.hpp"
#include "amodal/core/types.hpp"

namespace amodal::cli {

// Exit-code taxonomy shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitQueryResolution = 3;
inline constexpr int kExitBackendTransport = 4;
inline constexpr int kExitBackendContract = 5;

struct BackendConfig {
    std::string mode = "mock";  // mock | remote
    std::string url = "http://127.0.0.1:8800";
    std::string scene;  // scene JSON path, mock mode
};

/// Everything a run needs, before flag overrides.
struct AppConfig {
    PipelineConfig pipeline;
    BackendConfig backends;
};

/// Precedence: flags (applied by the caller) > environment > config file >
/// defaults. AMODAL_BACKEND_URL overrides the endpoint only.
AppConfig load_app_config(const std::optional<std::string>& config_path);

/// Build the configured backend set; `with_metric` wires the optional
/// similarity-metric backend too.
BackendSet make_backends(const AppConfig& config, bool with_metric);

}  // namespace amodal::cli
