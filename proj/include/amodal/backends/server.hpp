#pragma once

#include <memory>
#include <string>

#include "amodal/backends/backend.hpp"

namespace amodal {

/// Serves any BackendSet over the /v1/ wire protocol so remote adapters can
/// talk to it. NoisyStates stay server-side behind opaque tokens.
class BackendHttpServer {
public:
    BackendHttpServer(BackendSet backends, std::string name, std::string version);
    ~BackendHttpServer();

    /// Bind to 127.0.0.1 on a free port and serve from a background thread.
    int start();
    void stop();
    int port() const { return port_; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    int port_ = 0;
};

}  // namespace amodal
