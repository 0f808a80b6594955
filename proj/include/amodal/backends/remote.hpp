#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "amodal/backends/backend.hpp"

namespace amodal {

// Versioned JSON-over-HTTP adapter. One endpoint per operation under
// /v1/: diffuse, add_noise, decode, features, segment, order_depth,
// remove, metric, ping. Images and masks travel as base64 PNG; a remote
// NoisyState is an opaque server-issued token.
inline constexpr int kWireProtocolVersion = 1;

struct PingResult {
    std::string name;
    std::string version;
    int protocol = 0;
};

/// Shared HTTP plumbing: request shaping, retries, error taxonomy.
/// Connection failures and 5xx surface as TransportError (retryable);
/// malformed payloads and 4xx as ContractError.
class RemoteChannel {
public:
    explicit RemoteChannel(std::string base_url, int retries = 2);
    ~RemoteChannel();

    std::string post(const std::string& path, const std::string& body);
    PingResult ping(const std::string& echo);
    const std::string& base_url() const { return base_url_; }

private:
    struct Impl;
    std::string base_url_;
    int retries_;
    std::unique_ptr<Impl> impl_;
};

class RemoteDiffusionBackend : public DiffusionBackend {
public:
    RemoteDiffusionBackend(std::shared_ptr<RemoteChannel> channel, int total_steps = 50);

    std::string name() const override { return "remote-diffusion"; }
    std::string version() const override;

    NoisyState diffuse_from_image(const ImageBuffer& image, const BinaryMask& mask,
                                  const std::string& prompt, int e) override;
    NoisyState diffuse_from_state(const NoisyState& state, const BinaryMask& mask,
                                  const std::string& prompt, int e) override;
    NoisyState add_noise(const ImageBuffer& image, int k) override;
    ImageBuffer decode(const NoisyState& state) override;
    FeatureMap extract_decoder_features(const NoisyState& state, int layer) override;
    int total_steps() const override { return total_steps_; }
    void set_seed(std::uint64_t seed) override { seed_ = seed; }

private:
    std::shared_ptr<RemoteChannel> channel_;
    int total_steps_;
    std::uint64_t seed_ = 0;
};

class RemoteSegmentationBackend : public SegmentationBackend {
public:
    explicit RemoteSegmentationBackend(std::shared_ptr<RemoteChannel> channel)
        : channel_(std::move(channel)) {}
    std::string name() const override { return "remote-segmentation"; }
    std::string version() const override;
    InstanceSet segment(const ImageBuffer& image,
                        const std::vector<std::string>& vocabulary) override;

private:
    std::shared_ptr<RemoteChannel> channel_;
};

class RemoteDepthBackend : public DepthBackend {
public:
    explicit RemoteDepthBackend(std::shared_ptr<RemoteChannel> channel)
        : channel_(std::move(channel)) {}
    std::string name() const override { return "remote-depth"; }
    std::string version() const override;
    DepthVerdict order(const ImageBuffer& image, const BinaryMask& a,
                       const BinaryMask& b) override;

private:
    std::shared_ptr<RemoteChannel> channel_;
};

class RemoteRemovalBackend : public RemovalBackend {
public:
    explicit RemoteRemovalBackend(std::shared_ptr<RemoteChannel> channel)
        : channel_(std::move(channel)) {}
    std::string name() const override { return "remote-removal"; }
    std::string version() const override;
    ImageBuffer remove(const ImageBuffer& image, const BinaryMask& mask) override;

private:
    std::shared_ptr<RemoteChannel> channel_;
};

class RemoteMetricBackend : public MetricBackend {
public:
    explicit RemoteMetricBackend(std::shared_ptr<RemoteChannel> channel)
        : channel_(std::move(channel)) {}
    std::string name() const override { return "remote-metric"; }
    std::string version() const override;
    double score(const std::string& kind, const ImageBuffer& a, const ImageBuffer& b,
                 const std::string& text) override;

private:
    std::shared_ptr<RemoteChannel> channel_;
};

/// All remote backends on one base URL.
BackendSet make_remote_backends(const std::string& base_url, int total_steps = 50,
                                bool with_metric = false);

}  // namespace amodal
