#include "amodal/backends/remote.hpp"

#include <httplib.h>

#include <cstring>
#include <nlohmann/json.hpp>

#include "amodal/io/png_io.hpp"
#include "amodal/util/base64.hpp"

namespace amodal {

using nlohmann::json;

namespace {

struct RemotePayload : StatePayload {
    std::string token;
};

std::string image_b64(const ImageBuffer& img) {
    return base64_encode(encode_image_png(img));
}

std::string mask_b64(const BinaryMask& m) {
    return base64_encode(encode_mask_png(m));
}

ImageBuffer image_from_b64(const std::string& b64) {
    return decode_image_png(base64_decode(b64));
}

BinaryMask mask_from_b64(const std::string& b64) {
    return decode_mask_png(base64_decode(b64));
}

json parse_response(const std::string& body) {
    json j = json::parse(body, nullptr, false);
    if (j.is_discarded()) throw ContractError("remote: malformed JSON response");
    return j;
}

NoisyState state_from_json(const json& j) {
    auto payload = std::make_shared<RemotePayload>();
    payload->token = j.at("state").get<std::string>();
    return NoisyState{payload, j.at("timestep").get<int>(), j.at("width").get<int>(),
                      j.at("height").get<int>()};
}

const std::string& token_of(const NoisyState& state) {
    const auto* payload = dynamic_cast<const RemotePayload*>(state.handle.get());
    if (!payload) throw ContractError("remote: foreign or empty NoisyState");
    return payload->token;
}

std::string fetch_version(RemoteChannel& channel) {
    return channel.ping("version-probe").version;
}

}  // namespace

struct RemoteChannel::Impl {
    httplib::Client client;
    explicit Impl(const std::string& url) : client(url) {
        client.set_connection_timeout(10);
        client.set_read_timeout(120);
    }
};

RemoteChannel::RemoteChannel(std::string base_url, int retries)
    : base_url_(std::move(base_url)), retries_(retries),
      impl_(std::make_unique<Impl>(base_url_)) {}

RemoteChannel::~RemoteChannel() = default;

std::string RemoteChannel::post(const std::string& path, const std::string& body) {
    for (int attempt = 0; ; ++attempt) {
        auto res = impl_->client.Post(path, body, "application/json");
        if (!res) {
            if (attempt < retries_) continue;
            throw TransportError("remote: no response from " + base_url_ + path);
        }
        if (res->status >= 200 && res->status < 300) return res->body;
        if (res->status >= 500) {
            if (attempt < retries_) continue;
            throw TransportError("remote: server error " + std::to_string(res->status) +
                                 " on " + path);
        }
        throw ContractError("remote: status " + std::to_string(res->status) + " on " +
                            path + ": " + res->body);
    }
}

PingResult RemoteChannel::ping(const std::string& echo) {
    json req{{"echo", echo}, {"protocol", kWireProtocolVersion}};
    json j = parse_response(post("/v1/ping", req.dump()));
    if (j.at("echo").get<std::string>() != echo) {
        throw ContractError("remote: ping echo mismatch");
    }
    return {j.at("name").get<std::string>(), j.at("version").get<std::string>(),
            j.at("protocol").get<int>()};
}

RemoteDiffusionBackend::RemoteDiffusionBackend(std::shared_ptr<RemoteChannel> channel,
                                               int total_steps)
    : channel_(std::move(channel)), total_steps_(total_steps) {}

std::string RemoteDiffusionBackend::version() const { return fetch_version(*channel_); }

NoisyState RemoteDiffusionBackend::diffuse_from_image(const ImageBuffer& image,
                                                      const BinaryMask& mask,
                                                      const std::string& prompt, int e) {
    if (!image.same_dims(mask)) throw DimensionError("diffuse: mask/image mismatch");
    json req{{"op", "diffuse_range"}, {"image", image_b64(image)},
             {"mask", mask_b64(mask)}, {"prompt", prompt},
             {"s", 0},                {"e", e},
             {"seed", seed_},         {"protocol", kWireProtocolVersion}};
    return state_from_json(parse_response(channel_->post("/v1/diffuse", req.dump())));
}

NoisyState RemoteDiffusionBackend::diffuse_from_state(const NoisyState& state,
                                                      const BinaryMask& mask,
                                                      const std::string& prompt, int e) {
    json req{{"op", "diffuse_range"}, {"state", token_of(state)},
             {"mask", mask_b64(mask)}, {"prompt", prompt},
             {"s", state.timestep},   {"e", e},
             {"seed", seed_},         {"protocol", kWireProtocolVersion}};
    return state_from_json(parse_response(channel_->post("/v1/diffuse", req.dump())));
}

NoisyState RemoteDiffusionBackend::add_noise(const ImageBuffer& image, int k) {
    json req{{"op", "add_noise"},
             {"image", image_b64(image)},
             {"k", k},
             {"seed", seed_},
             {"protocol", kWireProtocolVersion}};
    return state_from_json(parse_response(channel_->post("/v1/add_noise", req.dump())));
}

ImageBuffer RemoteDiffusionBackend::decode(const NoisyState& state) {
    json req{{"op", "decode"}, {"state", token_of(state)},
             {"protocol", kWireProtocolVersion}};
    json j = parse_response(channel_->post("/v1/decode", req.dump()));
    return image_from_b64(j.at("image").get<std::string>());
}

FeatureMap RemoteDiffusionBackend::extract_decoder_features(const NoisyState& state,
                                                            int layer) {
    json req{{"op", "extract_features"},
             {"state", token_of(state)},
             {"layer", layer},
             {"protocol", kWireProtocolVersion}};
    json j = parse_response(channel_->post("/v1/features", req.dump()));
    FeatureMap f;
    f.grid_w = j.at("grid_w").get<int>();
    f.grid_h = j.at("grid_h").get<int>();
    f.dim = j.at("dim").get<int>();
    auto bytes = base64_decode(j.at("values").get<std::string>());
    const std::size_t count = static_cast<std::size_t>(f.grid_w) * f.grid_h * f.dim;
    if (bytes.size() != count * sizeof(float)) {
        throw ContractError("remote: feature payload size mismatch");
    }
    // float32, row-major cells on the wire.
    Eigen::Map<Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
        wire(reinterpret_cast<float*>(bytes.data()),
             static_cast<Eigen::Index>(f.grid_w) * f.grid_h, f.dim);
    f.values = wire;
    return f;
}

std::string RemoteSegmentationBackend::version() const {
    return fetch_version(*channel_);
}

InstanceSet RemoteSegmentationBackend::segment(const ImageBuffer& image,
                                               const std::vector<std::string>& vocabulary) {
    json req{{"op", "segment"},
             {"image", image_b64(image)},
             {"vocabulary", vocabulary},
             {"protocol", kWireProtocolVersion}};
    json j = parse_response(channel_->post("/v1/segment", req.dump()));
    InstanceSet out;
    for (const auto& inst : j.at("instances")) {
        out.push_back({mask_from_b64(inst.at("mask").get<std::string>()),
                       inst.at("category").get<std::string>(),
                       inst.at("score").get<double>()});
    }
    return out;
}

std::string RemoteDepthBackend::version() const { return fetch_version(*channel_); }

DepthVerdict RemoteDepthBackend::order(const ImageBuffer& image, const BinaryMask& a,
                                       const BinaryMask& b) {
    json req{{"op", "order_depth"},
             {"image", image_b64(image)},
             {"mask_a", mask_b64(a)},
             {"mask_b", mask_b64(b)},
             {"protocol", kWireProtocolVersion}};
    json j = parse_response(channel_->post("/v1/order_depth", req.dump()));
    const std::string v = j.at("verdict").get<std::string>();
    if (v == "first_closer") return DepthVerdict::first_closer;
    if (v == "second_closer") return DepthVerdict::second_closer;
    if (v == "unknown") return DepthVerdict::unknown;
    throw ContractError("remote: bad depth verdict " + v);
}

std::string RemoteRemovalBackend::version() const { return fetch_version(*channel_); }

ImageBuffer RemoteRemovalBackend::remove(const ImageBuffer& image,
                                         const BinaryMask& mask) {
    json req{{"op", "remove_objects"},
             {"image", image_b64(image)},
             {"mask", mask_b64(mask)},
             {"protocol", kWireProtocolVersion}};
    json j = parse_response(channel_->post("/v1/remove", req.dump()));
    return image_from_b64(j.at("image").get<std::string>());
}

std::string RemoteMetricBackend::version() const { return fetch_version(*channel_); }

double RemoteMetricBackend::score(const std::string& kind, const ImageBuffer& a,
                                  const ImageBuffer& b, const std::string& text) {
    json req{{"op", "metric"},       {"kind", kind},
             {"image_a", image_b64(a)}, {"image_b", image_b64(b)},
             {"text", text},         {"protocol", kWireProtocolVersion}};
    json j = parse_response(channel_->post("/v1/metric", req.dump()));
    return j.at("score").get<double>();
}

BackendSet make_remote_backends(const std::string& base_url, int total_steps,
                                bool with_metric) {
    auto channel = std::make_shared<RemoteChannel>(base_url);
    BackendSet set;
    set.diffusion = std::make_shared<RemoteDiffusionBackend>(channel, total_steps);
    set.segmentation = std::make_shared<RemoteSegmentationBackend>(channel);
    set.depth = std::make_shared<RemoteDepthBackend>(channel);
    set.removal = std::make_shared<RemoteRemovalBackend>(channel);
    if (with_metric) set.metric = std::make_shared<RemoteMetricBackend>(channel);
    return set;
}

}  // namespace amodal
