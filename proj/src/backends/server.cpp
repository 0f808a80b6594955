#include "amodal/backends/server.hpp"

#include <httplib.h>

#include <atomic>
#include <mutex>
#include <nlohmann/json.hpp>
#include <thread>
#include <unordered_map>

#include "amodal/backends/remote.hpp"
#include "amodal/io/png_io.hpp"
#include "amodal/util/base64.hpp"

namespace amodal {

using nlohmann::json;

struct BackendHttpServer::Impl {
    BackendSet backends;
    std::string name;
    std::string version;
    httplib::Server server;
    std::thread worker;

    std::mutex mutex;
    std::unordered_map<std::string, NoisyState> states;
    std::atomic<std::uint64_t> next_token{1};

    std::string store_state(NoisyState state) {
        const std::string token = "st-" + std::to_string(next_token++);
        std::lock_guard lock(mutex);
        states[token] = std::move(state);
        return token;
    }

    NoisyState load_state(const std::string& token) {
        std::lock_guard lock(mutex);
        auto it = states.find(token);
        if (it == states.end()) throw ContractError("server: unknown state token");
        return it->second;
    }

    json state_response(NoisyState state) {
        json j{{"timestep", state.timestep},
               {"width", state.width},
               {"height", state.height}};
        j["state"] = store_state(std::move(state));
        return j;
    }

    static ImageBuffer req_image(const json& j, const char* key) {
        return decode_image_png(base64_decode(j.at(key).get<std::string>()));
    }
    static BinaryMask req_mask(const json& j, const char* key) {
        return decode_mask_png(base64_decode(j.at(key).get<std::string>()));
    }

    void handle(const httplib::Request& req, httplib::Response& res,
                json (Impl::*op)(const json&)) {
        try {
            const json body = json::parse(req.body);
            res.set_content((this->*op)(body).dump(), "application/json");
        } catch (const ContractError& e) {
            res.status = 400;
            res.set_content(json{{"error", e.what()}}.dump(), "application/json");
        } catch (const std::exception& e) {
            res.status = 500;
            res.set_content(json{{"error", e.what()}}.dump(), "application/json");
        }
    }

    json op_ping(const json& j) {
        return json{{"echo", j.at("echo").get<std::string>()},
                    {"name", name},
                    {"version", version},
                    {"protocol", kWireProtocolVersion}};
    }

    json op_diffuse(const json& j) {
        const BinaryMask mask = req_mask(j, "mask");
        const std::string prompt = j.value("prompt", std::string());
        const int e = j.at("e").get<int>();
        if (j.contains("seed")) backends.diffusion->set_seed(j.at("seed").get<std::uint64_t>());
        NoisyState out;
        if (j.contains("state")) {
            out = backends.diffusion->diffuse_from_state(
                load_state(j.at("state").get<std::string>()), mask, prompt, e);
        } else {
            out = backends.diffusion->diffuse_from_image(req_image(j, "image"), mask,
                                                         prompt, e);
        }
        return state_response(std::move(out));
    }

    json op_add_noise(const json& j) {
        return state_response(
            backends.diffusion->add_noise(req_image(j, "image"), j.at("k").get<int>()));
    }

    json op_decode(const json& j) {
        const ImageBuffer img =
            backends.diffusion->decode(load_state(j.at("state").get<std::string>()));
        return json{{"image", base64_encode(encode_image_png(img))}};
    }

    json op_features(const json& j) {
        const FeatureMap f = backends.diffusion->extract_decoder_features(
            load_state(j.at("state").get<std::string>()), j.at("layer").get<int>());
        Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> wire =
            f.values;
        const auto* bytes = reinterpret_cast<const std::uint8_t*>(wire.data());
        return json{{"grid_w", f.grid_w},
                    {"grid_h", f.grid_h},
                    {"dim", f.dim},
                    {"values", base64_encode(bytes, wire.size() * sizeof(float))}};
    }

    json op_segment(const json& j) {
        std::vector<std::string> vocab;
        if (j.contains("vocabulary")) vocab = j.at("vocabulary").get<std::vector<std::string>>();
        const InstanceSet instances = backends.segmentation->segment(req_image(j, "image"), vocab);
        json out = json::array();
        for (const auto& inst : instances) {
            out.push_back(json{{"mask", base64_encode(encode_mask_png(inst.mask))},
                               {"category", inst.category},
                               {"score", inst.score}});
        }
        return json{{"instances", out}};
    }

    json op_order_depth(const json& j) {
        const DepthVerdict v = backends.depth->order(
            req_image(j, "image"), req_mask(j, "mask_a"), req_mask(j, "mask_b"));
        const char* s = v == DepthVerdict::first_closer    ? "first_closer"
                        : v == DepthVerdict::second_closer ? "second_closer"
                                                           : "unknown";
        return json{{"verdict", s}};
    }

    json op_remove(const json& j) {
        const ImageBuffer img =
            backends.removal->remove(req_image(j, "image"), req_mask(j, "mask"));
        return json{{"image", base64_encode(encode_image_png(img))}};
    }

    json op_metric(const json& j) {
        if (!backends.metric) throw ContractError("server: no metric backend");
        return json{{"score", backends.metric->score(
                                  j.at("kind").get<std::string>(), req_image(j, "image_a"),
                                  req_image(j, "image_b"), j.value("text", std::string()))}};
    }
};

BackendHttpServer::BackendHttpServer(BackendSet backends, std::string name,
                                     std::string version)
    : impl_(std::make_unique<Impl>()) {
    impl_->backends = std::move(backends);
    impl_->name = std::move(name);
    impl_->version = std::move(version);

    auto route = [this](const char* path, json (Impl::*op)(const json&)) {
        impl_->server.Post(path, [this, op](const httplib::Request& req,
                                            httplib::Response& res) {
            impl_->handle(req, res, op);
        });
    };
    route("/v1/ping", &Impl::op_ping);
    route("/v1/diffuse", &Impl::op_diffuse);
    route("/v1/add_noise", &Impl::op_add_noise);
    route("/v1/decode", &Impl::op_decode);
    route("/v1/features", &Impl::op_features);
    route("/v1/segment", &Impl::op_segment);
    route("/v1/order_depth", &Impl::op_order_depth);
    route("/v1/remove", &Impl::op_remove);
    route("/v1/metric", &Impl::op_metric);
}

BackendHttpServer::~BackendHttpServer() { stop(); }

int BackendHttpServer::start() {
    port_ = impl_->server.bind_to_any_port("127.0.0.1");
    impl_->worker = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return port_;
}

void BackendHttpServer::stop() {
    if (impl_ && impl_->worker.joinable()) {
        impl_->server.stop();
        impl_->worker.join();
    }
}

}  // namespace amodal
