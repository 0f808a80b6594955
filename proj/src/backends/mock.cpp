#include "amodal/backends/mock.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>

#include "amodal/util/hash.hpp"

namespace amodal {

namespace {

constexpr Rgb kGray{128, 128, 128};
constexpr Rgb kWhite{255, 255, 255};
constexpr Rgb kVoid{0, 0, 0};  // beyond-canvas filler

bool reserved_tag(int tag) { return tag == 0 || tag == 128 || tag == 255; }

void validate_scene(const ScriptedScene& s) {
    if (s.canvas_w < 1 || s.canvas_h < 1) throw ContractError("scene: empty canvas");
    if (s.canvas_w > 256 || s.canvas_h > 256) {
        throw ContractError("scene: canvas exceeds 256, position coding is ambiguous");
    }
    if (!s.window.valid() || s.window.clamped(s.canvas_w, s.canvas_h) != s.window) {
        throw ContractError("scene: window outside canvas");
    }
    if (reserved_tag(s.background_tag)) throw ContractError("scene: reserved background tag");
    std::set<int> tags{s.background_tag};
    for (const auto& l : s.layers) {
        if (reserved_tag(l.tag) || !tags.insert(l.tag).second) {
            throw ContractError("scene: reserved or duplicate layer tag");
        }
        if (l.mask.width() != s.canvas_w || l.mask.height() != s.canvas_h ||
            l.appearance.width() != s.canvas_w || l.appearance.height() != s.canvas_h) {
            throw ContractError("scene: layer rasters must match canvas dims");
        }
    }
}

}  // namespace

ImageBuffer coded_appearance(int tag, int w, int h) {
    ImageBuffer img(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            img.set(x, y, {static_cast<std::uint8_t>(tag),
                           static_cast<std::uint8_t>(x & 0xff),
                           static_cast<std::uint8_t>(y & 0xff)});
        }
    }
    return img;
}

ScriptedScene make_scene(int canvas_w, int canvas_h, BBox window, int background_tag) {
    ScriptedScene s;
    s.canvas_w = canvas_w;
    s.canvas_h = canvas_h;
    s.window = window;
    s.background_tag = background_tag;
    s.background = coded_appearance(background_tag, canvas_w, canvas_h);
    validate_scene(s);
    return s;
}

void add_rect_layer(ScriptedScene& scene, int tag, std::string category, int z,
                    const BBox& rect) {
    BinaryMask m(scene.canvas_w, scene.canvas_h);
    const BBox r = rect.clamped(scene.canvas_w, scene.canvas_h);
    for (int y = r.y0; y < r.y1; ++y)
        for (int x = r.x0; x < r.x1; ++x) m.set(x, y, true);
    add_mask_layer(scene, tag, std::move(category), z, std::move(m));
}

void add_mask_layer(ScriptedScene& scene, int tag, std::string category, int z,
                    BinaryMask canvas_mask, std::optional<ImageBuffer> appearance) {
    SceneLayer layer;
    layer.mask = std::move(canvas_mask);
    layer.appearance = appearance ? std::move(*appearance)
                                  : coded_appearance(tag, scene.canvas_w, scene.canvas_h);
    layer.category = std::move(category);
    layer.z = z;
    layer.tag = tag;
    scene.layers.push_back(std::move(layer));
    validate_scene(scene);
}

ImageBuffer ScriptedScene::render_window() const {
    ImageBuffer out(window.width(), window.height());
    std::vector<char> all(layers.size(), 1);
    MockSceneContext ctx(*this);
    for (int y = 0; y < out.height(); ++y) {
        for (int x = 0; x < out.width(); ++x) {
            out.set(x, y, ctx.compose_at(window.x0 + x, window.y0 + y, all));
        }
    }
    return out;
}

BinaryMask ScriptedScene::visible_canvas_mask(int layer) const {
    BinaryMask out(canvas_w, canvas_h);
    for (int y = 0; y < canvas_h; ++y) {
        for (int x = 0; x < canvas_w; ++x) {
            if (!layers[layer].mask.at(x, y)) continue;
            bool covered = false;
            for (std::size_t j = 0; j < layers.size(); ++j) {
                if (static_cast<int>(j) == layer) continue;
                if (layers[j].z > layers[layer].z && layers[j].mask.at(x, y)) {
                    covered = true;
                    break;
                }
            }
            out.set(x, y, !covered);
        }
    }
    return out;
}

BinaryMask ScriptedScene::layer_mask_in_window(int layer) const {
    return mask_crop(layers[layer].mask, window);
}

ScriptedScene load_scene_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ContractError("scene: cannot open " + path);
    nlohmann::json j = nlohmann::json::parse(in);
    const int cw = j.at("canvas").at("w").get<int>();
    const int ch = j.at("canvas").at("h").get<int>();
    BBox window{0, 0, cw, ch};
    if (j.contains("window")) {
        const auto& w = j.at("window");
        window = {w.at("x0").get<int>(), w.at("y0").get<int>(), w.at("x1").get<int>(),
                  w.at("y1").get<int>()};
    }
    ScriptedScene scene = make_scene(cw, ch, window, j.at("background_tag").get<int>());
    for (const auto& lj : j.at("layers")) {
        BinaryMask m(cw, ch);
        for (const auto& r : lj.at("rects")) {
            const BBox rect = BBox{r.at(0).get<int>(), r.at(1).get<int>(),
                                   r.at(2).get<int>(), r.at(3).get<int>()}
                                  .clamped(cw, ch);
            for (int y = rect.y0; y < rect.y1; ++y)
                for (int x = rect.x0; x < rect.x1; ++x) m.set(x, y, true);
        }
        add_mask_layer(scene, lj.at("tag").get<int>(), lj.at("category").get<std::string>(),
                       lj.at("z").get<int>(), std::move(m));
    }
    if (j.contains("reveal_script")) {
        for (const auto& e : j.at("reveal_script")) {
            scene.reveal_script.push_back(e.get<std::vector<int>>());
        }
    }
    if (j.contains("unknown_depth_pairs")) {
        for (const auto& p : j.at("unknown_depth_pairs")) {
            scene.unknown_depth_pairs.emplace_back(p.at(0).get<int>(), p.at(1).get<int>());
        }
    }
    return scene;
}

MockSceneContext::MockSceneContext(ScriptedScene scene) : scene_(std::move(scene)) {
    validate_scene(scene_);
}

PlaneU8 MockSceneContext::label_grid(const ImageBuffer& img) const {
    PlaneU8 labels(img.height(), img.width());
    std::map<int, int> tag_to_label;  // tag -> label id
    tag_to_label[scene_.background_tag] = 0;
    for (std::size_t i = 0; i < scene_.layers.size(); ++i) {
        tag_to_label[scene_.layers[i].tag] = static_cast<int>(i) + 1;
    }
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            const Rgb px = img.at(x, y);
            int label = other_label();
            if (!(px == kGray) && !(px == kWhite)) {
                auto it = tag_to_label.find(px.r);
                if (it != tag_to_label.end()) label = it->second;
            }
            labels(y, x) = static_cast<std::uint8_t>(label);
        }
    }
    return labels;
}

Eigen::Vector2i MockSceneContext::register_offset(const ImageBuffer& img) const {
    // Coded pixels vote for (canvas - image) offsets; pasted content votes
    // inconsistently and is outvoted by in-place scene pixels.
    std::map<std::pair<int, int>, int> votes;
    const PlaneU8 labels = label_grid(img);
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            if (labels(y, x) == other_label()) continue;
            const Rgb px = img.at(x, y);
            votes[{static_cast<int>(px.g) - x, static_cast<int>(px.b) - y}] += 1;
        }
    }
    if (votes.empty()) return {scene_.window.x0, scene_.window.y0};
    auto best = votes.begin();
    for (auto it = votes.begin(); it != votes.end(); ++it) {
        if (it->second > best->second) best = it;
    }
    return {best->first.first, best->first.second};
}

Rgb MockSceneContext::compose_at(int cx, int cy, const std::vector<char>& exposed) const {
    if (cx < 0 || cy < 0 || cx >= scene_.canvas_w || cy >= scene_.canvas_h) return kVoid;
    int best = -1;
    for (std::size_t i = 0; i < scene_.layers.size(); ++i) {
        if (!exposed[i] || !scene_.layers[i].mask.at(cx, cy)) continue;
        if (best < 0 || scene_.layers[i].z > scene_.layers[best].z) best = static_cast<int>(i);
    }
    if (best >= 0) return scene_.layers[best].appearance.at(cx, cy);
    return scene_.background.at(cx, cy);
}

std::vector<char> MockSceneContext::default_exposed(const ImageBuffer& img,
                                                    const BinaryMask& mask,
                                                    const Eigen::Vector2i& offset) const {
    // Inpainting continues the unmasked context: a layer stays exposed iff
    // the raster being inpainted still shows it somewhere outside the mask.
    // A layer painted over in an earlier fill is absent and stays gone.
    const PlaneU8 labels = label_grid(img);
    std::vector<char> exposed(scene_.layers.size(), 0);
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            if (mask.at(x, y)) continue;
            const int label = labels(y, x);
            if (label >= 1 && label <= static_cast<int>(scene_.layers.size())) {
                exposed[static_cast<std::size_t>(label - 1)] = 1;
            }
        }
    }
    (void)offset;
    return exposed;
}

namespace {
struct MockPayload : StatePayload {
    ImageBuffer raster;
};
}  // namespace

MockDiffusionBackend::MockDiffusionBackend(std::shared_ptr<MockSceneContext> ctx,
                                           int total_steps)
    : ctx_(std::move(ctx)), total_steps_(total_steps) {}

NoisyState MockDiffusionBackend::make_state(ImageBuffer raster, int t) const {
    auto payload = std::make_shared<MockPayload>();
    const int w = raster.width();
    const int h = raster.height();
    payload->raster = std::move(raster);
    return NoisyState{payload, t, w, h};
}

const ImageBuffer& MockDiffusionBackend::raster_of(const NoisyState& state) const {
    const auto* payload = dynamic_cast<const MockPayload*>(state.handle.get());
    if (!payload) throw ContractError("mock diffusion: foreign or empty NoisyState");
    return payload->raster;
}

ImageBuffer MockDiffusionBackend::fill(const ImageBuffer& input, const BinaryMask& mask) {
    const auto& scene = ctx_->scene();
    const Eigen::Vector2i offset = ctx_->register_offset(input);
    std::vector<char> exposed;
    if (fill_calls_ < static_cast<int>(scene.reveal_script.size())) {
        exposed.assign(scene.layers.size(), 0);
        for (int id : scene.reveal_script[fill_calls_]) {
            exposed.at(static_cast<std::size_t>(id)) = 1;
        }
    } else {
        exposed = ctx_->default_exposed(input, mask, offset);
    }
    ++fill_calls_;
    ImageBuffer out = input;
    for (int y = 0; y < input.height(); ++y) {
        for (int x = 0; x < input.width(); ++x) {
            if (!mask.at(x, y)) continue;
            out.set(x, y, ctx_->compose_at(x + offset.x(), y + offset.y(), exposed));
        }
    }
    return out;
}

NoisyState MockDiffusionBackend::diffuse_from_image(const ImageBuffer& image,
                                                    const BinaryMask& mask,
                                                    const std::string& prompt, int e) {
    (void)prompt;
    if (!image.same_dims(mask)) throw DimensionError("diffuse: mask/image mismatch");
    if (e <= 0 || e > total_steps_) throw ContractError("diffuse: need 0 < e <= N");
    if (mask_area(mask) == 0) return make_state(image, e);
    return make_state(fill(image, mask), e);
}

NoisyState MockDiffusionBackend::diffuse_from_state(const NoisyState& state,
                                                    const BinaryMask& mask,
                                                    const std::string& prompt, int e) {
    (void)prompt;
    const ImageBuffer& raster = raster_of(state);
    if (!raster.same_dims(mask)) throw DimensionError("diffuse: mask/state mismatch");
    if (state.timestep >= e || e > total_steps_) {
        throw ContractError("diffuse: need s < e <= N");
    }
    if (mask_area(mask) == 0) return make_state(raster, e);
    return make_state(fill(raster, mask), e);
}

NoisyState MockDiffusionBackend::add_noise(const ImageBuffer& image, int k) {
    if (k < 0 || k > total_steps_) throw ContractError("add_noise: k out of range");
    return make_state(image, k);
}

ImageBuffer MockDiffusionBackend::decode(const NoisyState& state) {
    return raster_of(state);
}

FeatureMap MockDiffusionBackend::extract_decoder_features(const NoisyState& state,
                                                          int layer) {
    if (layer < 1 || layer > 4) throw ContractError("features: layer outside [1,4]");
    if (state.timestep <= 0 || state.timestep >= total_steps_) {
        throw ContractError("features: state must be mid-denoise (0 < t < N)");
    }
    const ImageBuffer& raster = raster_of(state);
    const PlaneU8 labels = ctx_->label_grid(raster);
    FeatureMap f;
    f.grid_w = raster.width();
    f.grid_h = raster.height();
    f.dim = ctx_->label_count();
    f.values = Eigen::MatrixXf::Zero(static_cast<Eigen::Index>(f.grid_w) * f.grid_h, f.dim);
    for (int y = 0; y < f.grid_h; ++y) {
        for (int x = 0; x < f.grid_w; ++x) {
            f.values(static_cast<Eigen::Index>(y) * f.grid_w + x, labels(y, x)) = 1.0f;
        }
    }
    return f;
}

InstanceSet MockSegmentationBackend::segment(const ImageBuffer& image,
                                             const std::vector<std::string>& vocabulary) {
    (void)vocabulary;  // the scripted detector knows every scene category
    const PlaneU8 labels = ctx_->label_grid(image);
    InstanceSet out;
    const auto& layers = ctx_->scene().layers;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        BinaryMask m(image.width(), image.height());
        bool any = false;
        for (int y = 0; y < image.height(); ++y) {
            for (int x = 0; x < image.width(); ++x) {
                if (labels(y, x) == static_cast<int>(i) + 1) {
                    m.set(x, y, true);
                    any = true;
                }
            }
        }
        if (any) out.push_back({std::move(m), layers[i].category, 0.9});
    }
    return out;
}

DepthVerdict MockDepthBackend::order(const ImageBuffer& image, const BinaryMask& a,
                                     const BinaryMask& b) {
    const PlaneU8 labels = ctx_->label_grid(image);
    const auto layer_of = [&](const BinaryMask& m) -> int {
        std::vector<std::int64_t> counts(ctx_->scene().layers.size(), 0);
        for (int y = 0; y < image.height(); ++y) {
            for (int x = 0; x < image.width(); ++x) {
                if (!m.at(x, y)) continue;
                const int label = labels(y, x);
                if (label >= 1 && label <= static_cast<int>(counts.size())) {
                    counts[label - 1] += 1;
                }
            }
        }
        int best = -1;
        for (std::size_t i = 0; i < counts.size(); ++i) {
            if (counts[i] > 0 && (best < 0 || counts[i] > counts[best])) {
                best = static_cast<int>(i);
            }
        }
        return best;
    };
    const int la = layer_of(a);
    const int lb = layer_of(b);
    if (la < 0 || lb < 0 || la == lb) return DepthVerdict::unknown;
    for (const auto& [p, q] : ctx_->scene().unknown_depth_pairs) {
        if ((p == la && q == lb) || (p == lb && q == la)) return DepthVerdict::unknown;
    }
    const int za = ctx_->scene().layers[la].z;
    const int zb = ctx_->scene().layers[lb].z;
    if (za == zb) return DepthVerdict::unknown;
    return za > zb ? DepthVerdict::first_closer : DepthVerdict::second_closer;
}

ImageBuffer MockRemovalBackend::remove(const ImageBuffer& image, const BinaryMask& mask) {
    if (!image.same_dims(mask)) throw DimensionError("remove: mask/image mismatch");
    if (mask_area(mask) == 0) return image;
    const Eigen::Vector2i offset = ctx_->register_offset(image);
    const auto& scene = ctx_->scene();
    ImageBuffer out = image;
    for (int y = 0; y < image.height(); ++y) {
        for (int x = 0; x < image.width(); ++x) {
            if (!mask.at(x, y)) continue;
            const int cx = x + offset.x();
            const int cy = y + offset.y();
            if (cx >= 0 && cy >= 0 && cx < scene.canvas_w && cy < scene.canvas_h) {
                out.set(x, y, scene.background.at(cx, cy));
            } else {
                out.set(x, y, kVoid);
            }
        }
    }
    return out;
}

double MockMetricBackend::score(const std::string& kind, const ImageBuffer& a,
                                const ImageBuffer& b, const std::string& text) {
    if (kind == "clip") {
        // Stable pseudo-similarity in [0.2, 0.3), keyed on the prompt.
        const auto h = content_hash_hex(text);
        return 0.2 + static_cast<double>(h.back() % 10) / 100.0;
    }
    if (kind == "dreamsim" || kind == "lpips") {
        if (!a.same_dims(b)) throw DimensionError("metric: image dims mismatch");
        double total = 0.0;
        for (int c = 0; c < 3; ++c) {
            total += (a.plane(c).cast<double>() - b.plane(c).cast<double>()).abs().sum();
        }
        return total / (255.0 * 3.0 * a.width() * a.height());
    }
    throw ContractError("metric: unknown kind " + kind);
}

BackendSet make_mock_backends(const ScriptedScene& scene, int total_steps,
                              bool with_metric) {
    auto ctx = std::make_shared<MockSceneContext>(scene);
    BackendSet set;
    set.diffusion = std::make_shared<MockDiffusionBackend>(ctx, total_steps);
    set.segmentation = std::make_shared<MockSegmentationBackend>(ctx);
    set.depth = std::make_shared<MockDepthBackend>(ctx);
    set.removal = std::make_shared<MockRemovalBackend>(ctx);
    if (with_metric) set.metric = std::make_shared<MockMetricBackend>();
    return set;
}

}  // namespace amodal
