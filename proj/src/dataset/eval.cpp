#include "amodal/dataset/eval.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <sstream>

#include "amodal/backends/mock.hpp"
#include "amodal/io/png_io.hpp"
#include "amodal/progressive/pipeline.hpp"

namespace amodal {

namespace fs = std::filesystem;

ImageBuffer extract_on_black(const ImageBuffer& image, const BinaryMask& mask) {
    if (!image.same_dims(mask)) throw DimensionError("extract_on_black: dims mismatch");
    const ImageBuffer black(image.width(), image.height(), Rgb{0, 0, 0});
    return image_blend(black, image, mask);
}

double mask_iou(const BinaryMask& a, const BinaryMask& b) {
    const auto uni = mask_area(mask_union(a, b));
    if (uni == 0) return 1.0;  // both empty: identical
    return static_cast<double>(mask_area(mask_intersect(a, b))) /
           static_cast<double>(uni);
}

namespace {

int tag_inside(const ImageBuffer& img, const BinaryMask& mask) {
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (mask.at(x, y)) return img.at(x, y).r;
        }
    }
    throw ContractError("eval: cannot infer tag from an empty mask");
}

int tag_outside(const ImageBuffer& img, const BinaryMask& mask) {
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (!mask.at(x, y)) return img.at(x, y).r;
        }
    }
    throw ContractError("eval: mask covers the whole frame");
}

std::vector<EvalSample> load_samples(const fs::path& dataset_dir) {
    std::ifstream in(dataset_dir / "manifest.json");
    if (!in) {
        throw ContractError("eval: no manifest.json in " + dataset_dir.string());
    }
    nlohmann::json manifest;
    in >> manifest;

    std::vector<EvalSample> samples;
    for (const auto& row : manifest.at("samples")) {
        EvalSample s;
        s.id = row.at("id").get<std::string>();
        s.difficulty = row.at("difficulty").get<std::string>();
        s.category = row.at("category").get<std::string>();
        s.occluder_category = row.at("occluder_category").get<std::string>();
        const auto& files = row.at("files");
        const auto file = [&](const char* key) {
            return (dataset_dir / files.at(key).get<std::string>()).string();
        };
        s.occluded = read_image_png(file("occluded"));
        s.modal = read_mask_png(file("modal"));
        s.gt_image = read_image_png(file("gt_image"));
        s.gt_mask = read_mask_png(file("gt_mask"));
        s.occluder_mask = read_mask_png(file("occluder_mask"));
        samples.push_back(std::move(s));
    }
    return samples;
}

double mean_l1(const ImageBuffer& a, const ImageBuffer& b) {
    if (!a.same_dims(b)) throw DimensionError("mean_l1: dims mismatch");
    double sum = 0.0;
    for (int c = 0; c < 3; ++c) {
        sum += (a.plane(c).cast<double>() - b.plane(c).cast<double>()).abs().sum();
    }
    return sum / (3.0 * a.width() * a.height() * 255.0);
}

double psnr(const ImageBuffer& a, const ImageBuffer& b) {
    double se = 0.0;
    for (int c = 0; c < 3; ++c) {
        se += (a.plane(c).cast<double>() - b.plane(c).cast<double>()).square().sum();
    }
    const double mse = se / (3.0 * a.width() * a.height());
    if (mse <= 0.0) return 99.99;
    return std::min(99.99, 10.0 * std::log10(255.0 * 255.0 / mse));
}

constexpr const char* kPerceptualKinds[] = {"clip", "dreamsim", "lpips"};

bool is_builtin_metric(const std::string& m) {
    return m == "iou" || m == "l1" || m == "psnr";
}

}  // namespace

BackendFactory mock_backend_factory() {
    return [](const EvalSample& s) {
        const int object_tag = tag_inside(s.gt_image, s.gt_mask);
        const int occluder_tag = tag_inside(s.occluded, s.occluder_mask);
        const int background_tag =
            tag_outside(s.gt_image, mask_union(s.gt_mask, s.occluder_mask));

        ScriptedScene scene =
            make_scene(s.occluded.width(), s.occluded.height(),
                       BBox{0, 0, s.occluded.width(), s.occluded.height()},
                       background_tag);
        scene.background = s.gt_image;  // what object removal should reveal
        add_mask_layer(scene, object_tag, s.category, /*z=*/1, s.gt_mask, s.gt_image);
        add_mask_layer(scene, occluder_tag, s.occluder_category, /*z=*/2,
                       s.occluder_mask, s.occluded);
        return make_mock_backends(scene, 50, /*with_metric=*/true);
    };
}

nlohmann::json evaluate(const fs::path& dataset_dir, const EvalOptions& options,
                        const BackendFactory& factory) {
    std::vector<std::string> metrics;
    for (const std::string& m : options.metrics) {
        if (m == "external") {
            for (const char* kind : kPerceptualKinds) metrics.push_back(kind);
        } else {
            metrics.push_back(m);
        }
    }

    const std::vector<EvalSample> samples = load_samples(dataset_dir);
    nlohmann::json sample_rows = nlohmann::json::array();
    nlohmann::json notices = nlohmann::json::array();
    // metric -> difficulty -> (sum, n)
    std::map<std::string, std::map<std::string, std::pair<double, int>>> agg;
    bool metric_backend_missing = false;

    for (const EvalSample& s : samples) {
        ImageBuffer completed;
        BinaryMask pred_mask;
        BackendSet backends;
        if (options.results_dir) {
            completed =
                read_image_png((*options.results_dir / (s.id + ".png")).string());
            pred_mask =
                read_mask_png((*options.results_dir / (s.id + ".mask.png")).string());
        } else {
            backends = factory(s);
            const CompletionBundle bundle =
                run_pipeline(s.occluded, QuerySpec{s.category, std::nullopt},
                             options.config, backends, options.sampler);
            // Back to the original frame (padding, if any, is outside it).
            const BBox original{bundle.origin_x, bundle.origin_y,
                                bundle.origin_x + s.occluded.width(),
                                bundle.origin_y + s.occluded.height()};
            completed = image_crop(bundle.final_image, original);
            pred_mask = mask_crop(bundle.final_mask, original);
        }
        if (!completed.same_dims(s.gt_image) || !pred_mask.same_dims(s.gt_mask)) {
            throw ContractError("eval: result dims mismatch for " + s.id);
        }

        const ImageBuffer pred_object = extract_on_black(completed, pred_mask);
        const ImageBuffer gt_object = extract_on_black(s.gt_image, s.gt_mask);

        nlohmann::json row{{"id", s.id}, {"difficulty", s.difficulty}};
        for (const std::string& m : metrics) {
            double value = 0.0;
            if (m == "iou") {
                value = mask_iou(pred_mask, s.gt_mask);
            } else if (m == "l1") {
                value = mean_l1(pred_object, gt_object);
            } else if (m == "psnr") {
                value = psnr(pred_object, gt_object);
            } else {
                MetricBackend* metric =
                    options.results_dir ? nullptr : backends.metric.get();
                if (!metric) {
                    metric_backend_missing = true;
                    continue;
                }
                value = metric->score(m, pred_object, gt_object, s.category);
            }
            row[m] = value;
            auto& [sum, n] = agg[m][s.difficulty];
            sum += value;
            ++n;
        }
        sample_rows.push_back(std::move(row));
    }

    if (metric_backend_missing) {
        notices.push_back("perceptual metrics skipped: no metric backend configured");
    }

    nlohmann::json table = nlohmann::json::array();
    for (const std::string& m : metrics) {
        if (!agg.count(m)) continue;
        nlohmann::json entry{{"metric", m}};
        for (const char* difficulty : {"easy", "hard"}) {
            const auto it = agg[m].find(difficulty);
            const double sum = it != agg[m].end() ? it->second.first : 0.0;
            const int n = it != agg[m].end() ? it->second.second : 0;
            entry[difficulty] = {{"mean", n > 0 ? sum / n : 0.0}, {"n", n}};
        }
        table.push_back(std::move(entry));
    }

    return nlohmann::json{{"schema", "amodal-eval/1"},
                          {"method", options.method},
                          {"metrics", std::move(table)},
                          {"samples", std::move(sample_rows)},
                          {"notices", std::move(notices)}};
}

std::string report_to_csv(const nlohmann::json& report) {
    std::ostringstream out;
    out << "method,difficulty,metric,mean,n\n";
    const std::string method = report.at("method").get<std::string>();
    for (const auto& entry : report.at("metrics")) {
        const std::string metric = entry.at("metric").get<std::string>();
        for (const char* difficulty : {"easy", "hard"}) {
            const auto& cell = entry.at(difficulty);
            out << method << ',' << difficulty << ',' << metric << ','
                << cell.at("mean").get<double>() << ',' << cell.at("n").get<int>()
                << '\n';
        }
    }
    return out.str();
}

}  // namespace amodal
