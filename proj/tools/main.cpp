#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <nlohmann/json.hpp>

#include "amodal/backends/mock.hpp"
#include "amodal/backends/remote.hpp"
#include "amodal/core/serialize.hpp"
#include "amodal/curation/curation.hpp"
#include "amodal/dataset/dataset.hpp"
#include "amodal/dataset/eval.hpp"
#include "amodal/io/png_io.hpp"
#include "amodal/progressive/bundle.hpp"
#include "amodal/progressive/pipeline.hpp"
#include "amodal/util/hash.hpp"
#include "cli_config.hpp"

namespace amodal::cli {
namespace {

namespace fs = std::filesystem;

std::string join_args(int argc, char** argv) {
    std::string out;
    for (int i = 0; i < argc; ++i) {
        if (i) out += ' ';
        out += argv[i];
    }
    return out;
}

std::pair<int, int> parse_point(const std::string& s) {
    const auto comma = s.find(',');
    if (comma == std::string::npos) {
        throw CLI::ValidationError("--point", "expected X,Y");
    }
    try {
        return {std::stoi(s.substr(0, comma)), std::stoi(s.substr(comma + 1))};
    } catch (const std::exception&) {
        throw CLI::ValidationError("--point", "expected X,Y");
    }
}

/// Volatile run record (wall clock, command line); deliberately separate
/// from the bundle's deterministic manifest.json.
void write_run_manifest(const fs::path& out_dir, const std::string& command_line,
                        const AppConfig& config, const BackendSet& backends,
                        const std::vector<std::string>& bundle_dirs,
                        const std::vector<std::string>& content_hashes) {
    const auto now = std::chrono::system_clock::now().time_since_epoch();
    nlohmann::json run{
        {"command_line", command_line},
        {"config", config_to_json(config.pipeline)},
        {"backends",
         {{"mode", config.backends.mode},
          {"diffusion", backends.diffusion->name() + "/" + backends.diffusion->version()},
          {"segmentation",
           backends.segmentation->name() + "/" + backends.segmentation->version()},
          {"depth", backends.depth->name() + "/" + backends.depth->version()},
          {"removal", backends.removal->name() + "/" + backends.removal->version()}}},
        {"seed", config.pipeline.rng_seed},
        {"unix_time_ms",
         std::chrono::duration_cast<std::chrono::milliseconds>(now).count()},
        {"outputs", bundle_dirs},
        {"content_hashes", content_hashes},
    };
    std::ofstream out(out_dir / "run.json");
    out << run.dump(2) << '\n';
}

struct CompleteArgs {
    std::string image;
    std::string query;
    std::string point;
    std::string sampler = "mc";
    std::optional<std::uint64_t> seed;
    std::optional<int> k;
    std::optional<int> layer;
    std::string background;
    int variants = 1;
    bool debug_trace = false;
    std::optional<std::string> config_path;
    std::string scene;
    std::string out;
    bool json = false;
};

int run_complete(const CompleteArgs& args, const std::string& command_line) {
    AppConfig config = load_app_config(args.config_path);
    if (!args.scene.empty()) {
        config.backends.mode = "mock";
        config.backends.scene = args.scene;
    }
    if (args.seed) config.pipeline.rng_seed = *args.seed;
    if (args.k) config.pipeline.composite_step = *args.k;
    if (args.layer) config.pipeline.decoder_layer = *args.layer;
    if (!args.background.empty()) {
        config.pipeline.clean_background = clean_background_from_string(args.background);
    }
    config.pipeline.validate();
    const SamplerKind sampler = sampler_from_string(args.sampler);

    QuerySpec query{args.query, std::nullopt};
    if (!args.point.empty()) query.seed_point = parse_point(args.point);

    const BackendSet backends = make_backends(config, /*with_metric=*/false);
    ImageBuffer image;
    if (!args.image.empty()) {
        image = read_image_png(args.image);
    } else if (config.backends.mode == "mock") {
        image = load_scene_json(config.backends.scene).render_window();
    } else {
        throw CLI::RequiredError("--image");
    }

    const fs::path out_dir(args.out);
    fs::create_directories(out_dir);
    std::vector<std::string> bundle_dirs;
    std::vector<std::string> content_hashes;
    nlohmann::json summary = nlohmann::json::array();

    for (int v = 0; v < args.variants; ++v) {
        PipelineConfig variant_config = config.pipeline;
        variant_config.rng_seed = config.pipeline.rng_seed + static_cast<std::uint64_t>(v);
        const fs::path dir =
            args.variants > 1 ? out_dir / ("variant_" + std::to_string(v)) : out_dir;

        const CompletionBundle bundle =
            run_pipeline(image, query, variant_config, backends, sampler);
        const nlohmann::json manifest = write_bundle(bundle, dir, args.debug_trace);

        bundle_dirs.push_back(dir.string());
        content_hashes.push_back(manifest.at("content_hash").get<std::string>());
        summary.push_back(nlohmann::json{
            {"dir", dir.string()},
            {"seed", variant_config.rng_seed},
            {"iterations", bundle.iterations.size()},
            {"termination", to_string(bundle.termination)},
            {"content_hash", content_hashes.back()},
        });
    }
    write_run_manifest(out_dir, command_line, config, backends, bundle_dirs,
                       content_hashes);

    if (args.json) {
        std::cout << nlohmann::json{{"bundles", summary}}.dump(2) << '\n';
    } else {
        for (const auto& row : summary) {
            std::cout << row.at("dir").get<std::string>() << ": "
                      << row.at("iterations").get<int>() << " iteration(s), "
                      << row.at("termination").get<std::string>() << ", hash "
                      << row.at("content_hash").get<std::string>() << '\n';
        }
    }
    return kExitOk;
}

std::map<std::string, bool> load_labels(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ContractError("cannot open labels file: " + path);
    nlohmann::json doc;
    in >> doc;
    std::map<std::string, bool> labels;
    for (const auto& [id, value] : doc.items()) {
        if (value.is_boolean()) {
            labels[id] = value.get<bool>();
        } else {
            const std::string s = value.get<std::string>();
            if (s != "complete" && s != "incomplete") {
                throw ContractError("label for " + id + " must be complete/incomplete");
            }
            labels[id] = s == "complete";
        }
    }
    return labels;
}

struct CurateArgs {
    std::string bundle;
    std::string batch;
    std::string labels;
    std::optional<std::string> config_path;
    std::string scene;
    std::string out;
};

int run_curate(const CurateArgs& args) {
    AppConfig config = load_app_config(args.config_path);
    if (!args.scene.empty()) {
        config.backends.mode = "mock";
        config.backends.scene = args.scene;
    }
    const BackendSet backends = make_backends(config, /*with_metric=*/false);

    std::vector<fs::path> dirs;
    if (!args.bundle.empty()) {
        dirs.emplace_back(args.bundle);
    } else {
        for (const auto& entry : fs::directory_iterator(args.batch)) {
            if (entry.is_directory() && fs::exists(entry.path() / "manifest.json")) {
                dirs.push_back(entry.path());
            }
        }
        std::sort(dirs.begin(), dirs.end());
    }
    if (dirs.empty()) throw ContractError("curate: no bundles found");

    std::map<std::string, bool> labels;
    if (!args.labels.empty()) labels = load_labels(args.labels);

    std::vector<CurationItem> items;
    for (const fs::path& dir : dirs) {
        const StoredBundle stored = load_bundle(dir);
        CurationItem item;
        item.id = dir.filename().string();
        item.image = stored.amodal;
        item.mask = stored.amodal_mask;
        item.category = stored.category;
        if (const auto it = labels.find(item.id); it != labels.end()) {
            item.label_complete = it->second;
        }
        items.push_back(std::move(item));
    }

    const nlohmann::json report = curate_batch(items, config.pipeline, backends);
    if (!args.out.empty()) {
        std::ofstream out(args.out);
        out << report.dump(2) << '\n';
    }
    std::cout << report.dump(2) << '\n';
    return kExitOk;
}

struct DatasetArgs {
    std::string pool;
    int easy = 0;
    int hard = 0;
    std::uint64_t seed = 0;
    std::string out;
};

int run_dataset_build(const DatasetArgs& args) {
    const nlohmann::json manifest =
        build_dataset(args.pool, args.easy, args.hard, args.seed, args.out);
    std::cout << "wrote " << manifest.at("samples").size() << " samples to "
              << args.out << ", manifest hash "
              << manifest.at("content_hash").get<std::string>() << '\n';
    return kExitOk;
}

struct EvalArgs {
    std::string dataset;
    std::string sampler = "mc";
    std::string results;
    std::string metrics = "iou,l1,psnr";
    std::optional<std::string> config_path;
    std::string out;
};

int run_eval(const EvalArgs& args) {
    AppConfig config = load_app_config(args.config_path);

    EvalOptions options;
    options.config = config.pipeline;
    options.metrics.clear();
    std::stringstream metric_stream(args.metrics);
    for (std::string m; std::getline(metric_stream, m, ',');) {
        if (!m.empty()) options.metrics.push_back(m);
    }

    BackendFactory factory;
    if (!args.results.empty()) {
        options.method = "external";
        options.results_dir = fs::path(args.results);
        factory = [](const EvalSample&) { return BackendSet{}; };
    } else {
        options.method = args.sampler;
        options.sampler = sampler_from_string(args.sampler);
        if (config.backends.mode == "remote") {
            const BackendSet shared = make_remote_backends(
                config.backends.url, config.pipeline.total_steps, /*with_metric=*/true);
            factory = [shared](const EvalSample&) { return shared; };
        } else {
            factory = mock_backend_factory();
        }
    }

    const nlohmann::json report = evaluate(args.dataset, options, factory);
    if (!args.out.empty()) {
        std::ofstream out(args.out);
        out << report.dump(2) << '\n';
        const fs::path csv_path = fs::path(args.out).replace_extension(".csv");
        std::ofstream csv(csv_path);
        csv << report_to_csv(report);
    }
    std::cout << report_to_csv(report);
    for (const auto& notice : report.at("notices")) {
        std::cerr << "notice: " << notice.get<std::string>() << '\n';
    }
    return kExitOk;
}

struct BackendsArgs {
    std::optional<std::string> config_path;
    std::string scene;
};

int run_backends_check(const BackendsArgs& args) {
    AppConfig config = load_app_config(args.config_path);
    if (!args.scene.empty()) {
        config.backends.mode = "mock";
        config.backends.scene = args.scene;
    }
    if (config.backends.mode == "remote") {
        RemoteChannel channel(config.backends.url);
        channel.ping("backends-check");
        std::cout << "ping ok: " << config.backends.url << '\n';
    }
    const BackendSet backends = make_backends(config, /*with_metric=*/true);
    const auto show = [](const char* role, const auto& backend) {
        std::cout << role << ": " << backend->name() << " " << backend->version()
                  << '\n';
    };
    show("diffusion", backends.diffusion);
    show("segmentation", backends.segmentation);
    show("depth", backends.depth);
    show("removal", backends.removal);
    if (backends.metric) show("metric", backends.metric);
    return kExitOk;
}

int dispatch(int argc, char** argv) {
    CLI::App app{"Amodal completion: recover the hidden pixels of occluded objects"};
    app.require_subcommand(1);

    CompleteArgs complete;
    CLI::App* cmd_complete = app.add_subcommand(
        "complete", "Run the progressive completion pipeline on one image");
    cmd_complete->add_option("--image", complete.image, "Input RGB PNG");
    cmd_complete->add_option("--query", complete.query, "Object category to complete")
        ->required();
    cmd_complete->add_option("--point", complete.point, "Seed point X,Y");
    cmd_complete->add_option("--sampler", complete.sampler, "mc | plain | naive");
    cmd_complete->add_option("--seed", complete.seed, "RNG seed");
    cmd_complete->add_option("--k", complete.k, "Composite timestep");
    cmd_complete->add_option("--layer", complete.layer, "Decoder feature layer (1-4)");
    cmd_complete->add_option("--background", complete.background,
                             "gray|white|black|forest|sky|original");
    cmd_complete->add_option("--variants", complete.variants, "Seed-distinct runs")
        ->check(CLI::PositiveNumber);
    cmd_complete->add_flag("--debug-trace", complete.debug_trace,
                           "Persist sampler diagnostics per iteration");
    cmd_complete->add_option("--config", complete.config_path, "Config JSON path");
    cmd_complete->add_option("--scene", complete.scene,
                             "Scripted scene JSON (mock backends)");
    cmd_complete->add_option("--out", complete.out, "Output bundle directory")
        ->required();
    cmd_complete->add_flag("--json", complete.json, "Machine-readable stdout");

    CurateArgs curate;
    CLI::App* cmd_curate =
        app.add_subcommand("curate", "Counterfactual completeness check on bundles");
    auto* opt_bundle = cmd_curate->add_option("--bundle", curate.bundle,
                                              "One bundle directory");
    cmd_curate->add_option("--batch", curate.batch, "Directory of bundle directories")
        ->excludes(opt_bundle);
    cmd_curate->add_option("--labels", curate.labels,
                           "Ground-truth labels JSON (id -> complete/incomplete)");
    cmd_curate->add_option("--config", curate.config_path, "Config JSON path");
    cmd_curate->add_option("--scene", curate.scene,
                           "Scripted scene JSON (mock backends)");
    cmd_curate->add_option("--out", curate.out, "Write the verdict JSON here too");

    CLI::App* cmd_dataset =
        app.add_subcommand("dataset", "Pseudo-occlusion dataset tools");
    cmd_dataset->require_subcommand(1);
    DatasetArgs dataset;
    CLI::App* cmd_build =
        cmd_dataset->add_subcommand("build", "Synthesize an occlusion dataset");
    cmd_build->add_option("--pool", dataset.pool, "Object pool directory")->required();
    cmd_build->add_option("--easy", dataset.easy, "Easy samples (20-50% occluded)")
        ->required();
    cmd_build->add_option("--hard", dataset.hard, "Hard samples (50-80% occluded)")
        ->required();
    cmd_build->add_option("--seed", dataset.seed, "RNG seed");
    cmd_build->add_option("--out", dataset.out, "Dataset output directory")->required();

    EvalArgs eval;
    CLI::App* cmd_eval =
        app.add_subcommand("eval", "Score completions against dataset ground truth");
    cmd_eval->add_option("--dataset", eval.dataset, "Dataset directory")->required();
    cmd_eval->add_option("--sampler", eval.sampler, "mc | plain | naive");
    cmd_eval->add_option("--results", eval.results,
                         "External results directory (<id>.png + <id>.mask.png)");
    cmd_eval->add_option("--metrics", eval.metrics, "CSV of iou,l1,psnr,external");
    cmd_eval->add_option("--config", eval.config_path, "Config JSON path");
    cmd_eval->add_option("--out", eval.out, "Report JSON path (CSV written beside)");

    BackendsArgs backends_args;
    CLI::App* cmd_backends = app.add_subcommand("backends", "Backend utilities");
    cmd_backends->require_subcommand(1);
    CLI::App* cmd_check =
        cmd_backends->add_subcommand("check", "Ping backends and print versions");
    cmd_check->add_option("--config", backends_args.config_path, "Config JSON path");
    cmd_check->add_option("--scene", backends_args.scene,
                          "Scripted scene JSON (mock backends)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_name() == "CallForHelp" || e.get_name() == "CallForVersion"
                   ? kExitOk
                   : kExitUsage;
    }

    const std::string command_line = join_args(argc, argv);
    if (cmd_complete->parsed()) return run_complete(complete, command_line);
    if (cmd_curate->parsed()) {
        if (curate.bundle.empty() && curate.batch.empty()) {
            std::cerr << "curate: one of --bundle or --batch is required\n";
            return kExitUsage;
        }
        return run_curate(curate);
    }
    if (cmd_dataset->parsed()) return run_dataset_build(dataset);
    if (cmd_eval->parsed()) return run_eval(eval);
    if (cmd_backends->parsed()) return run_backends_check(backends_args);
    return kExitUsage;
}

}  // namespace
}  // namespace amodal::cli

int main(int argc, char** argv) {
    using namespace amodal;
    try {
        return cli::dispatch(argc, argv);
    } catch (const CLI::Error& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return cli::kExitUsage;
    } catch (const QueryResolutionError& e) {
        std::cerr << "query resolution error: " << e.what() << '\n';
        return cli::kExitQueryResolution;
    } catch (const TransportError& e) {
        std::cerr << "backend transport error: " << e.what() << '\n';
        return cli::kExitBackendTransport;
    } catch (const ContractError& e) {
        std::cerr << "backend contract error: " << e.what() << '\n';
        return cli::kExitBackendContract;
    } catch (const AmodalError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::kExitBackendContract;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::kExitUsage;
    }
}
