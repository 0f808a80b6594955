#include "amodal/progressive/bundle.hpp"

#include <fstream>
#include <nlohmann/json.hpp>

#include "amodal/core/serialize.hpp"
#include "amodal/io/png_io.hpp"
#include "amodal/util/hash.hpp"

namespace amodal {

namespace fs = std::filesystem;

namespace {

nlohmann::json sides_json(const std::set<Side>& sides) {
    nlohmann::json arr = nlohmann::json::array();
    for (Side s : sides) {
        switch (s) {
            case Side::left: arr.push_back("left"); break;
            case Side::right: arr.push_back("right"); break;
            case Side::top: arr.push_back("top"); break;
            case Side::bottom: arr.push_back("bottom"); break;
        }
    }
    return arr;
}

nlohmann::json cluster_json(const ClusterDiagnostics& diag) {
    nlohmann::json chosen = nlohmann::json::array();
    for (int c : diag.chosen) chosen.push_back(c);
    return nlohmann::json{{"k_effective", diag.k_effective},
                          {"chosen", chosen},
                          {"overlap_ratios", diag.ratios}};
}

void write_trace(const McTrace& trace, const fs::path& dir) {
    fs::create_directories(dir);
    write_image_png(trace.i_syn, (dir / "i_syn.png").string());
    write_mask_png(trace.amodal_k, (dir / "amodal_k.png").string());
    write_indexed_png(trace.clusters.assignments, (dir / "clusters.png").string());
    std::ofstream out(dir / "diagnostics.json");
    out << cluster_json(trace.clusters).dump(2) << '\n';
}

}  // namespace

nlohmann::json write_bundle(const CompletionBundle& bundle, const fs::path& dir,
                            bool debug_trace) {
    fs::create_directories(dir);

    // path (relative to dir) -> written file, for the hash table.
    std::vector<std::string> artifacts;
    const auto put_image = [&](const ImageBuffer& img, const std::string& rel) {
        write_image_png(img, (dir / rel).string());
        artifacts.push_back(rel);
    };
    const auto put_mask = [&](const BinaryMask& mask, const std::string& rel) {
        write_mask_png(mask, (dir / rel).string());
        artifacts.push_back(rel);
    };

    put_image(bundle.original, "original.png");
    put_image(bundle.final_image, "amodal.png");
    put_mask(bundle.final_mask, "amodal_mask.png");
    put_image(bundle.overlay, "overlay.png");

    nlohmann::json iters = nlohmann::json::array();
    for (std::size_t i = 0; i < bundle.iterations.size(); ++i) {
        const IterationRecord& rec = bundle.iterations[i];
        const std::string sub = "iter_" + std::to_string(i);
        fs::create_directories(dir / sub);
        put_image(rec.input_image, sub + "/input.png");
        put_mask(rec.input_modal, sub + "/input_modal.png");
        put_mask(rec.report.occluder_union, sub + "/occluder_union.png");
        put_mask(rec.amodal_mask, sub + "/amodal_mask.png");
        if (rec.sampled) put_image(rec.completed_crop, sub + "/completed_crop.png");
        if (debug_trace && rec.trace) write_trace(*rec.trace, dir / sub / "trace");

        nlohmann::json it{{"index", i},
                          {"report", rec.report.to_json()},
                          {"boundary_sides", sides_json(rec.report.boundary_sides)},
                          {"sampled", rec.sampled},
                          {"segmenter_fallback", rec.segmenter_fallback}};
        if (rec.sampled) it["transform"] = rec.transform.to_json();
        if (rec.trace) it["clusters"] = cluster_json(rec.trace->clusters);
        iters.push_back(std::move(it));
    }

    nlohmann::json manifest{
        {"schema", "amodal-bundle/1"},
        {"query",
         {{"category", bundle.query.category},
          {"seed_point", bundle.query.seed_point
                             ? nlohmann::json{bundle.query.seed_point->first,
                                              bundle.query.seed_point->second}
                             : nlohmann::json(nullptr)}}},
        {"sampler", to_string(bundle.sampler)},
        {"seed", bundle.config.rng_seed},
        {"termination", to_string(bundle.termination)},
        {"origin", {{"x", bundle.origin_x}, {"y", bundle.origin_y}}},
        {"config", config_to_json(bundle.config)},
        {"iterations", std::move(iters)},
    };

    // Trace files are debug-only extras; keep them out of the hashed set so
    // a --debug-trace run hashes the same as a plain one.
    nlohmann::json files = nlohmann::json::object();
    for (const std::string& rel : artifacts) {
        files[rel] = file_hash_hex((dir / rel).string());
    }
    manifest["files"] = std::move(files);
    manifest["content_hash"] = content_hash_hex(manifest.dump());

    std::ofstream out(dir / "manifest.json");
    out << manifest.dump(2) << '\n';
    return manifest;
}

StoredBundle load_bundle(const fs::path& dir) {
    const fs::path manifest_path = dir / "manifest.json";
    std::ifstream in(manifest_path);
    if (!in) throw ContractError("bundle: cannot open " + manifest_path.string());
    nlohmann::json manifest;
    try {
        in >> manifest;
    } catch (const nlohmann::json::exception& e) {
        throw ContractError("bundle: bad manifest: " + std::string(e.what()));
    }

    StoredBundle out;
    out.amodal = read_image_png((dir / "amodal.png").string());
    out.amodal_mask = read_mask_png((dir / "amodal_mask.png").string());
    out.category = manifest.at("query").at("category").get<std::string>();
    out.seed = manifest.value("seed", std::uint64_t{0});
    if (!out.amodal.same_dims(out.amodal_mask)) {
        throw ContractError("bundle: amodal image and mask dims differ");
    }
    return out;
}

}  // namespace amodal
