#include "amodal/dataset/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>

#include "amodal/core/error.hpp"
#include "amodal/io/png_io.hpp"
#include "amodal/util/hash.hpp"

namespace amodal {

namespace fs = std::filesystem;

ObjectCutout scale_cutout(const ObjectCutout& cutout, double scale) {
    if (scale <= 0.0) throw ContractError("scale_cutout: non-positive scale");
    const int sw = std::max(1, static_cast<int>(std::lround(cutout.image.width() * scale)));
    const int sh = std::max(1, static_cast<int>(std::lround(cutout.image.height() * scale)));

    ObjectCutout out;
    out.category = cutout.category;
    out.image = ImageBuffer(sw, sh, Rgb{0, 0, 0});
    out.mask = BinaryMask(sw, sh);
    for (int y = 0; y < sh; ++y) {
        const int sy = std::min(cutout.image.height() - 1,
                                static_cast<int>(static_cast<std::int64_t>(y) *
                                                 cutout.image.height() / sh));
        for (int x = 0; x < sw; ++x) {
            const int sx = std::min(cutout.image.width() - 1,
                                    static_cast<int>(static_cast<std::int64_t>(x) *
                                                     cutout.image.width() / sw));
            out.image.set(x, y, cutout.image.at(sx, sy));
            out.mask.set(x, y, cutout.mask.at(sx, sy));
        }
    }
    return out;
}

namespace {

/// Tight crop of a cutout to its mask bbox.
ObjectCutout crop_to_content(const ObjectCutout& cutout) {
    const auto box = bbox_of_mask(cutout.mask);
    if (!box) throw ContractError("occluder cutout has an empty mask");
    ObjectCutout out;
    out.category = cutout.category;
    out.image = image_crop(cutout.image, *box);
    out.mask = mask_crop(cutout.mask, *box);
    return out;
}

}  // namespace

PseudoOcclusionSample synthesize_occlusion(const ObjectCutout& base,
                                           const ObjectCutout& occluder,
                                           const RateBand& band,
                                           DeterministicRng& rng,
                                           const PlacementLimits& limits) {
    const auto base_area = mask_area(base.mask);
    if (base_area == 0) throw ContractError("synthesize_occlusion: empty base mask");
    const ObjectCutout content = crop_to_content(occluder);
    const int bw = base.image.width();
    const int bh = base.image.height();

    for (int attempt = 0; attempt < limits.max_attempts; ++attempt) {
        double scale = rng.uniform_real(limits.scale_lo, limits.scale_hi);
        // Shrink until the scaled cutout fits inside the base frame.
        const double fit = std::min(static_cast<double>(bw) / content.image.width(),
                                    static_cast<double>(bh) / content.image.height());
        scale = std::min(scale, fit);
        const ObjectCutout placed_cut = scale_cutout(content, scale);
        if (placed_cut.image.width() > bw || placed_cut.image.height() > bh) continue;

        const int ox = static_cast<int>(
            rng.uniform_int(0, bw - placed_cut.image.width()));
        const int oy = static_cast<int>(
            rng.uniform_int(0, bh - placed_cut.image.height()));

        BinaryMask placed(bw, bh);
        mask_paste(placed, placed_cut.mask, ox, oy);
        const double rate =
            static_cast<double>(mask_area(mask_intersect(base.mask, placed))) /
            static_cast<double>(base_area);
        if (!band.contains(rate)) continue;

        PseudoOcclusionSample sample;
        sample.base_image = base.image;
        sample.gt_object_mask = base.mask;
        sample.occluder_mask = placed;
        sample.occluded_image = base.image;
        for (int y = 0; y < placed_cut.image.height(); ++y) {
            for (int x = 0; x < placed_cut.image.width(); ++x) {
                if (placed_cut.mask.at(x, y)) {
                    sample.occluded_image.set(ox + x, oy + y, placed_cut.image.at(x, y));
                }
            }
        }
        sample.occluded_modal_mask = mask_difference(base.mask, placed);
        sample.occlusion_rate = rate;
        sample.category = base.category;
        sample.occluder_category = occluder.category;
        sample.scale = scale;
        sample.offset_x = ox;
        sample.offset_y = oy;
        return sample;
    }
    throw ContractError("synthesize_occlusion: band unreachable within attempt budget");
}

std::vector<ObjectCutout> load_object_pool(const fs::path& pool_dir) {
    if (!fs::is_directory(pool_dir)) {
        throw ContractError("object pool is not a directory: " + pool_dir.string());
    }
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(pool_dir)) {
        const std::string fname = entry.path().filename().string();
        if (fname.size() > 4 && fname.ends_with(".png") &&
            !fname.ends_with(".mask.png")) {
            names.push_back(fname.substr(0, fname.size() - 4));
        }
    }
    std::sort(names.begin(), names.end());

    std::vector<ObjectCutout> pool;
    for (const std::string& name : names) {
        const fs::path mask_path = pool_dir / (name + ".mask.png");
        if (!fs::exists(mask_path)) {
            throw ContractError("pool entry missing mask: " + mask_path.string());
        }
        ObjectCutout cut;
        cut.image = read_image_png((pool_dir / (name + ".png")).string());
        cut.mask = read_mask_png(mask_path.string());
        cut.category = name;
        if (!cut.image.same_dims(cut.mask)) {
            throw ContractError("pool entry dims mismatch: " + name);
        }
        pool.push_back(std::move(cut));
    }
    if (pool.size() < 2) {
        throw ContractError("object pool needs at least two entries");
    }
    return pool;
}

nlohmann::json build_dataset(const fs::path& pool_dir, int easy_count, int hard_count,
                             std::uint64_t seed, const fs::path& out_dir,
                             const PlacementLimits& limits) {
    if (easy_count < 0 || hard_count < 0) {
        throw ContractError("build_dataset: negative count");
    }
    const std::vector<ObjectCutout> pool = load_object_pool(pool_dir);
    fs::create_directories(out_dir);

    DeterministicRng rng(seed);
    nlohmann::json samples = nlohmann::json::array();

    const auto emit = [&](const std::string& difficulty, const RateBand& band,
                          int count) {
        for (int i = 0; i < count; ++i) {
            const std::string id = difficulty + "_" + std::to_string(i);
            std::optional<PseudoOcclusionSample> sample;
            // A stubborn pair (object too small to hide enough of the base,
            // or too big to hide little) just gets re-drawn.
            for (int pair_try = 0; pair_try < 50 && !sample; ++pair_try) {
                const auto n = static_cast<std::int64_t>(pool.size());
                const auto bi = static_cast<std::size_t>(rng.uniform_int(0, n - 1));
                auto oi = static_cast<std::size_t>(rng.uniform_int(0, n - 2));
                if (oi >= bi) ++oi;
                try {
                    sample = synthesize_occlusion(pool[bi], pool[oi], band, rng, limits);
                } catch (const ContractError&) {
                }
            }
            if (!sample) {
                throw ContractError("build_dataset: could not reach band for " + id);
            }
            sample->difficulty = difficulty;

            write_image_png(sample->occluded_image, (out_dir / (id + ".png")).string());
            write_mask_png(sample->occluded_modal_mask,
                           (out_dir / (id + ".modal.png")).string());
            write_image_png(sample->base_image, (out_dir / (id + ".gt.png")).string());
            write_mask_png(sample->gt_object_mask,
                           (out_dir / (id + ".gt_mask.png")).string());
            write_mask_png(sample->occluder_mask,
                           (out_dir / (id + ".occluder_mask.png")).string());

            samples.push_back(nlohmann::json{
                {"id", id},
                {"difficulty", difficulty},
                {"category", sample->category},
                {"occluder_category", sample->occluder_category},
                {"occlusion_rate", sample->occlusion_rate},
                {"scale", sample->scale},
                {"offset", {sample->offset_x, sample->offset_y}},
                {"files",
                 {{"occluded", id + ".png"},
                  {"modal", id + ".modal.png"},
                  {"gt_image", id + ".gt.png"},
                  {"gt_mask", id + ".gt_mask.png"},
                  {"occluder_mask", id + ".occluder_mask.png"}}},
            });
        }
    };
    emit("easy", kEasyBand, easy_count);
    emit("hard", kHardBand, hard_count);

    nlohmann::json manifest{{"schema", "amodal-dataset/1"},
                            {"seed", seed},
                            {"easy_count", easy_count},
                            {"hard_count", hard_count},
                            {"samples", std::move(samples)}};
    nlohmann::json hashes = nlohmann::json::object();
    for (const auto& row : manifest["samples"]) {
        for (const auto& [_, rel] : row.at("files").items()) {
            const std::string name = rel.get<std::string>();
            hashes[name] = file_hash_hex((out_dir / name).string());
        }
    }
    manifest["files"] = std::move(hashes);
    manifest["content_hash"] = content_hash_hex(manifest.dump());

    std::ofstream out(out_dir / "manifest.json");
    out << manifest.dump(2) << '\n';
    return manifest;
}

}  // namespace amodal
