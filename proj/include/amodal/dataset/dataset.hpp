#pragma once

#include <filesystem>
#include <nlohmann/json_fwd.hpp>
#include <string>

#include "amodal/core/image.hpp"
#include "amodal/core/mask.hpp"
#include "amodal/util/rng.hpp"

namespace amodal {

struct RateBand {
    double lo = 0.0;
    double hi = 1.0;
    bool hi_inclusive = false;

    bool contains(double rate) const {
        return rate >= lo && (hi_inclusive ? rate <= hi : rate < hi);
    }
};

// Difficulty bands: easy = 20-50% of the object hidden, hard = 50-80%.
inline constexpr RateBand kEasyBand{0.20, 0.50, false};
inline constexpr RateBand kHardBand{0.50, 0.80, true};

struct ObjectCutout {
    ImageBuffer image;
    BinaryMask mask;
    std::string category;
};

struct PseudoOcclusionSample {
    ImageBuffer base_image;          // the intact object A in situ
    BinaryMask gt_object_mask;       // M_A
    BinaryMask occluder_mask;        // M_B after scaling + placement
    ImageBuffer occluded_image;      // base with B pasted on top
    BinaryMask occluded_modal_mask;  // M_A minus M_B
    double occlusion_rate = 0.0;     // |M_A intersect M_B| / |M_A|
    std::string difficulty;          // "easy" | "hard"
    std::string category;
    std::string occluder_category;
    double scale = 1.0;
    int offset_x = 0;
    int offset_y = 0;
};

struct PlacementLimits {
    double scale_lo = 0.3;
    double scale_hi = 1.5;
    int max_attempts = 1000;
};

/// Nearest-neighbor rescale of a cutout (image + mask together).
ObjectCutout scale_cutout(const ObjectCutout& cutout, double scale);

/// Rejection-sample an occluder placement over the base object until the
/// hidden fraction of the object lands in the band. Throws ContractError
/// when the band is unreachable within the attempt budget.
PseudoOcclusionSample synthesize_occlusion(const ObjectCutout& base,
                                           const ObjectCutout& occluder,
                                           const RateBand& band,
                                           DeterministicRng& rng,
                                           const PlacementLimits& limits = {});

/// Read a pool directory of `<name>.png` + `<name>.mask.png` pairs; the
/// category is the file stem. Sorted by name for determinism.
std::vector<ObjectCutout> load_object_pool(const std::filesystem::path& pool_dir);

/// Build `easy_count + hard_count` samples into `out_dir`, one file set per
/// sample plus a deterministic manifest.json with a content hash.
nlohmann::json build_dataset(const std::filesystem::path& pool_dir, int easy_count,
                             int hard_count, std::uint64_t seed,
                             const std::filesystem::path& out_dir,
                             const PlacementLimits& limits = {});

}  // namespace amodal
