#pragma once

#include <filesystem>
#include <nlohmann/json_fwd.hpp>

#include "amodal/progressive/pipeline.hpp"

namespace amodal {

/// Write a bundle directory: original.png, amodal.png, amodal_mask.png,
/// overlay.png, manifest.json and iter_<n>/ subdirectories. The manifest is
/// deterministic (sorted keys, no timestamps) and carries a content hash
/// over its own canonical dump plus every artifact file's hash.
/// `debug_trace` additionally persists mixed-context diagnostics per
/// iteration (cluster grid as indexed PNG, intermediate masks, JSON).
/// Returns the manifest that was written.
nlohmann::json write_bundle(const CompletionBundle& bundle,
                            const std::filesystem::path& dir, bool debug_trace);

/// What curation needs back from a bundle directory.
struct StoredBundle {
    ImageBuffer amodal;
    BinaryMask amodal_mask;
    std::string category;
    std::uint64_t seed = 0;
};

StoredBundle load_bundle(const std::filesystem::path& dir);

}  // namespace amodal
