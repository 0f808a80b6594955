#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "amodal/core/image.hpp"
#include "amodal/core/mask.hpp"

namespace amodal {

/// Base class for backend-private state payloads. Polymorphic so a backend
/// can recognize its own states and reject foreign ones.
struct StatePayload {
    virtual ~StatePayload() = default;
};

/// Backend-owned representation of a partially denoised image at a timestep.
/// The handle is opaque to the pipeline; only the backend that produced a
/// state may consume it.
struct NoisyState {
    std::shared_ptr<const StatePayload> handle;
    int timestep = 0;
    int width = 0;
    int height = 0;
};

/// h_f x w_f grid of d-dimensional feature vectors, one row per cell
/// (cell index = y * grid_w + x).
struct FeatureMap {
    int grid_w = 0;
    int grid_h = 0;
    int dim = 0;
    Eigen::MatrixXf values;  // (grid_w * grid_h) x dim
};

struct Instance {
    BinaryMask mask;
    std::string category;
    double score = 0.0;
};

using InstanceSet = std::vector<Instance>;

enum class DepthVerdict { first_closer, second_closer, unknown };

}  // namespace amodal
