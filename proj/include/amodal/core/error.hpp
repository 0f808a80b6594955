#pragma once

#include <stdexcept>
#include <string>

namespace amodal {

struct AmodalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Mismatched raster dimensions between co-indexed inputs.
struct DimensionError : AmodalError {
    using AmodalError::AmodalError;
};

// A backend (or caller) violated an interface contract: bad timestep order,
// invalid layer index, malformed payload, and so on.
struct ContractError : AmodalError {
    using AmodalError::AmodalError;
};

// Remote transport failure. Retryable; distinct from contract errors.
struct TransportError : AmodalError {
    using AmodalError::AmodalError;
};

// The query could not be resolved to a modal mask.
struct QueryResolutionError : AmodalError {
    using AmodalError::AmodalError;
};

}  // namespace amodal
