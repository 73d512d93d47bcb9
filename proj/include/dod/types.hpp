#pragma once

#include <cstdint>
#include <stdexcept>

namespace dod {

// Dense object index, stable for the lifetime of a Dataset.
using ObjectId = std::uint32_t;

// Error categories the CLI maps to process exit codes (2/3/4).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct MismatchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace dod
