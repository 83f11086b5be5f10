#pragma once

#include <stdexcept>
#include <string>

namespace flip {

// Error taxonomy. The CLI maps these onto process exit codes
// (config 2, io 3, capacity 4).
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A caller violated a documented precondition.
struct ContractError : Error {
    using Error::Error;
};

// Qubit / parameter-slot index out of range.
struct IndexError : Error {
    using Error::Error;
};

// Malformed configuration or manifest.
struct ConfigError : Error {
    using Error::Error;
};

// Problem size exceeds what the dense backends support.
struct CapacityError : Error {
    using Error::Error;
};

// File system failure.
struct IoError : Error {
    using Error::Error;
};

} // namespace flip
