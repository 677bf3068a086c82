#pragma once

#include <stdexcept>
#include <string>

namespace splan {

// Bad configuration: unknown keys, empty selections, invalid flag values.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Structural problems with input data: missing columns, empty logs.
struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A single malformed row; carries the 1-based data row index.
struct RowError : std::runtime_error {
    RowError(std::size_t row, const std::string& what)
        : std::runtime_error("row " + std::to_string(row) + ": " + what), row(row) {}
    std::size_t row;
};

// Lookup of a node / feature / student that does not exist.
struct LookupError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerically or logically invalid computation request.
struct ComputeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace splan
