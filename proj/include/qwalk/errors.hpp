#pragma once

#include <stdexcept>
#include <string>

namespace qwalk {

/// Raised when amplitude would be shifted past the lattice boundary.
/// The lattice was sized too small for the requested number of steps.
class EdgeContactError : public std::runtime_error {
public:
    explicit EdgeContactError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when a state's norm has drifted away from 1.
class CorruptedStateError : public std::runtime_error {
public:
    explicit CorruptedStateError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace qwalk
