#pragma once

#include <stdexcept>
#include <string>

namespace floatbook {

// Bad input data or configuration: parse failures, validation failures,
// impossible updates demanded by the data. Maps to exit code 1.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// A model invariant no longer holds (conservation, bounds). Maps to exit code 2.
class InvariantError : public std::runtime_error {
public:
    explicit InvariantError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace floatbook
