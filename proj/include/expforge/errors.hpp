#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace expforge {

// Malformed or out-of-contract input (unknown symbol, invalid distribution, ...).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An enumeration or grid would exceed the configured size cap.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A computed result contradicts a property that must hold for valid instances.
class ConsistencyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Configuration violations, one entry per offending field path.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> issues);

    const std::vector<std::string>& issues() const noexcept { return issues_; }

private:
    std::vector<std::string> issues_;
};

}  // namespace expforge
