#include "expforge/errors.hpp"

namespace expforge {

namespace {

std::string join_issues(const std::vector<std::string>& issues) {
    std::string out;
    for (const auto& issue : issues) {
        if (!out.empty()) out += "; ";
        out += issue;
    }
    return out;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

}  // namespace expforge
