#pragma once

#include <stdexcept>
#include <string>

namespace mptcs {

struct SchemaMismatchError : std::runtime_error {
    explicit SchemaMismatchError(const std::string& what) : std::runtime_error(what) {}
};

struct ActionOutOfRangeError : std::runtime_error {
    explicit ActionOutOfRangeError(const std::string& what) : std::runtime_error(what) {}
};

struct DimensionMismatchError : std::runtime_error {
    explicit DimensionMismatchError(const std::string& what) : std::runtime_error(what) {}
};

struct EmptyTrajectoryError : std::runtime_error {
    explicit EmptyTrajectoryError(const std::string& what) : std::runtime_error(what) {}
};

struct ProvisioningFailedError : std::runtime_error {
    explicit ProvisioningFailedError(const std::string& what) : std::runtime_error(what) {}
};

struct InsufficientPoliciesError : std::runtime_error {
    explicit InsufficientPoliciesError(const std::string& what) : std::runtime_error(what) {}
};

struct EmptySuiteError : std::runtime_error {
    explicit EmptySuiteError(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mptcs
