#pragma once

#include <stdexcept>
#include <string>

namespace mbsat {

/// Invalid configuration or scenario file content.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// No decision satisfies the minimum-separation constraint, or the scenario
/// starts in a state that violates it.
class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input outside the domain of an operation (e.g. bearing of co-located points).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Exhaustive enumeration requested on an instance that is too large.
class SizeError : public std::length_error {
public:
    using std::length_error::length_error;
};

} // namespace mbsat
