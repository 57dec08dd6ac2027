#pragma once

#include <stdexcept>
#include <string>

namespace phasemem {

/// Input outside an operation's domain (bad parameters, malformed series).
class DomainError : public std::invalid_argument {
public:
    explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

/// Malformed configuration (bounds, grids, ensemble settings).
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// A numeric invariant was found broken at runtime.
class ContractViolation : public std::runtime_error {
public:
    explicit ContractViolation(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace phasemem
