#pragma once

#include <stdexcept>
#include <string>

namespace tailor {

// Bad configuration: unknown keys, invalid values, missing files the
// operator named explicitly.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Filesystem and serialization failures.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Violated domain contracts: empty catalogs, invalid profiles, replanning
// an already planned date without force.
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace tailor
