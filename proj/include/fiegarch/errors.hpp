#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fiegarch {

/// Base class for every error raised by the library. `kind()` is a short
/// machine-readable tag used by the CLI error line.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

struct DomainError : Error {
    explicit DomainError(const std::string& what) : Error("domain", what) {}
};

struct SizingError : Error {
    explicit SizingError(const std::string& what) : Error("sizing", what) {}
};

struct DegenerateModelError : Error {
    explicit DegenerateModelError(const std::string& what) : Error("degenerate-model", what) {}
};

struct SimulationError : Error {
    SimulationError(const std::string& what, std::size_t t)
        : Error("simulation", what + " at t=" + std::to_string(t)), index(t) {}
    std::size_t index;
};

struct FilterError : Error {
    FilterError(const std::string& what, std::size_t t)
        : Error("filter", what + " at t=" + std::to_string(t)), index(t) {}
    std::size_t index;
};

struct HyperparameterError : Error {
    explicit HyperparameterError(const std::string& what) : Error("hyperparameter", what) {}
};

struct SamplerStateError : Error {
    explicit SamplerStateError(const std::string& what) : Error("sampler-state", what) {}
};

struct InitializationError : Error {
    explicit InitializationError(const std::string& what) : Error("initialization", what) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error("usage", what) {}
};

struct IoError : Error {
    explicit IoError(const std::string& what) : Error("io", what) {}
};

}  // namespace fiegarch
