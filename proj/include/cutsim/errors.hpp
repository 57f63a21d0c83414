#pragma once

#include <stdexcept>
#include <string>

namespace cutsim {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error("config: " + msg) {}
};

struct ParameterDomainError : std::invalid_argument {
    explicit ParameterDomainError(const std::string& msg)
        : std::invalid_argument("parameter domain: " + msg) {}
};

struct InvertedElementError : std::runtime_error {
    explicit InvertedElementError(const std::string& msg)
        : std::runtime_error("inverted element: " + msg) {}
};

struct OutOfDomainError : std::runtime_error {
    explicit OutOfDomainError(const std::string& msg)
        : std::runtime_error("out of domain: " + msg) {}
};

struct DivergenceError : std::runtime_error {
    explicit DivergenceError(const std::string& msg)
        : std::runtime_error("numerical divergence: " + msg) {}
};

struct PlanningError : std::runtime_error {
    explicit PlanningError(const std::string& msg) : std::runtime_error("planning: " + msg) {}
};

struct FitError : std::runtime_error {
    explicit FitError(const std::string& msg) : std::runtime_error("fit: " + msg) {}
};

struct InstructionParseError : std::runtime_error {
    // Carries the byte span of the offending token inside the input string.
    InstructionParseError(const std::string& msg, size_t begin, size_t end)
        : std::runtime_error("parse: " + msg + " [span " + std::to_string(begin) + ":" +
                             std::to_string(end) + "]"),
          span_begin(begin),
          span_end(end) {}
    size_t span_begin;
    size_t span_end;
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error("io: " + msg) {}
};

}  // namespace cutsim
