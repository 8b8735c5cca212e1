#pragma once

#include <stdexcept>
#include <string>

namespace anytime {

// Raised when an invariant that must hold over a true erasure channel is
// violated (inconsistent syndrome system, write-once contradiction, empty
// set intersection). Maps to CLI exit code 3.
class internal_corruption_error : public std::logic_error {
public:
    explicit internal_corruption_error(const std::string& what)
        : std::logic_error(what) {}
};

// Raised when the modulo unwrap window is too wide for the configured
// quantizer. Distinct from channel failures; the simulation loop converts
// it into a divergence-flagged trial record.
class quantizer_overflow_error : public std::runtime_error {
public:
    explicit quantizer_overflow_error(const std::string& what)
        : std::runtime_error(what) {}
};

// Raised when an exhaustive-enumeration operation is asked to exceed its
// configured budget. The caller must switch to a Monte-Carlo estimate.
class budget_exceeded_error : public std::invalid_argument {
public:
    explicit budget_exceeded_error(const std::string& what)
        : std::invalid_argument(what) {}
};

}  // namespace anytime
