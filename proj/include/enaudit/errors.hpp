#pragma once

#include <stdexcept>
#include <string>

namespace enaudit {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad caller input (out-of-range address, malformed flag value).
struct InputError : Error {
    using Error::Error;
};

// Malformed file content; message carries the line number where known.
struct ParseError : Error {
    using Error::Error;
};

// Timestamps or samples out of order.
struct OrderingError : Error {
    using Error::Error;
};

// A requested window is not covered by the available samples.
struct CoverageError : Error {
    using Error::Error;
};

struct InsufficientDataError : Error {
    using Error::Error;
};

// Per-pid ticks exceed the system total, or share fractions sum past 1.
struct AccountingError : Error {
    using Error::Error;
};

// Division by zero goals / zero baseline EpG.
struct UndefinedMetricError : Error {
    using Error::Error;
};

// The platform lacks a counter the requested operation needs.
struct CapabilityGapError : Error {
    using Error::Error;
};

struct LoadError : Error {
    using Error::Error;
};

}  // namespace enaudit
