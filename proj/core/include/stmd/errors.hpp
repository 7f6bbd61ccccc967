#pragma once

#include <stdexcept>
#include <string>

namespace stmd {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Kernel or grid dimensions are incompatible.
class SizingError : public Error {
public:
    using Error::Error;
};

// A numeric parameter is out of its admissible range.
class ParameterError : public Error {
public:
    using Error::Error;
};

// Frame indices pushed out of order.
class OrderingError : public Error {
public:
    using Error::Error;
};

// Not enough temporal history yet. Pipelines catch this and emit zeros.
class WarmupError : public Error {
public:
    using Error::Error;
};

// Membrane potentials exceeded the configured ceiling.
class NumericRunawayError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace stmd
