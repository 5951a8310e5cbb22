#pragma once

#include <stdexcept>
#include <string>

namespace enki {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree (member counts, state or observation sizes).
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Non-finite or otherwise unusable input vector.
class InputError : public Error {
public:
    using Error::Error;
};

/// A forward model failed to evaluate.
class ModelError : public Error {
public:
    using Error::Error;
};

/// Invalid parameters or a missing capability (e.g. no linear matrix).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A linear solve or decomposition failed.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// An integrator produced non-finite state or tripped a guard.
class DivergenceError : public Error {
public:
    using Error::Error;
};

}  // namespace enki
