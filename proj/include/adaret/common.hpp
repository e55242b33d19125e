// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

// The numerical stack is compiled twice: single precision for training and the
// CLI, double precision for gradient checking. Each build lives in its own
// inline namespace so both can be linked into one binary.
#if defined(ADARET_DOUBLE)
#define ADARET_BEGIN_NAMESPACE namespace adaret { inline namespace f64 {
#else
#define ADARET_BEGIN_NAMESPACE namespace adaret { inline namespace f32 {
#endif
#define ADARET_END_NAMESPACE } }

namespace adaret {

#if defined(ADARET_DOUBLE)
inline namespace f64 {
using Real = double;
}
#else
inline namespace f32 {
using Real = float;
}
#endif

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Tensor shape or dimension disagreement.
class ShapeError : public Error {
   public:
    using Error::Error;
};

/// Malformed or unusable input data.
class DataError : public Error {
   public:
    using Error::Error;
};

/// Non-finite loss or gradient during training.
class DivergedError : public Error {
   public:
    using Error::Error;
};

/// Checkpoint manifest/payload problems.
class CheckpointError : public Error {
   public:
    using Error::Error;
};

/// Invalid configuration values or keys.
class ConfigError : public Error {
   public:
    using Error::Error;
};

}  // namespace adaret
