#pragma once

#include <stdexcept>
#include <string>

namespace splatprune {

// Base for every error raised by the library. CLI maps these to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input violates a documented invariant (bad camera, non-finite field, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

class DegenerateRotationError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class BehindCameraError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// A score function that compares against C_GT was asked to run on a view without one.
class MissingGroundTruthError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class DimensionMismatchError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// Filesystem or codec failure.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace splatprune
