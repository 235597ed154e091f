#ifndef HRPCA_ERRORS_HPP
#define HRPCA_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hrpca {

// Base class for every error raised by this library. Each subclass maps to
// one failure category of the public contracts (and to one CLI exit code).
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or empty data handed to an operation.
class InvalidInput : public Error {
public:
    using Error::Error;
};

// Configuration value outside its allowed range.
class InvalidConfig : public Error {
public:
    using Error::Error;
};

// Iterative numerical procedure did not converge.
class NumericalFailure : public Error {
public:
    NumericalFailure(const std::string& msg, std::size_t iterations)
        : Error(msg + " (after " + std::to_string(iterations) + " iterations)"),
          iterations_(iterations) {}

    std::size_t iterations() const { return iterations_; }

private:
    std::size_t iterations_;
};

// Spectrum carries no usable energy (e.g. all training rows identical).
class DegenerateSpectrum : public Error {
public:
    using Error::Error;
};

// Data columns do not match the schema a model or reader expects.
class SchemaMismatch : public Error {
public:
    using Error::Error;
};

// Row/group counts do not line up (e.g. rollup divisibility).
class ShapeError : public Error {
public:
    using Error::Error;
};

// Filesystem-level failure while reading or writing an artifact.
class StorageError : public Error {
public:
    StorageError(const std::string& msg, const std::string& path)
        : Error(msg + ": " + path), path_(path) {}

    const std::string& path() const { return path_; }

private:
    std::string path_;
};

// Stored content hash does not match the recomputed one.
class IntegrityError : public Error {
public:
    using Error::Error;
};

// Persisted document has an unsupported format version.
class VersionError : public Error {
public:
    using Error::Error;
};

// Document or file could not be parsed; message carries the location.
class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace hrpca

#endif  // HRPCA_ERRORS_HPP
