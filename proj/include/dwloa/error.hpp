#pragma once

#include <stdexcept>
#include <string>

namespace dwloa {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class LoadError : public Error { using Error::Error; };
class FormatError : public Error { using Error::Error; };
class UnsupportedDatasetError : public Error { using Error::Error; };
class IndexError : public Error { using Error::Error; };
class SizeError : public Error { using Error::Error; };
class NormalizationError : public Error { using Error::Error; };
class DimensionError : public Error { using Error::Error; };
class ClassError : public Error { using Error::Error; };
class NumericError : public Error { using Error::Error; };
class CoverageError : public Error { using Error::Error; };
class ConfigError : public Error { using Error::Error; };

/// Raised when a pipeline's estimated footprint exceeds the configured memory cap.
class ResourceError : public Error {
public:
    ResourceError(const std::string& what, std::size_t required, std::size_t cap)
        : Error(what), required_bytes(required), cap_bytes(cap) {}
    std::size_t required_bytes;
    std::size_t cap_bytes;
};

}  // namespace dwloa
