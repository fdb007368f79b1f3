#pragma once

#include <stdexcept>
#include <string>

namespace lrtfr {

// Shape disagreement between operands (wrong unfolding width, mismatched grids, ...).
class DimensionError : public std::invalid_argument {
public:
    explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

// Coordinate outside the interval a model was trained on (or a non-integer
// coordinate fed to an integer-grid lookup).
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// Malformed or truncated file content.
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

// Filesystem-level failure (open, rename, short write).
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Non-finite values where finite ones are required, SVD breakdown, diverged fit.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lrtfr
