/// @file errors.hpp
/// @brief Error kinds raised across the toolkit.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace perfhom {

enum class ErrorKind {
    InvalidGeometry,
    MeshQuality,
    StitchFailure,
    NotElliptic,
    NotPositive,
    EmptySigma,
    MissingTag,
    ConflictingConstraints,
    SolverBreakdown,
    Incompatible,
    MeshMismatch,
    CoercivityFailed,
    ProvenanceMismatch,
    InvalidConfig,
};

std::string_view to_string(ErrorKind kind);

/// Validation errors (bad input data, failed gates) map to CLI exit code 2;
/// everything else (numerical breakdown, meshing/stitching failures) to 3.
bool is_validation_error(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace perfhom
