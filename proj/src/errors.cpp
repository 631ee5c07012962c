#include "perfhom/errors.hpp"

namespace perfhom {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidGeometry: return "InvalidGeometry";
    case ErrorKind::MeshQuality: return "MeshQuality";
    case ErrorKind::StitchFailure: return "StitchFailure";
    case ErrorKind::NotElliptic: return "NotElliptic";
    case ErrorKind::NotPositive: return "NotPositive";
    case ErrorKind::EmptySigma: return "EmptySigma";
    case ErrorKind::MissingTag: return "MissingTag";
    case ErrorKind::ConflictingConstraints: return "ConflictingConstraints";
    case ErrorKind::SolverBreakdown: return "SolverBreakdown";
    case ErrorKind::Incompatible: return "Incompatible";
    case ErrorKind::MeshMismatch: return "MeshMismatch";
    case ErrorKind::CoercivityFailed: return "CoercivityFailed";
    case ErrorKind::ProvenanceMismatch: return "ProvenanceMismatch";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    }
    return "Unknown";
}

bool is_validation_error(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidGeometry:
    case ErrorKind::NotElliptic:
    case ErrorKind::NotPositive:
    case ErrorKind::EmptySigma:
    case ErrorKind::MissingTag:
    case ErrorKind::ConflictingConstraints:
    case ErrorKind::Incompatible:
    case ErrorKind::MeshMismatch:
    case ErrorKind::CoercivityFailed:
    case ErrorKind::ProvenanceMismatch:
    case ErrorKind::InvalidConfig:
        return true;
    case ErrorKind::MeshQuality:
    case ErrorKind::StitchFailure:
    case ErrorKind::SolverBreakdown:
        return false;
    }
    return false;
}

}  // namespace perfhom
