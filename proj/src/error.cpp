// Copyright 2026 The polsfp Authors
// SPDX-License-Identifier: Apache-2.0

#include "polsfp/error.hpp"

namespace polsfp {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::DegenerateFit: return "DegenerateFit";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::EmptyMask: return "EmptyMask";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::HeaderParse: return "HeaderParse";
    case ErrorCode::TruncatedPayload: return "TruncatedPayload";
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::NonUnitNormals: return "NonUnitNormals";
    case ErrorCode::SideTooLarge: return "SideTooLarge";
    case ErrorCode::UnassignedObject: return "UnassignedObject";
    case ErrorCode::OverlappingSets: return "OverlappingSets";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::DataError: return "DataError";
    case ErrorCode::UsageError: return "UsageError";
    }
    return "Unknown";
}

}  // namespace polsfp
