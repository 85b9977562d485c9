// Copyright 2026 The polsfp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace polsfp {

enum class ErrorCode {
    DegenerateFit,
    DimensionMismatch,
    DomainError,
    EmptyMask,
    ShapeMismatch,
    ConfigError,
    BadMagic,
    HeaderParse,
    TruncatedPayload,
    MissingFile,
    NonUnitNormals,
    SideTooLarge,
    UnassignedObject,
    OverlappingSets,
    IoError,
    DataError,
    UsageError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so that
/// the CLI can map it onto an exit status.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace polsfp
