#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace treefdr {

enum class ErrorCode {
    EmptyInput,
    EmptyFamily,
    PvalueOutOfRange,
    DuplicateLeafPath,
    InconsistentDepth,
    InvalidNodeId,
    RootHasNoAncestors,
    NonPositiveM,
    MissingLeafPvalue,
    MissingInternalPvalue,
    InvalidBound,
    ConfigLengthMismatch,
    LevelOutOfRange,
    InconsistentTruth,
    ParseError,
    ValidationError,
    SpecError,
    TreeMismatch,
    IoError,
};

std::string_view code_name(ErrorCode code) noexcept;

// Every library failure is reported through this type. `line` is set for
// errors that originate from a specific line of an input file.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what, std::optional<std::size_t> line = std::nullopt);

    ErrorCode code() const noexcept { return code_; }
    std::optional<std::size_t> line() const noexcept { return line_; }

private:
    ErrorCode code_;
    std::optional<std::size_t> line_;
};

}  // namespace treefdr
