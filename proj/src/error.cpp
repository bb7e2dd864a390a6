#include "treefdr/error.hpp"

namespace treefdr {

std::string_view code_name(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::EmptyFamily: return "EmptyFamily";
        case ErrorCode::PvalueOutOfRange: return "PvalueOutOfRange";
        case ErrorCode::DuplicateLeafPath: return "DuplicateLeafPath";
        case ErrorCode::InconsistentDepth: return "InconsistentDepth";
        case ErrorCode::InvalidNodeId: return "InvalidNodeId";
        case ErrorCode::RootHasNoAncestors: return "RootHasNoAncestors";
        case ErrorCode::NonPositiveM: return "NonPositiveM";
        case ErrorCode::MissingLeafPvalue: return "MissingLeafPvalue";
        case ErrorCode::MissingInternalPvalue: return "MissingInternalPvalue";
        case ErrorCode::InvalidBound: return "InvalidBound";
        case ErrorCode::ConfigLengthMismatch: return "ConfigLengthMismatch";
        case ErrorCode::LevelOutOfRange: return "LevelOutOfRange";
        case ErrorCode::InconsistentTruth: return "InconsistentTruth";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::ValidationError: return "ValidationError";
        case ErrorCode::SpecError: return "SpecError";
        case ErrorCode::TreeMismatch: return "TreeMismatch";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

namespace {

std::string decorate(ErrorCode code, const std::string& what, std::optional<std::size_t> line) {
    std::string msg;
    if (line) msg += "line " + std::to_string(*line) + ": ";
    msg += code_name(code);
    if (!what.empty()) msg += ": " + what;
    return msg;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& what, std::optional<std::size_t> line)
    : std::runtime_error(decorate(code, what, line)), code_(code), line_(line) {}

}  // namespace treefdr
