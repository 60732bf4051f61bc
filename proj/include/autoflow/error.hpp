#pragma once

#include <stdexcept>
#include <string>

namespace autoflow {

enum class ErrorCode {
    ParseError,
    EmptyInput,
    NotBinary,
    MissingTarget,
    InvalidOrder,
    DuplicateStage,
    SchemaMismatch,
    NotAnEstimator,
    NoProbability,
    CannotImpute,
    NeedsEncoding,
    InvalidComponents,
    CannotStratify,
    UnknownModel,
    UnknownParam,
    DegenerateTarget,
    UndefinedAuc,
    DegenerateFold,
    NothingToCompare,
    NotAModelFile,
    UnsupportedVersion,
    NoImportance,
    EmptyChart,
    MissingValues,
    IoError,
    BadConfig,
};

const char* error_code_name(ErrorCode code);

/// Library-wide exception. Every documented failure mode carries a stable
/// ErrorCode so callers (and tests) can match on the condition, not the text.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace autoflow
