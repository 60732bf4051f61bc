#include "autoflow/error.hpp"

namespace autoflow {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::NotBinary: return "NotBinary";
        case ErrorCode::MissingTarget: return "MissingTarget";
        case ErrorCode::InvalidOrder: return "InvalidOrder";
        case ErrorCode::DuplicateStage: return "DuplicateStage";
        case ErrorCode::SchemaMismatch: return "SchemaMismatch";
        case ErrorCode::NotAnEstimator: return "NotAnEstimator";
        case ErrorCode::NoProbability: return "NoProbability";
        case ErrorCode::CannotImpute: return "CannotImpute";
        case ErrorCode::NeedsEncoding: return "NeedsEncoding";
        case ErrorCode::InvalidComponents: return "InvalidComponents";
        case ErrorCode::CannotStratify: return "CannotStratify";
        case ErrorCode::UnknownModel: return "UnknownModel";
        case ErrorCode::UnknownParam: return "UnknownParam";
        case ErrorCode::DegenerateTarget: return "DegenerateTarget";
        case ErrorCode::UndefinedAuc: return "UndefinedAUC";
        case ErrorCode::DegenerateFold: return "DegenerateFold";
        case ErrorCode::NothingToCompare: return "NothingToCompare";
        case ErrorCode::NotAModelFile: return "NotAModelFile";
        case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
        case ErrorCode::NoImportance: return "NoImportance";
        case ErrorCode::EmptyChart: return "EmptyChart";
        case ErrorCode::MissingValues: return "MissingValues";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::BadConfig: return "BadConfig";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace autoflow
