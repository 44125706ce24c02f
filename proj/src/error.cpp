#include "memd/error.hpp"

namespace memd {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyClass: return "EmptyClass";
    case ErrorCode::InvalidMoment: return "InvalidMoment";
    case ErrorCode::SolverDiverged: return "SolverDiverged";
    case ErrorCode::IncompatibleDensities: return "IncompatibleDensities";
    case ErrorCode::WrongArity: return "WrongArity";
    case ErrorCode::MissingComplementModels: return "MissingComplementModels";
    case ErrorCode::OracleTooLarge: return "OracleTooLarge";
    case ErrorCode::InvalidK: return "InvalidK";
    case ErrorCode::EmptyVocabulary: return "EmptyVocabulary";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvalidFolds: return "InvalidFolds";
    case ErrorCode::StratificationError: return "StratificationError";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), message_(message) {}

ParseError::ParseError(std::size_t line, const std::string& message)
    : Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + message), line_(line) {}

}  // namespace memd
