#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace memd {

enum class ErrorCode {
  EmptyClass,
  InvalidMoment,
  SolverDiverged,
  IncompatibleDensities,
  WrongArity,
  MissingComplementModels,
  OracleTooLarge,
  InvalidK,
  EmptyVocabulary,
  ParseError,
  InvalidFolds,
  StratificationError,
  InvalidConfig,
  InvalidArgument,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// Every failure in the library surfaces as an Error carrying a code, so the
/// CLI can map it onto an exit status without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  /// The message without the code prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message);

  /// 1-based line of the offending input.
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace memd
