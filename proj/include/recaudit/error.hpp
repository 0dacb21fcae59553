#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace recaudit {

enum class ErrorCode {
  AllZero,
  NegativeWeight,
  InvalidDistribution,
  InvalidAlpha,
  LengthMismatch,
  ZeroInQ,
  EmptyInput,
  SingleCategory,
  ZeroActualSpread,
  ZeroActualMass,
  MalformedLine,
  IoError,
  EmptyAfterFilter,
  InvalidRatio,
  NoTrainingHistory,
  ConfigError,
  DivergedTraining,
  SingularSystem,
  UnknownUser,
  EmptyList,
  DegenerateGroup,
  NoInverseStereotyped,
  RateOutOfRange,
  ConfigMismatch,
  InconsistentReport,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised by the line-oriented parsers. line() is 1-based.
class ParseError : public Error {
 public:
  ParseError(std::string path, std::size_t line, const std::string& what)
      : Error(ErrorCode::MalformedLine, path + ":" + std::to_string(line) + ": " + what),
        path_(std::move(path)),
        line_(line) {}

  const std::string& path() const noexcept { return path_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string path_;
  std::size_t line_;
};

}  // namespace recaudit
