#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gridseed {

enum class ErrorCode {
  // grid
  DuplicateBusId,
  NonContiguousBusIds,
  DanglingBranchEndpoint,
  SelfLoop,
  BadReactance,
  AllZeroDegrees,
  MissingImpedance,
  // statistics
  InvalidNetworkSize,
  InvalidModel,
  EmptyInput,
  NonPositiveMax,
  OutOfRange,
  NotADistribution,
  NegativeEntry,
  BadEdges,
  LengthMismatch,
  DegenerateInput,
  ConstantVector,
  InsufficientPoints,
  CollinearSizes,
  // assignment
  NoGenerationBuses,
  NoLoadBuses,
  InvalidOptions,
  // power flow
  DisconnectedGrid,
  SingularSystem,
  // io
  ParseError,
  IoError,
  SchemaError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Parse failures additionally carry the 1-based line of the offending record.
class ParseError : public Error {
 public:
  ParseError(std::string file, long line, const std::string& message)
      : Error(ErrorCode::ParseError,
              file + ":" + std::to_string(line) + ": " + message),
        file_(std::move(file)),
        line_(line) {}

  const std::string& file() const noexcept { return file_; }
  long line() const noexcept { return line_; }

 private:
  std::string file_;
  long line_;
};

}  // namespace gridseed
