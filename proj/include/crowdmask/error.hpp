#pragma once

#include <stdexcept>
#include <string>

namespace crowdmask {

enum class ErrorKind {
  SizeMismatch,
  LengthMismatch,
  EmptyPointSet,
  OutOfBounds,
  MissingGroundTruth,
  EmptyTrainingSet,
  NoPredictions,
  EmptyGroundTruth,
  PlacementFailure,
  InvalidArgument,
  ParseError,
  IoError,
};

const char* to_string(ErrorKind kind) noexcept;

// Thrown for every data-level failure; the CLI maps it to exit code 2.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace crowdmask
