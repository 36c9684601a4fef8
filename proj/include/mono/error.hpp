#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mono {

enum class ErrorKind {
  Usage,
  Io,
  Parse,
  Schema,
  EmptyDataset,
  DuplicateModelId,
  UnknownModel,
  NoJointErrors,
  NoErrors,
  InsufficientSupport,
  ZeroVariance,
  NoUsablePairs,
  MissingCovariate,
  RankDeficient,
  TooFewObservations,
  MissingRatings,
  NoLatestModels,
  NoMatches,
  EmptyBucket,
  UndefinedBaseline,
  InvalidConfig,
  Replicate,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind), detail_(message) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// Message without the kind prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace mono
