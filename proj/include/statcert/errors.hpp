#pragma once

#include <stdexcept>
#include <string>

namespace statcert {

enum class ErrorKind {
  Parse,
  DimensionMismatch,
  InfeasiblePoint,
  PartitionLimitExceeded,
  BranchLimitExceeded,
  SubsetLimitExceeded,
  MfcqViolated,
  GeInfeasibleAtPoint,
  LambdaBarUnavailable,
  ConstancyNotEstablished,
  Internal,
};

const char *errorKindName(ErrorKind kind);

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string &message)
      : std::runtime_error(message), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string &message);

} // namespace statcert
