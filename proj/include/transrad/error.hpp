#pragma once

#include <stdexcept>
#include <string>

namespace transrad {

/// Failure categories raised by the library. The CLI maps each category
/// onto a process exit code (see `exit_code`).
enum class ErrorCode {
  kInvalidPartition,
  kInvalidProbability,
  kInvalidMargin,
  kInvalidConfidence,
  kInvalidHyperparameter,
  kInvalidRank,
  kInvalidDistribution,
  kInvalidSampleCount,
  kInvalidArgument,
  kMissingParameter,
  kShape,
  kSymmetry,
  kNotAKernel,
  kSingularSystem,
  kDegenerateFeature,
  kIsolatedVertex,
  kDisconnectedGraph,
  kUnboundedPosterior,
  kTooLarge,
  kParse,
  kLabel,
  kIo,
  kConvergence,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

const char* to_string(ErrorCode code) noexcept;

/// 2 invalid configuration / parameters, 3 data error, 4 numerical failure.
int exit_code(ErrorCode code) noexcept;

}  // namespace transrad
