#include "transrad/error.hpp"

namespace transrad {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidPartition: return "invalid-partition";
    case ErrorCode::kInvalidProbability: return "invalid-probability";
    case ErrorCode::kInvalidMargin: return "invalid-margin";
    case ErrorCode::kInvalidConfidence: return "invalid-confidence";
    case ErrorCode::kInvalidHyperparameter: return "invalid-hyperparameter";
    case ErrorCode::kInvalidRank: return "invalid-rank";
    case ErrorCode::kInvalidDistribution: return "invalid-distribution";
    case ErrorCode::kInvalidSampleCount: return "invalid-sample-count";
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kMissingParameter: return "missing-parameter";
    case ErrorCode::kShape: return "shape";
    case ErrorCode::kSymmetry: return "symmetry";
    case ErrorCode::kNotAKernel: return "not-a-kernel";
    case ErrorCode::kSingularSystem: return "singular-system";
    case ErrorCode::kDegenerateFeature: return "degenerate-feature";
    case ErrorCode::kIsolatedVertex: return "isolated-vertex";
    case ErrorCode::kDisconnectedGraph: return "disconnected-graph";
    case ErrorCode::kUnboundedPosterior: return "unbounded-posterior";
    case ErrorCode::kTooLarge: return "too-large";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kLabel: return "label";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kConvergence: return "convergence";
  }
  return "unknown";
}

int exit_code(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kDegenerateFeature:
    case ErrorCode::kIsolatedVertex:
    case ErrorCode::kDisconnectedGraph:
    case ErrorCode::kParse:
    case ErrorCode::kLabel:
    case ErrorCode::kIo:
      return 3;
    case ErrorCode::kSymmetry:
    case ErrorCode::kNotAKernel:
    case ErrorCode::kSingularSystem:
    case ErrorCode::kConvergence:
      return 4;
    default:
      return 2;
  }
}

}  // namespace transrad
