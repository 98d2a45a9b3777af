#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace vandet {

enum class ErrorCode {
  // config
  ConfigParse,
  UnknownConfigKey,
  BadConfigValue,
  MissingInput,
  // data / ingest
  DuplicateFeature,
  UnknownKind,
  EmptySchema,
  ColumnCountMismatch,
  EmptyRevisionId,
  NonFiniteNumeric,
  UnparsableNumeric,
  MalformedTruthLine,
  DuplicateTruthEntry,
  DuplicateBatchId,
  // data / sampling
  InsufficientNegatives,
  DegenerateSplit,
  TooFewMinoritySamples,
  // data / features
  EmptyTrainingSet,
  NoFeaturesRetained,
  AllMissingFeature,
  UnlabeledRow,
  SchemaMismatch,
  // evaluation
  SingleClassInput,
  NoPositives,
  MisalignedScores,
  // training
  SingleClassTraining,
  NonFiniteLoss,
  NonFiniteMargin,
  DimensionMismatch,
  // artifact
  ArtifactIo,
  ArtifactParse,
  ArtifactVersion,
};

// Process exit codes used by the CLI (0 = ok).
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitData = 3,
  kExitTraining = 4,
  kExitArtifact = 5,
};

inline int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::ConfigParse:
    case ErrorCode::UnknownConfigKey:
    case ErrorCode::BadConfigValue:
    case ErrorCode::MissingInput:
      return kExitConfig;
    case ErrorCode::SingleClassTraining:
    case ErrorCode::NonFiniteLoss:
    case ErrorCode::NonFiniteMargin:
    case ErrorCode::DimensionMismatch:
      return kExitTraining;
    case ErrorCode::ArtifactIo:
    case ErrorCode::ArtifactParse:
    case ErrorCode::ArtifactVersion:
      return kExitArtifact;
    default:
      return kExitData;
  }
}

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::ConfigParse: return "ConfigParse";
    case ErrorCode::UnknownConfigKey: return "UnknownConfigKey";
    case ErrorCode::BadConfigValue: return "BadConfigValue";
    case ErrorCode::MissingInput: return "MissingInput";
    case ErrorCode::DuplicateFeature: return "DuplicateFeature";
    case ErrorCode::UnknownKind: return "UnknownKind";
    case ErrorCode::EmptySchema: return "EmptySchema";
    case ErrorCode::ColumnCountMismatch: return "ColumnCountMismatch";
    case ErrorCode::EmptyRevisionId: return "EmptyRevisionId";
    case ErrorCode::NonFiniteNumeric: return "NonFiniteNumeric";
    case ErrorCode::UnparsableNumeric: return "UnparsableNumeric";
    case ErrorCode::MalformedTruthLine: return "MalformedTruthLine";
    case ErrorCode::DuplicateTruthEntry: return "DuplicateTruthEntry";
    case ErrorCode::DuplicateBatchId: return "DuplicateBatchId";
    case ErrorCode::InsufficientNegatives: return "InsufficientNegatives";
    case ErrorCode::DegenerateSplit: return "DegenerateSplit";
    case ErrorCode::TooFewMinoritySamples: return "TooFewMinoritySamples";
    case ErrorCode::EmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorCode::NoFeaturesRetained: return "NoFeaturesRetained";
    case ErrorCode::AllMissingFeature: return "AllMissingFeature";
    case ErrorCode::UnlabeledRow: return "UnlabeledRow";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::SingleClassInput: return "SingleClassInput";
    case ErrorCode::NoPositives: return "NoPositives";
    case ErrorCode::MisalignedScores: return "MisalignedScores";
    case ErrorCode::SingleClassTraining: return "SingleClassTraining";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::NonFiniteMargin: return "NonFiniteMargin";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ArtifactIo: return "ArtifactIo";
    case ErrorCode::ArtifactParse: return "ArtifactParse";
    case ErrorCode::ArtifactVersion: return "ArtifactVersion";
  }
  return "Unknown";
}

// All pipeline failures are reported through this type; the CLI maps
// code() to a process exit code via exit_code_for().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }
  int exit_code() const { return exit_code_for(code_); }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, std::string message) {
  throw Error(code, std::move(message));
}

}  // namespace vandet
