#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pcve {

// Every failure the toolkit raises carries one of these kinds. Callers branch
// on kind(), the CLI maps kinds onto process exit codes.
enum class ErrorKind {
  InvalidArgument,
  Io,
  // nvd
  MissingField,
  MalformedRecord,
  // github
  NotFound,
  RateLimited,
  AuthFailure,
  NetworkFailure,
  CutoffBeforeCreation,
  PostDisclosureArtifact,
  // timeline
  NoArtifacts,
  NegativeDelta,
  InsufficientTimestamps,
  EmptyInput,
  InsufficientPopulation,
  // dataset
  MissingCommit,
  MissingDiscussion,
  UnsupportedLanguageOnly,
  EmptyEra,
  MalformedDiff,
  // summarizer
  LlmUnavailable,
  CodeLeak,
  EmptyResponse,
  // detector
  EncoderUnavailable,
  BudgetExceeded,
  DimensionMismatch,
  SingleClassInput,
  DivergedLoss,
  UnparseableResponse,
  // evaluator
  JoinFailure,
  // cli
  MissingUpstream,
  ConfigInvalid,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) fail(kind, message);
}

}  // namespace pcve
