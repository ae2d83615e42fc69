#include "pcve/common/error.hpp"

namespace pcve {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Io: return "Io";
    case ErrorKind::MissingField: return "MissingField";
    case ErrorKind::MalformedRecord: return "MalformedRecord";
    case ErrorKind::NotFound: return "NotFound";
    case ErrorKind::RateLimited: return "RateLimited";
    case ErrorKind::AuthFailure: return "AuthFailure";
    case ErrorKind::NetworkFailure: return "NetworkFailure";
    case ErrorKind::CutoffBeforeCreation: return "CutoffBeforeCreation";
    case ErrorKind::PostDisclosureArtifact: return "PostDisclosureArtifact";
    case ErrorKind::NoArtifacts: return "NoArtifacts";
    case ErrorKind::NegativeDelta: return "NegativeDelta";
    case ErrorKind::InsufficientTimestamps: return "InsufficientTimestamps";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::InsufficientPopulation: return "InsufficientPopulation";
    case ErrorKind::MissingCommit: return "MissingCommit";
    case ErrorKind::MissingDiscussion: return "MissingDiscussion";
    case ErrorKind::UnsupportedLanguageOnly: return "UnsupportedLanguageOnly";
    case ErrorKind::EmptyEra: return "EmptyEra";
    case ErrorKind::MalformedDiff: return "MalformedDiff";
    case ErrorKind::LlmUnavailable: return "LlmUnavailable";
    case ErrorKind::CodeLeak: return "CodeLeak";
    case ErrorKind::EmptyResponse: return "EmptyResponse";
    case ErrorKind::EncoderUnavailable: return "EncoderUnavailable";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::SingleClassInput: return "SingleClassInput";
    case ErrorKind::DivergedLoss: return "DivergedLoss";
    case ErrorKind::UnparseableResponse: return "UnparseableResponse";
    case ErrorKind::JoinFailure: return "JoinFailure";
    case ErrorKind::MissingUpstream: return "MissingUpstream";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace pcve
