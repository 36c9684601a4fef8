#include "mono/error.hpp"

namespace mono {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Usage: return "UsageError";
    case ErrorKind::Io: return "IoError";
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::Schema: return "SchemaError";
    case ErrorKind::EmptyDataset: return "EmptyDataset";
    case ErrorKind::DuplicateModelId: return "DuplicateModelId";
    case ErrorKind::UnknownModel: return "UnknownModel";
    case ErrorKind::NoJointErrors: return "NoJointErrors";
    case ErrorKind::NoErrors: return "NoErrors";
    case ErrorKind::InsufficientSupport: return "InsufficientSupport";
    case ErrorKind::ZeroVariance: return "ZeroVariance";
    case ErrorKind::NoUsablePairs: return "NoUsablePairs";
    case ErrorKind::MissingCovariate: return "MissingCovariate";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::TooFewObservations: return "TooFewObservations";
    case ErrorKind::MissingRatings: return "MissingRatings";
    case ErrorKind::NoLatestModels: return "NoLatestModels";
    case ErrorKind::NoMatches: return "NoMatches";
    case ErrorKind::EmptyBucket: return "EmptyBucket";
    case ErrorKind::UndefinedBaseline: return "UndefinedBaseline";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::Replicate: return "ReplicateError";
  }
  return "Error";
}

}  // namespace mono
