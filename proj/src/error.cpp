#include "mcqa/error.hpp"

namespace mcqa {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::InvalidLogits: return "InvalidLogits";
        case ErrorKind::InvalidDistribution: return "InvalidDistribution";
        case ErrorKind::InvalidEntropy: return "InvalidEntropy";
        case ErrorKind::ShapeMismatch: return "ShapeMismatch";
        case ErrorKind::EmptyEnsemble: return "EmptyEnsemble";
        case ErrorKind::EmptyEvaluation: return "EmptyEvaluation";
        case ErrorKind::InvalidTemperature: return "InvalidTemperature";
        case ErrorKind::UncalibratableSystem: return "UncalibratableSystem";
        case ErrorKind::TooManyBins: return "TooManyBins";
        case ErrorKind::InsufficientQuestions: return "InsufficientQuestions";
        case ErrorKind::InvalidThreshold: return "InvalidThreshold";
        case ErrorKind::DuplicateCell: return "DuplicateCell";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::DuplicateId: return "DuplicateId";
        case ErrorKind::InvalidLabel: return "InvalidLabel";
        case ErrorKind::EmptyDataset: return "EmptyDataset";
        case ErrorKind::InvalidVariant: return "InvalidVariant";
        case ErrorKind::OrphanPrediction: return "OrphanPrediction";
        case ErrorKind::CoverageError: return "CoverageError";
        case ErrorKind::VersionError: return "VersionError";
        case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

void fail(ErrorKind kind, const std::string& message) {
    throw AuditError(kind, message);
}

}  // namespace mcqa
