#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mcqa {

enum class ErrorKind {
    InvalidArgument,
    InvalidLogits,
    InvalidDistribution,
    InvalidEntropy,
    ShapeMismatch,
    EmptyEnsemble,
    EmptyEvaluation,
    InvalidTemperature,
    UncalibratableSystem,
    TooManyBins,
    InsufficientQuestions,
    InvalidThreshold,
    DuplicateCell,
    ParseError,
    DuplicateId,
    InvalidLabel,
    EmptyDataset,
    InvalidVariant,
    OrphanPrediction,
    CoverageError,
    VersionError,
    IoError,
};

std::string_view to_string(ErrorKind kind);

// Every failure the toolkit reports carries a kind so the CLI can map it to
// an exit code and a machine-readable line.
class AuditError : public std::runtime_error {
public:
    AuditError(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace mcqa
