#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mcqa {

/// Which parts of a question the answering system was shown.
enum class InputVariant {
    Full,            // Q + {O} + C
    NoContext,       // Q + {O}
    OptionsOnly,     // {O}
    OptionsContext,  // {O} + C
};

inline constexpr std::array<InputVariant, 4> kAllVariants = {
    InputVariant::Full, InputVariant::NoContext, InputVariant::OptionsOnly,
    InputVariant::OptionsContext};

std::string_view to_string(InputVariant variant);

/// Parses the serialized name ("full", "no_context", ...); throws
/// InvalidVariant for anything else.
InputVariant parse_variant(std::string_view name);

/// Short display label used in cross-performance tables, e.g. "Q+{O}".
std::string_view variant_label(InputVariant variant);

struct McqItem {
    std::string id;
    std::string context;
    std::string question;
    std::vector<std::string> options;
    std::size_t answer_index = 0;

    std::size_t num_options() const noexcept { return options.size(); }

    /// Throws InvalidLabel / InvalidArgument when K < 2, an option is empty or
    /// the answer index is out of range.
    void validate() const;

    bool operator==(const McqItem&) const = default;
};

struct PredictionRecord {
    std::string question_id;
    std::string system_id;
    InputVariant variant = InputVariant::Full;
    std::int64_t seed = 0;
    std::vector<double> logits;

    bool operator==(const PredictionRecord&) const = default;
};

/// A normalized distribution over K options. Entropy and effective number of
/// options are derived once at construction; effective_options is exactly
/// exp2(entropy_bits).
class ProbDist {
public:
    /// Validates that every entry is in [0, 1] and the entries sum to 1
    /// within 1e-9, otherwise throws InvalidDistribution.
    explicit ProbDist(std::vector<double> probs);

    std::span<const double> probs() const noexcept { return probs_; }
    std::size_t size() const noexcept { return probs_.size(); }
    double operator[](std::size_t i) const { return probs_[i]; }
    double entropy_bits() const noexcept { return entropy_bits_; }
    double effective_options() const noexcept { return effective_options_; }
    double max_prob() const noexcept;

    bool operator==(const ProbDist&) const = default;

private:
    std::vector<double> probs_;
    double entropy_bits_ = 0.0;
    double effective_options_ = 1.0;
};

struct CalibrationResult {
    std::string system_id;
    InputVariant variant = InputVariant::Full;
    double temperature = 1.0;
    double accuracy = 0.0;
    double mean_max_prob_before = 0.0;
    double mean_max_prob_after = 0.0;
    bool converged = false;

    bool operator==(const CalibrationResult&) const = default;
};

struct QuestionMetrics {
    std::string question_id;
    double entropy_no_context = 0.0;
    double entropy_full = 0.0;
    double effective_options_no_context = 1.0;
    double effective_options_full = 1.0;
    double mutual_information = 0.0;
    bool correct_no_context = false;
    bool correct_full = false;

    bool operator==(const QuestionMetrics&) const = default;
};

/// Builds the per-question record from the two calibrated (or raw)
/// distributions; mutual_information is entropy_no_context - entropy_full.
QuestionMetrics make_question_metrics(std::string question_id, const ProbDist& no_context,
                                      const ProbDist& full, std::size_t gold_index);

}  // namespace mcqa
