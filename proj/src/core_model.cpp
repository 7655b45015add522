#include "mcqa/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mcqa/error.hpp"
#include "mcqa/metrics.hpp"

namespace mcqa {

std::string_view to_string(InputVariant variant) {
    switch (variant) {
        case InputVariant::Full: return "full";
        case InputVariant::NoContext: return "no_context";
        case InputVariant::OptionsOnly: return "options_only";
        case InputVariant::OptionsContext: return "options_context";
    }
    return "full";
}

InputVariant parse_variant(std::string_view name) {
    for (InputVariant v : kAllVariants) {
        if (to_string(v) == name) return v;
    }
    fail(ErrorKind::InvalidVariant, "unknown input variant '" + std::string(name) + "'");
}

std::string_view variant_label(InputVariant variant) {
    switch (variant) {
        case InputVariant::Full: return "Q+{O}+C";
        case InputVariant::NoContext: return "Q+{O}";
        case InputVariant::OptionsOnly: return "{O}";
        case InputVariant::OptionsContext: return "{O}+C";
    }
    return "Q+{O}+C";
}

void McqItem::validate() const {
    if (id.empty()) fail(ErrorKind::InvalidArgument, "question id is empty");
    if (options.size() < 2) {
        fail(ErrorKind::InvalidArgument, "question '" + id + "' has fewer than two options");
    }
    for (const auto& option : options) {
        if (option.empty()) fail(ErrorKind::InvalidArgument, "question '" + id + "' has an empty option");
    }
    if (answer_index >= options.size()) {
        fail(ErrorKind::InvalidLabel, "question '" + id + "' answer_index " + std::to_string(answer_index) +
                                          " is out of range for " + std::to_string(options.size()) +
                                          " options");
    }
}

ProbDist::ProbDist(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) fail(ErrorKind::InvalidDistribution, "empty distribution");
    double total = 0.0;
    for (double p : probs_) {
        if (!(p >= 0.0 && p <= 1.0)) fail(ErrorKind::InvalidDistribution, "probability outside [0, 1]");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        fail(ErrorKind::InvalidDistribution, "probabilities sum to " + std::to_string(total));
    }
    entropy_bits_ = detail::entropy_sum(probs_);
    effective_options_ = std::exp2(entropy_bits_);
}

double ProbDist::max_prob() const noexcept {
    return *std::max_element(probs_.begin(), probs_.end());
}

QuestionMetrics make_question_metrics(std::string question_id, const ProbDist& no_context,
                                      const ProbDist& full, std::size_t gold_index) {
    QuestionMetrics m;
    m.question_id = std::move(question_id);
    m.entropy_no_context = no_context.entropy_bits();
    m.entropy_full = full.entropy_bits();
    m.effective_options_no_context = no_context.effective_options();
    m.effective_options_full = full.effective_options();
    m.mutual_information = mutual_information(m.entropy_no_context, m.entropy_full);
    m.correct_no_context = predicted_answer(no_context) == gold_index;
    m.correct_full = predicted_answer(full) == gold_index;
    return m;
}

}  // namespace mcqa
