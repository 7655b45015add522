#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "mcqa/core_model.hpp"

namespace mcqa {

/// Probabilities at or below this are treated as exactly zero inside entropy.
inline constexpr double kZeroProbability = 1e-300;

/// Softmax over option scores, stabilized by subtracting the max score.
/// Throws InvalidLogits (mentioning question_id when given) for non-finite
/// input and InvalidArgument when fewer than two scores are supplied.
ProbDist softmax(std::span<const double> logits, std::string_view question_id = {});

/// -sum p log2 p with 0 log 0 = 0. Requires entries in [0, 1] summing to 1
/// within 1e-6; the result is clamped to [0, log2 K].
double entropy_bits(std::span<const double> probs);

/// 2^H. Throws InvalidEntropy on negative or non-finite input.
double effective_options(double entropy);

/// Entropy drop from adding the context. Negative values are kept.
double mutual_information(double no_context_entropy, double full_entropy);

/// Arithmetic mean of the member distributions.
ProbDist ensemble_average(std::span<const ProbDist> dists);

/// Argmax with ties going to the lowest index.
std::size_t predicted_answer(std::span<const double> probs);
inline std::size_t predicted_answer(const ProbDist& dist) { return predicted_answer(dist.probs()); }

/// Fraction of (predicted, gold) pairs that match.
double accuracy(std::span<const std::pair<std::size_t, std::size_t>> predictions);

namespace detail {
// Unvalidated entropy sum shared by ProbDist and entropy_bits.
double entropy_sum(std::span<const double> probs) noexcept;

// Writes softmax(scores / temperature) into out. Scores may contain -inf
// (zero-probability options) as long as at least one entry is finite.
void tempered_softmax(std::span<const double> scores, double temperature, std::span<double> out) noexcept;
}  // namespace detail

}  // namespace mcqa
