#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mcqa/core_model.hpp"

namespace mcqa {

/// softmax(logits / T). Throws InvalidTemperature unless T is a positive
/// finite number, InvalidLogits on non-finite logits.
ProbDist apply_temperature(std::span<const double> logits, double temperature);

/// Mean over items of the largest option probability.
double mean_max_prob(std::span<const ProbDist> dists);

/// One calibration example. Scores are logits, or log-probabilities of an
/// ensemble mean; -inf marks an option with zero probability.
struct CalibrationItem {
    std::vector<double> scores;
    std::size_t gold = 0;
};

struct SolveOptions {
    /// Replaces the measured accuracy as the root-finding target. Only meant
    /// for checking the solver against closed-form cases.
    std::optional<double> target_accuracy;
    double tolerance = 1e-6;
    int max_iterations = 200;
    double min_temperature = 1e-3;
    double max_temperature = 1e3;
    bool parallel = true;
};

/// Finds T such that the mean max probability equals the accuracy.
///
/// The gap f(T) = mean_max_prob(T) - accuracy is strictly decreasing in T as
/// soon as one item has non-constant scores, so the root is bracketed on
/// [min_temperature, max_temperature] and found by bisection on log T. When
/// the target is not reachable inside the bracket the nearest endpoint is
/// returned with converged = false. Throws UncalibratableSystem when every
/// item has constant scores.
CalibrationResult solve_temperature(std::span<const CalibrationItem> items, const SolveOptions& options = {},
                                    std::string system_id = {}, InputVariant variant = InputVariant::Full);

/// log p per option, with log 0 = -inf.
std::vector<double> log_scores(const ProbDist& dist);

/// Fits a temperature on ensemble distributions and returns it together with
/// the tempered distributions.
std::pair<CalibrationResult, std::vector<ProbDist>> calibrate_ensemble(std::span<const ProbDist> dists,
                                                                       std::span<const std::size_t> golds,
                                                                       std::string system_id,
                                                                       InputVariant variant,
                                                                       const SolveOptions& options = {});

}  // namespace mcqa
