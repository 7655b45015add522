#include "mcqa/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mcqa/error.hpp"

namespace mcqa {

namespace detail {

double entropy_sum(std::span<const double> probs) noexcept {
    double h = 0.0;
    for (double p : probs) {
        if (p > kZeroProbability) h -= p * std::log2(p);
    }
    const double upper = std::log2(static_cast<double>(probs.size()));
    return std::clamp(h, 0.0, upper);
}

void tempered_softmax(std::span<const double> scores, double temperature, std::span<double> out) noexcept {
    double top = -std::numeric_limits<double>::infinity();
    for (double s : scores) top = std::max(top, s / temperature);
    double total = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const double scaled = scores[i] / temperature;
        out[i] = std::isinf(scaled) ? 0.0 : std::exp(scaled - top);
        total += out[i];
    }
    for (double& p : out) p /= total;
}

}  // namespace detail

ProbDist softmax(std::span<const double> logits, std::string_view question_id) {
    if (logits.size() < 2) fail(ErrorKind::InvalidArgument, "softmax needs at least two options");
    for (double l : logits) {
        if (!std::isfinite(l)) {
            std::string msg = "non-finite logit";
            if (!question_id.empty()) msg += " for question '" + std::string(question_id) + "'";
            fail(ErrorKind::InvalidLogits, msg);
        }
    }
    std::vector<double> probs(logits.size());
    detail::tempered_softmax(logits, 1.0, probs);
    return ProbDist(std::move(probs));
}

double entropy_bits(std::span<const double> probs) {
    if (probs.empty()) fail(ErrorKind::InvalidDistribution, "empty distribution");
    double total = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0 && p <= 1.0)) {
            fail(ErrorKind::InvalidDistribution, "probability outside [0, 1]: " + std::to_string(p));
        }
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-6) {
        fail(ErrorKind::InvalidDistribution, "probabilities sum to " + std::to_string(total));
    }
    return detail::entropy_sum(probs);
}

double effective_options(double entropy) {
    if (!std::isfinite(entropy) || entropy < 0.0) {
        fail(ErrorKind::InvalidEntropy, "entropy must be finite and non-negative");
    }
    return std::exp2(entropy);
}

double mutual_information(double no_context_entropy, double full_entropy) {
    if (!std::isfinite(no_context_entropy) || !std::isfinite(full_entropy) ||
        no_context_entropy < 0.0 || full_entropy < 0.0) {
        fail(ErrorKind::InvalidEntropy, "mutual information needs two non-negative entropies");
    }
    return no_context_entropy - full_entropy;
}

ProbDist ensemble_average(std::span<const ProbDist> dists) {
    if (dists.empty()) fail(ErrorKind::EmptyEnsemble, "ensemble has no members");
    const std::size_t k = dists.front().size();
    // Running mean: identical members reproduce themselves bit for bit.
    std::vector<double> mean(dists.front().probs().begin(), dists.front().probs().end());
    for (std::size_t m = 1; m < dists.size(); ++m) {
        if (dists[m].size() != k) {
            fail(ErrorKind::ShapeMismatch, "ensemble members disagree on the number of options");
        }
        const double count = static_cast<double>(m + 1);
        for (std::size_t i = 0; i < k; ++i) mean[i] += (dists[m][i] - mean[i]) / count;
    }
    return ProbDist(std::move(mean));
}

std::size_t predicted_answer(std::span<const double> probs) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < probs.size(); ++i) {
        if (probs[i] > probs[best]) best = i;
    }
    return best;
}

double accuracy(std::span<const std::pair<std::size_t, std::size_t>> predictions) {
    if (predictions.empty()) fail(ErrorKind::EmptyEvaluation, "no predictions to score");
    std::size_t hits = 0;
    for (const auto& [predicted, gold] : predictions) hits += predicted == gold ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(predictions.size());
}

}  // namespace mcqa
