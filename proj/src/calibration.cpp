#include "mcqa/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mcqa/error.hpp"
#include "mcqa/kernels.hpp"
#include "mcqa/metrics.hpp"

namespace mcqa {

namespace {

void check_temperature(double temperature) {
    if (!(std::isfinite(temperature) && temperature > 0.0)) {
        fail(ErrorKind::InvalidTemperature, "temperature must be positive and finite");
    }
}

bool varies_with_temperature(const std::vector<double>& scores) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (double s : scores) {
        if (std::isfinite(s)) {
            lo = std::min(lo, s);
            hi = std::max(hi, s);
        }
    }
    return hi > lo;
}

void validate_item(const CalibrationItem& item, std::size_t index) {
    if (item.scores.size() < 2) {
        fail(ErrorKind::InvalidArgument, "calibration item " + std::to_string(index) + " has fewer than two options");
    }
    if (item.gold >= item.scores.size()) {
        fail(ErrorKind::InvalidLabel, "calibration item " + std::to_string(index) + " has an out-of-range label");
    }
    bool any_finite = false;
    for (double s : item.scores) {
        if (std::isnan(s) || s == std::numeric_limits<double>::infinity()) {
            fail(ErrorKind::InvalidLogits, "calibration item " + std::to_string(index) + " has a NaN or +inf score");
        }
        any_finite = any_finite || std::isfinite(s);
    }
    if (!any_finite) {
        fail(ErrorKind::InvalidLogits, "calibration item " + std::to_string(index) + " has no finite score");
    }
}

class GapFunction {
public:
    GapFunction(std::span<const kernels::ScoreRow> rows, double target, bool parallel)
        : rows_(rows), target_(target), parallel_(parallel), buffer_(rows.size()) {}

    double mean_max_prob(double temperature) {
        if (parallel_) {
            kernels::parallel::tempered_max_probs(rows_, temperature, buffer_);
        } else {
            kernels::serial::tempered_max_probs(rows_, temperature, buffer_);
        }
        return kernels::ordered_sum(buffer_) / static_cast<double>(buffer_.size());
    }

    double operator()(double temperature) { return mean_max_prob(temperature) - target_; }

private:
    std::span<const kernels::ScoreRow> rows_;
    double target_;
    bool parallel_;
    std::vector<double> buffer_;
};

}  // namespace

ProbDist apply_temperature(std::span<const double> logits, double temperature) {
    check_temperature(temperature);
    if (logits.size() < 2) fail(ErrorKind::InvalidArgument, "need at least two options");
    for (double l : logits) {
        if (!std::isfinite(l)) fail(ErrorKind::InvalidLogits, "non-finite logit");
    }
    std::vector<double> probs(logits.size());
    detail::tempered_softmax(logits, temperature, probs);
    return ProbDist(std::move(probs));
}

double mean_max_prob(std::span<const ProbDist> dists) {
    if (dists.empty()) fail(ErrorKind::EmptyEvaluation, "no distributions");
    std::vector<double> maxima;
    maxima.reserve(dists.size());
    for (const auto& d : dists) maxima.push_back(d.max_prob());
    return kernels::ordered_sum(maxima) / static_cast<double>(maxima.size());
}

CalibrationResult solve_temperature(std::span<const CalibrationItem> items, const SolveOptions& options,
                                    std::string system_id, InputVariant variant) {
    if (items.empty()) fail(ErrorKind::EmptyEvaluation, "no items to calibrate");
    if (!(options.min_temperature > 0.0 && options.min_temperature < options.max_temperature)) {
        fail(ErrorKind::InvalidArgument, "invalid temperature bracket");
    }

    std::vector<kernels::ScoreRow> rows;
    rows.reserve(items.size());
    bool any_varies = false;
    std::vector<std::pair<std::size_t, std::size_t>> outcomes;
    outcomes.reserve(items.size());
    std::vector<double> probs;
    for (std::size_t i = 0; i < items.size(); ++i) {
        validate_item(items[i], i);
        any_varies = any_varies || varies_with_temperature(items[i].scores);
        rows.push_back(items[i].scores);
        probs.resize(items[i].scores.size());
        detail::tempered_softmax(items[i].scores, 1.0, probs);
        outcomes.emplace_back(predicted_answer(probs), items[i].gold);
    }
    if (!any_varies) {
        fail(ErrorKind::UncalibratableSystem,
             "every item has constant scores; no temperature changes the confidence");
    }

    CalibrationResult result;
    result.system_id = std::move(system_id);
    result.variant = variant;
    result.accuracy = accuracy(outcomes);

    const double target = options.target_accuracy.value_or(result.accuracy);
    GapFunction gap(rows, target, options.parallel);
    result.mean_max_prob_before = gap.mean_max_prob(1.0);

    double lo = options.min_temperature;
    double hi = options.max_temperature;
    const double gap_lo = gap(lo);
    const double gap_hi = gap(hi);
    if (gap_lo <= 0.0) {
        result.temperature = lo;
        result.converged = false;
    } else if (gap_hi >= 0.0) {
        result.temperature = hi;
        result.converged = false;
    } else {
        double mid = std::sqrt(lo * hi);
        double gap_mid = gap(mid);
        for (int it = 0; it < options.max_iterations; ++it) {
            if (gap_mid == 0.0 || hi / lo - 1.0 <= 4 * std::numeric_limits<double>::epsilon()) break;
            if (gap_mid > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
            mid = std::sqrt(lo * hi);
            gap_mid = gap(mid);
        }
        result.temperature = mid;
        result.converged = std::abs(gap_mid) <= options.tolerance;
    }
    result.mean_max_prob_after = gap.mean_max_prob(result.temperature);
    return result;
}

std::vector<double> log_scores(const ProbDist& dist) {
    std::vector<double> out;
    out.reserve(dist.size());
    for (double p : dist.probs()) {
        out.push_back(p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity());
    }
    return out;
}

std::pair<CalibrationResult, std::vector<ProbDist>> calibrate_ensemble(std::span<const ProbDist> dists,
                                                                       std::span<const std::size_t> golds,
                                                                       std::string system_id,
                                                                       InputVariant variant,
                                                                       const SolveOptions& options) {
    if (dists.size() != golds.size()) fail(ErrorKind::ShapeMismatch, "one gold label per distribution required");
    std::vector<CalibrationItem> items;
    items.reserve(dists.size());
    for (std::size_t i = 0; i < dists.size(); ++i) items.push_back({log_scores(dists[i]), golds[i]});
    auto result = solve_temperature(items, options, std::move(system_id), variant);

    std::vector<kernels::ScoreRow> rows;
    rows.reserve(items.size());
    for (auto& item : items) rows.push_back(std::move(item.scores));
    auto calibrated = options.parallel ? kernels::parallel::tempered_dists(rows, result.temperature)
                                       : kernels::serial::tempered_dists(rows, result.temperature);
    return {std::move(result), std::move(calibrated)};
}

}  // namespace mcqa
