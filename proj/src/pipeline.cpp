#include "mcqa/pipeline.hpp"

#include <algorithm>

#include "mcqa/analysis.hpp"
#include "mcqa/error.hpp"
#include "mcqa/metrics.hpp"

namespace mcqa {

AuditOutcome run_audit(const std::vector<McqItem>& items, const std::vector<PredictionRecord>& predictions,
                       const AuditOptions& options) {
    const auto joined = join(items, predictions, options.system_id, {InputVariant::Full, InputVariant::NoContext},
                             JoinOptions{options.permissive});
    if (joined.items.empty()) {
        fail(ErrorKind::CoverageError, "no predictions from system '" + options.system_id + "' match the dataset");
    }

    AuditOutcome outcome;
    AuditReport& report = outcome.report;
    report.system_id = options.system_id;
    report.dataset_tag = options.dataset_tag;
    report.dropped = joined.dropped_ids.size();
    if (!joined.dropped_ids.empty()) {
        outcome.warnings.push_back("dropped " + std::to_string(joined.dropped_ids.size()) +
                                   " question(s) without full and no_context predictions");
    }

    std::vector<std::size_t> golds;
    std::vector<ProbDist> full;
    std::vector<ProbDist> no_context;
    std::size_t max_options = 2;
    for (const auto& j : joined.items) {
        outcome.items.push_back(j.item);
        golds.push_back(j.item.answer_index);
        full.push_back(*j.ensemble(InputVariant::Full));
        no_context.push_back(*j.ensemble(InputVariant::NoContext));
        max_options = std::max(max_options, j.item.num_options());
    }

    // Cross-performance cells come from the uncalibrated ensembles; the
    // argmax does not depend on temperature.
    for (InputVariant v : kAllVariants) {
        std::vector<std::pair<std::size_t, std::size_t>> outcomes;
        for (const auto& j : joined.items) {
            if (const auto& d = j.ensemble(v)) outcomes.emplace_back(predicted_answer(*d), j.item.answer_index);
        }
        if (!outcomes.empty()) report.cross_runs.push_back({options.system_id, options.dataset_tag, v, accuracy(outcomes)});
    }

    if (options.calibrated) {
        auto [nc_result, nc_dists] = calibrate_ensemble(no_context, golds, options.system_id, InputVariant::NoContext);
        auto [full_result, full_dists] = calibrate_ensemble(full, golds, options.system_id, InputVariant::Full);
        for (const auto* r : {&nc_result, &full_result}) {
            if (!r->converged) {
                outcome.warnings.push_back("calibration of " + std::string(to_string(r->variant)) +
                                           " stopped at the bracket edge T=" + std::to_string(r->temperature));
            }
        }
        report.calibration = {full_result, nc_result};
        no_context = std::move(nc_dists);
        full = std::move(full_dists);
    }

    report.per_question.reserve(golds.size());
    for (std::size_t i = 0; i < golds.size(); ++i) {
        report.per_question.push_back(make_question_metrics(outcome.items[i].id, no_context[i], full[i], golds[i]));
    }

    std::size_t mi_bins = options.mi_bins;
    if (mi_bins == 0) fail(ErrorKind::InvalidArgument, "--mi-bins must be positive");
    if (mi_bins > report.per_question.size()) {
        outcome.warnings.push_back("mi-bins " + std::to_string(mi_bins) + " exceeds " +
                                   std::to_string(report.per_question.size()) + " questions; using one bin per question");
        mi_bins = report.per_question.size();
    }

    report.settings = ReportSettings{max_options, options.flag_threshold, mi_bins, options.calibrated};
    report.bins_no_context = bin_effective_options(report.per_question, EntropyStream::NoContext, max_options);
    report.bins_full = bin_effective_options(report.per_question, EntropyStream::Full, max_options);
    report.mi_curve = mi_rank_curve(report.per_question, mi_bins);
    report.flags.push_back(flag_low_entropy(report.per_question, options.flag_threshold, max_options));
    return outcome;
}

}  // namespace mcqa
