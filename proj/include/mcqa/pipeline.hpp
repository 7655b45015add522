#pragma once

#include <string>
#include <vector>

#include "mcqa/calibration.hpp"
#include "mcqa/ingestion.hpp"

namespace mcqa {

struct AuditOptions {
    std::string system_id;
    std::string dataset_tag;
    double flag_threshold = kDefaultFlagThreshold;
    std::size_t mi_bins = kDefaultMiBins;
    /// Use temperature-calibrated entropies (default) or raw ensemble ones.
    bool calibrated = true;
    bool permissive = false;
};

struct AuditOutcome {
    AuditReport report;
    std::vector<McqItem> items;  // the audited questions, dataset order
    std::vector<std::string> warnings;
};

/// Ensemble -> calibrate full and no-context -> per-question metrics ->
/// bins, MI rank curve, low-entropy flags and cross-performance runs.
AuditOutcome run_audit(const std::vector<McqItem>& items, const std::vector<PredictionRecord>& predictions,
                       const AuditOptions& options);

}  // namespace mcqa
