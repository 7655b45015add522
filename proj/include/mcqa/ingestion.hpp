#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mcqa/analysis.hpp"
#include "mcqa/core_model.hpp"

namespace mcqa {

/// Canonical dataset JSONL: one {"id","context","question","options",
/// "answer_index"} object per line. Errors name the 1-based line.
std::vector<McqItem> parse_dataset(std::istream& in);
std::vector<McqItem> load_dataset(const std::filesystem::path& path);
void write_dataset(const std::filesystem::path& path, const std::vector<McqItem>& items);

/// Predictions JSONL: {"question_id","system_id","variant","seed","logits"}.
std::vector<PredictionRecord> parse_predictions(std::istream& in);
std::vector<PredictionRecord> load_predictions(const std::filesystem::path& path);
void write_predictions(const std::filesystem::path& path, const std::vector<PredictionRecord>& records);

struct JoinedItem {
    McqItem item;
    /// Ensemble distribution per variant, indexed by InputVariant.
    std::array<std::optional<ProbDist>, 4> ensembles;
    std::array<std::size_t, 4> seed_counts{};

    const std::optional<ProbDist>& ensemble(InputVariant v) const { return ensembles[static_cast<std::size_t>(v)]; }
};

struct JoinResult {
    std::vector<JoinedItem> items;  // dataset order
    /// (question id, variant) pairs that had no prediction.
    std::vector<std::pair<std::string, InputVariant>> missing;
    /// Items dropped for missing coverage (permissive mode only).
    std::vector<std::string> dropped_ids;
};

struct JoinOptions {
    bool permissive = false;
};

/// Groups one system's predictions by question and variant, averages the
/// seeds' softmax outputs, and checks that every item has each required
/// variant. Predictions of other systems are ignored. Items with no
/// prediction at all are left out.
///
/// Throws OrphanPrediction for unknown question ids, ShapeMismatch when a
/// logit vector's length differs from the item's option count, DuplicateId
/// for a repeated (question, variant, seed), and CoverageError listing the
/// uncovered ids unless options.permissive is set.
JoinResult join(const std::vector<McqItem>& items, const std::vector<PredictionRecord>& predictions,
                const std::string& system_id, const std::set<InputVariant>& required,
                const JoinOptions& options = {});

inline constexpr int kReportSchemaVersion = 1;

struct ReportSettings {
    std::size_t max_options = 4;
    double flag_threshold = kDefaultFlagThreshold;
    std::size_t mi_bins = kDefaultMiBins;
    bool calibrated = true;

    bool operator==(const ReportSettings&) const = default;
};

struct AuditReport {
    int schema_version = kReportSchemaVersion;
    std::string system_id;
    std::string dataset_tag;
    ReportSettings settings;
    std::size_t dropped = 0;
    std::vector<CalibrationResult> calibration;
    std::vector<QuestionMetrics> per_question;
    std::vector<BinRow> bins_no_context;
    std::vector<BinRow> bins_full;
    std::vector<MiCurveRow> mi_curve;
    std::vector<FlagSet> flags;
    std::vector<CrossRun> cross_runs;

    bool operator==(const AuditReport&) const = default;
};

inline constexpr const char* kReportFile = "report.json";

/// Writes report.json plus the plot-data CSVs (bins.csv, mi_curve.csv,
/// per_question.csv) into dir, creating it if needed.
void write_report(const AuditReport& report, const std::filesystem::path& dir);

/// Reads dir/report.json. Throws VersionError for another schema_version and
/// ParseError for malformed content.
AuditReport read_report(const std::filesystem::path& dir);

/// Converts a public dataset distribution into canonical items. Supported
/// formats: "race" (JSON object or JSONL of passages), "cosmosqa" (JSONL),
/// "reclor" (JSON array).
std::vector<McqItem> convert_dataset(const std::string& format, const std::filesystem::path& in);

}  // namespace mcqa
