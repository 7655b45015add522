#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mcqa/core_model.hpp"

namespace mcqa {

inline constexpr double kBinWidth = 0.2;
inline constexpr std::size_t kDefaultMiBins = 50;
inline constexpr double kDefaultFlagThreshold = 2.0;

enum class EntropyStream { NoContext, Full };

struct BinRow {
    double bin_low = 0.0;
    double bin_high = 0.0;
    std::size_t count = 0;
    std::optional<double> accuracy;  // empty iff count == 0

    bool operator==(const BinRow&) const = default;
};

/// Histogram of effective number of options on [1, max_options] with
/// width-0.2 bins. Bins are half-open except the last, which also takes
/// max_options itself. Accuracy is that of the system the stream belongs to.
std::vector<BinRow> bin_effective_options(std::span<const QuestionMetrics> metrics, EntropyStream stream,
                                          std::size_t max_options = 4);

struct MiCurveRow {
    std::size_t rank_bin = 0;
    std::size_t start_rank = 0;
    std::size_t count = 0;
    double accuracy_full = 0.0;
    double accuracy_no_context = 0.0;
    double mean_mi = 0.0;

    bool operator==(const MiCurveRow&) const = default;
};

/// Sorts by mutual information (then id) and splits into num_bins
/// equal-count bins; the first n % num_bins bins hold one extra question.
std::vector<MiCurveRow> mi_rank_curve(std::span<const QuestionMetrics> metrics,
                                      std::size_t num_bins = kDefaultMiBins);

struct FlagSet {
    std::string rule;
    std::vector<std::string> question_ids;
    std::optional<double> threshold;

    bool operator==(const FlagSet&) const = default;
};

enum class ExtremeKey { EntropyNoContext, MutualInformation };

/// Lowest k_low and highest k_high questions under one total order
/// (key, then id), so the two sets never overlap. Both lists are in that
/// ascending order; each threshold is the key value at the set's inner edge.
std::pair<FlagSet, FlagSet> select_extremes(std::span<const QuestionMetrics> metrics, ExtremeKey key,
                                            std::size_t k_low, std::size_t k_high);

/// Questions whose no-context effective number of options is below the
/// threshold, ordered by that value then id.
FlagSet flag_low_entropy(std::span<const QuestionMetrics> metrics, double threshold = kDefaultFlagThreshold,
                         std::size_t max_options = 4);

struct CrossRun {
    std::string train;
    std::string eval;
    InputVariant variant = InputVariant::Full;
    double accuracy = 0.0;

    bool operator==(const CrossRun&) const = default;
};

struct CrossTable {
    struct Row {
        std::string train;
        InputVariant variant = InputVariant::Full;
        std::vector<std::optional<double>> cells;  // one per eval tag
    };
    std::vector<std::string> eval_tags;
    std::vector<Row> rows;
};

/// Pivots accuracies into train x variant rows and eval columns. Train and
/// eval tags keep first-appearance order; variants within a train tag follow
/// {O}, Q+{O}, {O}+C, Q+{O}+C. Throws DuplicateCell on repeated cells.
CrossTable cross_table(std::span<const CrossRun> runs);

enum class TableFormat { Markdown, Csv, Text };

/// Accuracies print as percentages with two decimals; missing cells as "--".
std::string render_cross_table(const CrossTable& table, TableFormat format);

}  // namespace mcqa
