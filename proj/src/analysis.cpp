#include "mcqa/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>

#include "mcqa/error.hpp"
#include "mcqa/kernels.hpp"

namespace mcqa {

namespace {

double stream_value(const QuestionMetrics& m, EntropyStream stream) {
    return stream == EntropyStream::NoContext ? m.effective_options_no_context : m.effective_options_full;
}

bool stream_correct(const QuestionMetrics& m, EntropyStream stream) {
    return stream == EntropyStream::NoContext ? m.correct_no_context : m.correct_full;
}

double key_value(const QuestionMetrics& m, ExtremeKey key) {
    return key == ExtremeKey::EntropyNoContext ? m.entropy_no_context : m.mutual_information;
}

// Indices ordered by (value, id).
template <typename Value>
std::vector<std::size_t> order_by(std::span<const QuestionMetrics> metrics, Value value) {
    std::vector<std::size_t> order(metrics.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double va = value(metrics[a]);
        const double vb = value(metrics[b]);
        if (va != vb) return va < vb;
        return metrics[a].question_id < metrics[b].question_id;
    });
    return order;
}

std::string format_percent(double accuracy) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", accuracy * 100.0);
    return buf;
}

}  // namespace

std::vector<BinRow> bin_effective_options(std::span<const QuestionMetrics> metrics, EntropyStream stream,
                                          std::size_t max_options) {
    if (max_options < 2) fail(ErrorKind::InvalidArgument, "max_options must be at least 2");
    const auto num_bins = static_cast<std::size_t>(std::lround((static_cast<double>(max_options) - 1.0) / kBinWidth));
    auto edge = [](std::size_t i) { return 1.0 + static_cast<double>(i) * kBinWidth; };

    std::vector<BinRow> rows(num_bins);
    for (std::size_t i = 0; i < num_bins; ++i) {
        rows[i].bin_low = edge(i);
        rows[i].bin_high = i + 1 == num_bins ? static_cast<double>(max_options) : edge(i + 1);
    }

    std::vector<std::size_t> hits(num_bins, 0);
    for (const auto& m : metrics) {
        const double v = stream_value(m, stream);
        auto idx = static_cast<std::ptrdiff_t>(std::floor((v - 1.0) / kBinWidth));
        idx = std::clamp<std::ptrdiff_t>(idx, 0, static_cast<std::ptrdiff_t>(num_bins) - 1);
        // Settle against the stored edges so membership matches what is printed.
        while (idx + 1 < static_cast<std::ptrdiff_t>(num_bins) && v >= rows[idx + 1].bin_low) ++idx;
        while (idx > 0 && v < rows[idx].bin_low) --idx;
        rows[idx].count += 1;
        hits[idx] += stream_correct(m, stream) ? 1 : 0;
    }
    for (std::size_t i = 0; i < num_bins; ++i) {
        if (rows[i].count > 0) rows[i].accuracy = static_cast<double>(hits[i]) / static_cast<double>(rows[i].count);
    }
    return rows;
}

std::vector<MiCurveRow> mi_rank_curve(std::span<const QuestionMetrics> metrics, std::size_t num_bins) {
    if (metrics.empty()) fail(ErrorKind::EmptyEvaluation, "no questions to rank");
    if (num_bins == 0) fail(ErrorKind::InvalidArgument, "num_bins must be positive");
    if (num_bins > metrics.size()) {
        fail(ErrorKind::TooManyBins, std::to_string(num_bins) + " rank bins requested for " +
                                         std::to_string(metrics.size()) + " questions");
    }
    const auto order = order_by(metrics, [](const QuestionMetrics& m) { return m.mutual_information; });
    const std::size_t base = metrics.size() / num_bins;
    const std::size_t extra = metrics.size() % num_bins;

    std::vector<MiCurveRow> rows;
    rows.reserve(num_bins);
    std::size_t start = 0;
    std::vector<double> mis;
    for (std::size_t b = 0; b < num_bins; ++b) {
        const std::size_t size = base + (b < extra ? 1 : 0);
        MiCurveRow row;
        row.rank_bin = b;
        row.start_rank = start;
        row.count = size;
        std::size_t full_hits = 0;
        std::size_t nc_hits = 0;
        mis.clear();
        for (std::size_t r = start; r < start + size; ++r) {
            const auto& m = metrics[order[r]];
            full_hits += m.correct_full ? 1 : 0;
            nc_hits += m.correct_no_context ? 1 : 0;
            mis.push_back(m.mutual_information);
        }
        const auto n = static_cast<double>(size);
        row.accuracy_full = static_cast<double>(full_hits) / n;
        row.accuracy_no_context = static_cast<double>(nc_hits) / n;
        row.mean_mi = kernels::ordered_sum(mis) / n;
        rows.push_back(row);
        start += size;
    }
    return rows;
}

std::pair<FlagSet, FlagSet> select_extremes(std::span<const QuestionMetrics> metrics, ExtremeKey key,
                                            std::size_t k_low, std::size_t k_high) {
    if (k_low + k_high > metrics.size()) {
        fail(ErrorKind::InsufficientQuestions, "cannot select " + std::to_string(k_low) + " lowest and " +
                                                   std::to_string(k_high) + " highest from " +
                                                   std::to_string(metrics.size()) + " questions");
    }
    const auto order = order_by(metrics, [key](const QuestionMetrics& m) { return key_value(m, key); });
    const std::string name = key == ExtremeKey::EntropyNoContext ? "entropy_no_context" : "mutual_information";

    FlagSet low{"lowest_" + name + ":" + std::to_string(k_low), {}, std::nullopt};
    FlagSet high{"highest_" + name + ":" + std::to_string(k_high), {}, std::nullopt};
    for (std::size_t r = 0; r < k_low; ++r) low.question_ids.push_back(metrics[order[r]].question_id);
    for (std::size_t r = metrics.size() - k_high; r < metrics.size(); ++r) {
        high.question_ids.push_back(metrics[order[r]].question_id);
    }
    if (k_low > 0) low.threshold = key_value(metrics[order[k_low - 1]], key);
    if (k_high > 0) high.threshold = key_value(metrics[order[metrics.size() - k_high]], key);
    return {std::move(low), std::move(high)};
}

FlagSet flag_low_entropy(std::span<const QuestionMetrics> metrics, double threshold, std::size_t max_options) {
    if (!(threshold > 1.0 && threshold <= static_cast<double>(max_options))) {
        fail(ErrorKind::InvalidThreshold, "flag threshold must lie in (1, " + std::to_string(max_options) + "]");
    }
    const auto order = order_by(metrics, [](const QuestionMetrics& m) { return m.effective_options_no_context; });
    std::ostringstream rule;
    rule << "effective_options_no_context<" << threshold;
    FlagSet flags{rule.str(), {}, threshold};
    for (std::size_t idx : order) {
        if (metrics[idx].effective_options_no_context < threshold) flags.question_ids.push_back(metrics[idx].question_id);
    }
    return flags;
}

CrossTable cross_table(std::span<const CrossRun> runs) {
    if (runs.empty()) fail(ErrorKind::EmptyEvaluation, "no runs to tabulate");
    auto variant_rank = [](InputVariant v) {
        switch (v) {
            case InputVariant::OptionsOnly: return 0;
            case InputVariant::NoContext: return 1;
            case InputVariant::OptionsContext: return 2;
            case InputVariant::Full: return 3;
        }
        return 3;
    };

    std::vector<std::string> train_tags;
    CrossTable table;
    std::set<std::tuple<std::string, std::string, InputVariant>> seen;
    for (const auto& run : runs) {
        if (!seen.emplace(run.train, run.eval, run.variant).second) {
            fail(ErrorKind::DuplicateCell, "duplicate cell (" + run.train + ", " + run.eval + ", " +
                                               std::string(to_string(run.variant)) + ")");
        }
        if (std::find(train_tags.begin(), train_tags.end(), run.train) == train_tags.end()) {
            train_tags.push_back(run.train);
        }
        if (std::find(table.eval_tags.begin(), table.eval_tags.end(), run.eval) == table.eval_tags.end()) {
            table.eval_tags.push_back(run.eval);
        }
    }

    for (const auto& train : train_tags) {
        std::vector<InputVariant> variants;
        for (const auto& run : runs) {
            if (run.train == train && std::find(variants.begin(), variants.end(), run.variant) == variants.end()) {
                variants.push_back(run.variant);
            }
        }
        std::sort(variants.begin(), variants.end(),
                  [&](InputVariant a, InputVariant b) { return variant_rank(a) < variant_rank(b); });
        for (InputVariant v : variants) {
            CrossTable::Row row{train, v, std::vector<std::optional<double>>(table.eval_tags.size())};
            for (const auto& run : runs) {
                if (run.train != train || run.variant != v) continue;
                const auto col = std::find(table.eval_tags.begin(), table.eval_tags.end(), run.eval) -
                                 table.eval_tags.begin();
                row.cells[static_cast<std::size_t>(col)] = run.accuracy;
            }
            table.rows.push_back(std::move(row));
        }
    }
    return table;
}

std::string render_cross_table(const CrossTable& table, TableFormat format) {
    std::vector<std::vector<std::string>> grid;
    std::vector<std::string> header{"train", "input"};
    header.insert(header.end(), table.eval_tags.begin(), table.eval_tags.end());
    grid.push_back(header);
    for (const auto& row : table.rows) {
        std::vector<std::string> line{row.train, std::string(variant_label(row.variant))};
        for (const auto& cell : row.cells) line.push_back(cell ? format_percent(*cell) : "--");
        grid.push_back(std::move(line));
    }

    std::ostringstream out;
    if (format == TableFormat::Csv) {
        for (const auto& line : grid) {
            for (std::size_t c = 0; c < line.size(); ++c) {
                const bool quote = line[c].find_first_of(",\"") != std::string::npos;
                if (c) out << ',';
                if (quote) {
                    out << '"';
                    for (char ch : line[c]) out << (ch == '"' ? "\"\"" : std::string(1, ch));
                    out << '"';
                } else {
                    out << line[c];
                }
            }
            out << '\n';
        }
        return out.str();
    }

    std::vector<std::size_t> widths(header.size(), 0);
    for (const auto& line : grid) {
        for (std::size_t c = 0; c < line.size(); ++c) widths[c] = std::max(widths[c], line[c].size());
    }
    auto emit = [&](const std::vector<std::string>& line) {
        if (format == TableFormat::Markdown) out << "| ";
        for (std::size_t c = 0; c < line.size(); ++c) {
            if (c) out << (format == TableFormat::Markdown ? " | " : "  ");
            out << line[c] << std::string(widths[c] - line[c].size(), ' ');
        }
        if (format == TableFormat::Markdown) out << " |";
        out << '\n';
    };
    emit(grid.front());
    if (format == TableFormat::Markdown) {
        out << "|";
        for (std::size_t c = 0; c < widths.size(); ++c) out << std::string(widths[c] + 2, '-') << "|";
        out << '\n';
    }
    for (std::size_t r = 1; r < grid.size(); ++r) emit(grid[r]);
    return out.str();
}

}  // namespace mcqa
