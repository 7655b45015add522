#include <algorithm>

#include "mcqa/baseline_scorer.hpp"
#include "mcqa/kernels.hpp"
#include "mcqa/metrics.hpp"

namespace mcqa::kernels {

double ordered_sum(std::span<const double> values) noexcept {
    double total = 0.0;
    for (double v : values) total += v;
    return total;
}

namespace serial {

void tempered_max_probs(std::span<const ScoreRow> rows, double temperature, std::span<double> out) {
    std::vector<double> probs;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        probs.resize(rows[i].size());
        detail::tempered_softmax(rows[i], temperature, probs);
        out[i] = *std::max_element(probs.begin(), probs.end());
    }
}

std::vector<ProbDist> tempered_dists(std::span<const ScoreRow> rows, double temperature) {
    std::vector<ProbDist> dists;
    dists.reserve(rows.size());
    for (const auto& row : rows) {
        std::vector<double> probs(row.size());
        detail::tempered_softmax(row, temperature, probs);
        dists.emplace_back(std::move(probs));
    }
    return dists;
}

std::vector<ScoreRow> score_items(std::span<const McqItem> items, InputVariant variant) {
    std::vector<ScoreRow> rows;
    rows.reserve(items.size());
    for (const auto& item : items) rows.push_back(score(item, variant));
    return rows;
}

}  // namespace serial
}  // namespace mcqa::kernels
