#include <omp.h>

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <optional>
#include <string>

#include "mcqa/baseline_scorer.hpp"
#include "mcqa/error.hpp"
#include "mcqa/kernels.hpp"
#include "mcqa/metrics.hpp"

namespace mcqa::kernels {

namespace {
int g_workers = 0;  // 0: OpenMP default

int resolved_workers() { return g_workers > 0 ? g_workers : omp_get_max_threads(); }

// Rethrows the exception raised by the lowest failing index, so error
// reporting does not depend on scheduling.
void rethrow_first(std::vector<std::exception_ptr>& errors) {
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}
}  // namespace

void set_worker_count(int n) {
    if (n < 1) fail(ErrorKind::InvalidArgument, "worker count must be at least 1");
    g_workers = n;
}

int worker_count() { return resolved_workers(); }

void apply_thread_env() {
    const char* raw = std::getenv("MCQ_AUDIT_THREADS");
    if (raw == nullptr) return;
    char* end = nullptr;
    const long n = std::strtol(raw, &end, 10);
    if (end != raw && *end == '\0' && n > 0) {
        const int cap = static_cast<int>(std::min<long>(n, 1 << 16));
        set_worker_count(g_workers > 0 ? std::min(g_workers, cap) : cap);
    }
}

namespace parallel {

void tempered_max_probs(std::span<const ScoreRow> rows, double temperature, std::span<double> out) {
    const auto n = static_cast<std::ptrdiff_t>(rows.size());
#pragma omp parallel num_threads(resolved_workers())
    {
        std::vector<double> probs;
#pragma omp for schedule(static)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            probs.resize(rows[i].size());
            detail::tempered_softmax(rows[i], temperature, probs);
            out[i] = *std::max_element(probs.begin(), probs.end());
        }
    }
}

std::vector<ProbDist> tempered_dists(std::span<const ScoreRow> rows, double temperature) {
    const auto n = static_cast<std::ptrdiff_t>(rows.size());
    std::vector<std::optional<ProbDist>> slots(rows.size());
    std::vector<std::exception_ptr> errors(rows.size());
#pragma omp parallel for schedule(static) num_threads(resolved_workers())
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            std::vector<double> probs(rows[i].size());
            detail::tempered_softmax(rows[i], temperature, probs);
            slots[i].emplace(std::move(probs));
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    rethrow_first(errors);
    std::vector<ProbDist> dists;
    dists.reserve(slots.size());
    for (auto& slot : slots) dists.push_back(std::move(*slot));
    return dists;
}

std::vector<ScoreRow> score_items(std::span<const McqItem> items, InputVariant variant) {
    const auto n = static_cast<std::ptrdiff_t>(items.size());
    std::vector<ScoreRow> rows(items.size());
#pragma omp parallel for schedule(dynamic, 16) num_threads(resolved_workers())
    for (std::ptrdiff_t i = 0; i < n; ++i) rows[i] = score(items[i], variant);
    return rows;
}

}  // namespace parallel
}  // namespace mcqa::kernels
