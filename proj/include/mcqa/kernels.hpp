#pragma once

// Batch kernels over per-question score rows. Each kernel has a serial
// reference version and an OpenMP version; the two must agree bit for bit,
// because every parallel loop writes into its own output slot and all
// reductions happen afterwards in index order.

#include <span>
#include <vector>

#include "mcqa/core_model.hpp"

namespace mcqa::kernels {

using ScoreRow = std::vector<double>;

/// Caps the OpenMP worker count used by the parallel kernels (n >= 1).
void set_worker_count(int n);
int worker_count();

/// Applies MCQ_AUDIT_THREADS when it holds a positive integer.
void apply_thread_env();

/// Left-to-right sum; the only reduction used on kernel outputs.
double ordered_sum(std::span<const double> values) noexcept;

namespace serial {
void tempered_max_probs(std::span<const ScoreRow> rows, double temperature, std::span<double> out);
std::vector<ProbDist> tempered_dists(std::span<const ScoreRow> rows, double temperature);
std::vector<ScoreRow> score_items(std::span<const McqItem> items, InputVariant variant);
}  // namespace serial

namespace parallel {
void tempered_max_probs(std::span<const ScoreRow> rows, double temperature, std::span<double> out);
std::vector<ProbDist> tempered_dists(std::span<const ScoreRow> rows, double temperature);
std::vector<ScoreRow> score_items(std::span<const McqItem> items, InputVariant variant);
}  // namespace parallel

}  // namespace mcqa::kernels
