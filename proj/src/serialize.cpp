#include "mcqa/serialize.hpp"

#include <string>

#include "mcqa/error.hpp"

namespace mcqa {

namespace {

std::optional<double> optional_double(const Json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<double>();
}

Json optional_to_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::size_t non_negative_index(const Json& j, const char* field) {
    const Json& v = j.at(field);
    if (!v.is_number_integer()) fail(ErrorKind::ParseError, std::string(field) + " must be an integer");
    const auto raw = v.get<std::int64_t>();
    if (raw < 0) fail(ErrorKind::InvalidLabel, std::string(field) + " is negative");
    return static_cast<std::size_t>(raw);
}

}  // namespace

void to_json(Json& j, const McqItem& item) {
    j = Json{{"id", item.id},
             {"context", item.context},
             {"question", item.question},
             {"options", item.options},
             {"answer_index", item.answer_index}};
}

void from_json(const Json& j, McqItem& item) {
    item.id = j.at("id").get<std::string>();
    item.context = j.at("context").get<std::string>();
    item.question = j.at("question").get<std::string>();
    item.options = j.at("options").get<std::vector<std::string>>();
    item.answer_index = non_negative_index(j, "answer_index");
}

void to_json(Json& j, const PredictionRecord& record) {
    j = Json{{"question_id", record.question_id},
             {"system_id", record.system_id},
             {"variant", std::string(to_string(record.variant))},
             {"seed", record.seed},
             {"logits", record.logits}};
}

void from_json(const Json& j, PredictionRecord& record) {
    record.question_id = j.at("question_id").get<std::string>();
    record.system_id = j.at("system_id").get<std::string>();
    record.variant = parse_variant(j.at("variant").get<std::string>());
    const Json& seed = j.at("seed");
    if (!seed.is_number_integer()) fail(ErrorKind::ParseError, "seed must be an integer");
    record.seed = seed.get<std::int64_t>();
    const Json& logits = j.at("logits");
    if (!logits.is_array()) fail(ErrorKind::ParseError, "logits must be an array");
    record.logits.clear();
    for (const auto& v : logits) {
        if (!v.is_number()) fail(ErrorKind::ParseError, "logits must be numbers");
        record.logits.push_back(v.get<double>());
    }
}

void to_json(Json& j, const CalibrationResult& r) {
    j = Json{{"system_id", r.system_id},
             {"variant", std::string(to_string(r.variant))},
             {"temperature", r.temperature},
             {"accuracy", r.accuracy},
             {"mean_max_prob_before", r.mean_max_prob_before},
             {"mean_max_prob_after", r.mean_max_prob_after},
             {"converged", r.converged}};
}

void from_json(const Json& j, CalibrationResult& r) {
    r.system_id = j.at("system_id").get<std::string>();
    r.variant = parse_variant(j.at("variant").get<std::string>());
    r.temperature = j.at("temperature").get<double>();
    r.accuracy = j.at("accuracy").get<double>();
    r.mean_max_prob_before = j.at("mean_max_prob_before").get<double>();
    r.mean_max_prob_after = j.at("mean_max_prob_after").get<double>();
    r.converged = j.at("converged").get<bool>();
}

void to_json(Json& j, const QuestionMetrics& m) {
    j = Json{{"question_id", m.question_id},
             {"entropy_no_context", m.entropy_no_context},
             {"entropy_full", m.entropy_full},
             {"effective_options_no_context", m.effective_options_no_context},
             {"effective_options_full", m.effective_options_full},
             {"mutual_information", m.mutual_information},
             {"correct_no_context", m.correct_no_context},
             {"correct_full", m.correct_full}};
}

void from_json(const Json& j, QuestionMetrics& m) {
    m.question_id = j.at("question_id").get<std::string>();
    m.entropy_no_context = j.at("entropy_no_context").get<double>();
    m.entropy_full = j.at("entropy_full").get<double>();
    m.effective_options_no_context = j.at("effective_options_no_context").get<double>();
    m.effective_options_full = j.at("effective_options_full").get<double>();
    m.mutual_information = j.at("mutual_information").get<double>();
    m.correct_no_context = j.at("correct_no_context").get<bool>();
    m.correct_full = j.at("correct_full").get<bool>();
}

void to_json(Json& j, const BinRow& row) {
    j = Json{{"bin_low", row.bin_low},
             {"bin_high", row.bin_high},
             {"count", row.count},
             {"accuracy", optional_to_json(row.accuracy)}};
}

void from_json(const Json& j, BinRow& row) {
    row.bin_low = j.at("bin_low").get<double>();
    row.bin_high = j.at("bin_high").get<double>();
    row.count = j.at("count").get<std::size_t>();
    row.accuracy = optional_double(j.at("accuracy"));
}

void to_json(Json& j, const MiCurveRow& row) {
    j = Json{{"rank_bin", row.rank_bin},
             {"start_rank", row.start_rank},
             {"count", row.count},
             {"accuracy_full", row.accuracy_full},
             {"accuracy_no_context", row.accuracy_no_context},
             {"mean_mi", row.mean_mi}};
}

void from_json(const Json& j, MiCurveRow& row) {
    row.rank_bin = j.at("rank_bin").get<std::size_t>();
    row.start_rank = j.at("start_rank").get<std::size_t>();
    row.count = j.at("count").get<std::size_t>();
    row.accuracy_full = j.at("accuracy_full").get<double>();
    row.accuracy_no_context = j.at("accuracy_no_context").get<double>();
    row.mean_mi = j.at("mean_mi").get<double>();
}

void to_json(Json& j, const FlagSet& flags) {
    j = Json{{"rule", flags.rule},
             {"threshold", optional_to_json(flags.threshold)},
             {"question_ids", flags.question_ids}};
}

void from_json(const Json& j, FlagSet& flags) {
    flags.rule = j.at("rule").get<std::string>();
    flags.threshold = optional_double(j.at("threshold"));
    flags.question_ids = j.at("question_ids").get<std::vector<std::string>>();
}

void to_json(Json& j, const CrossRun& run) {
    j = Json{{"train", run.train},
             {"eval", run.eval},
             {"variant", std::string(to_string(run.variant))},
             {"accuracy", run.accuracy}};
}

void from_json(const Json& j, CrossRun& run) {
    run.train = j.at("train").get<std::string>();
    run.eval = j.at("eval").get<std::string>();
    run.variant = parse_variant(j.at("variant").get<std::string>());
    run.accuracy = j.at("accuracy").get<double>();
}

Json dist_to_json(const ProbDist& dist) {
    return Json{{"probs", std::vector<double>(dist.probs().begin(), dist.probs().end())},
                {"entropy_bits", dist.entropy_bits()},
                {"effective_options", dist.effective_options()}};
}

ProbDist dist_from_json(const Json& j) { return ProbDist(j.at("probs").get<std::vector<double>>()); }

}  // namespace mcqa
