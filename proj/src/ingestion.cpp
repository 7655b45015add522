#include "mcqa/ingestion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "mcqa/error.hpp"
#include "mcqa/metrics.hpp"
#include "mcqa/serialize.hpp"

namespace mcqa {

namespace fs = std::filesystem;

namespace {

std::ifstream open_input(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::IoError, "cannot open '" + path.string() + "'");
    return in;
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::IoError, "cannot write '" + path.string() + "'");
    return out;
}

bool is_blank(const std::string& line) {
    return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

// Runs parse on every non-blank line; any failure is re-raised with the
// 1-based line number in front and the original kind preserved.
template <typename T, typename Parse>
std::vector<T> parse_lines(std::istream& in, Parse parse) {
    std::vector<T> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (is_blank(line)) continue;
        const std::string where = "line " + std::to_string(line_no) + ": ";
        try {
            out.push_back(parse(Json::parse(line), line_no));
        } catch (const AuditError& e) {
            fail(e.kind(), where + e.what());
        } catch (const Json::exception& e) {
            fail(ErrorKind::ParseError, where + e.what());
        }
    }
    return out;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char c : s) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    return quoted + "\"";
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

}  // namespace

std::vector<McqItem> parse_dataset(std::istream& in) {
    std::unordered_map<std::string, std::size_t> seen;
    auto items = parse_lines<McqItem>(in, [&](const Json& j, std::size_t line_no) {
        auto item = j.get<McqItem>();
        item.validate();
        if (auto [it, inserted] = seen.emplace(item.id, line_no); !inserted) {
            fail(ErrorKind::DuplicateId,
                 "question id '" + item.id + "' already defined on line " + std::to_string(it->second));
        }
        return item;
    });
    if (items.empty()) fail(ErrorKind::EmptyDataset, "dataset contains no questions");
    return items;
}

std::vector<McqItem> load_dataset(const fs::path& path) {
    auto in = open_input(path);
    return parse_dataset(in);
}

void write_dataset(const fs::path& path, const std::vector<McqItem>& items) {
    auto out = open_output(path);
    for (const auto& item : items) out << Json(item).dump() << '\n';
}

std::vector<PredictionRecord> parse_predictions(std::istream& in) {
    return parse_lines<PredictionRecord>(in, [](const Json& j, std::size_t) {
        auto record = j.get<PredictionRecord>();
        for (double l : record.logits) {
            if (!std::isfinite(l)) fail(ErrorKind::InvalidLogits, "non-finite logit for '" + record.question_id + "'");
        }
        return record;
    });
}

std::vector<PredictionRecord> load_predictions(const fs::path& path) {
    auto in = open_input(path);
    return parse_predictions(in);
}

void write_predictions(const fs::path& path, const std::vector<PredictionRecord>& records) {
    auto out = open_output(path);
    for (const auto& r : records) out << Json(r).dump() << '\n';
}

JoinResult join(const std::vector<McqItem>& items, const std::vector<PredictionRecord>& predictions,
                const std::string& system_id, const std::set<InputVariant>& required, const JoinOptions& options) {
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < items.size(); ++i) index.emplace(items[i].id, i);

    // (item, variant) -> seed -> logits, ordered by seed.
    std::vector<std::array<std::map<std::int64_t, const std::vector<double>*>, 4>> grouped(items.size());
    for (const auto& r : predictions) {
        if (r.system_id != system_id) continue;
        const auto it = index.find(r.question_id);
        if (it == index.end()) {
            fail(ErrorKind::OrphanPrediction, "prediction for unknown question '" + r.question_id + "'");
        }
        const McqItem& item = items[it->second];
        if (r.logits.size() != item.num_options()) {
            fail(ErrorKind::ShapeMismatch, "question '" + item.id + "' has " + std::to_string(item.num_options()) +
                                               " options but " + std::to_string(r.logits.size()) +
                                               " logits (variant " + std::string(to_string(r.variant)) +
                                               ", seed " + std::to_string(r.seed) + ")");
        }
        auto& seeds = grouped[it->second][static_cast<std::size_t>(r.variant)];
        if (!seeds.emplace(r.seed, &r.logits).second) {
            fail(ErrorKind::DuplicateId, "repeated prediction for question '" + item.id + "', variant " +
                                             std::string(to_string(r.variant)) + ", seed " + std::to_string(r.seed));
        }
    }

    JoinResult result;
    std::vector<std::string> uncovered;
    for (std::size_t i = 0; i < items.size(); ++i) {
        bool any = false;
        bool covered = true;
        for (InputVariant v : kAllVariants) {
            const bool present = !grouped[i][static_cast<std::size_t>(v)].empty();
            any = any || present;
            if (!present && required.contains(v)) {
                covered = false;
                result.missing.emplace_back(items[i].id, v);
            }
        }
        if (!covered) {
            uncovered.push_back(items[i].id);
            continue;
        }
        if (!any) continue;

        JoinedItem joined{items[i], {}, {}};
        for (InputVariant v : kAllVariants) {
            const auto& seeds = grouped[i][static_cast<std::size_t>(v)];
            if (seeds.empty()) continue;
            std::vector<ProbDist> members;
            members.reserve(seeds.size());
            for (const auto& [seed, logits] : seeds) members.push_back(softmax(*logits, items[i].id));
            joined.ensembles[static_cast<std::size_t>(v)] = ensemble_average(members);
            joined.seed_counts[static_cast<std::size_t>(v)] = seeds.size();
        }
        result.items.push_back(std::move(joined));
    }

    if (!uncovered.empty()) {
        if (!options.permissive) {
            std::string ids;
            for (std::size_t i = 0; i < uncovered.size() && i < 20; ++i) ids += (i ? ", " : "") + uncovered[i];
            if (uncovered.size() > 20) ids += ", ... (" + std::to_string(uncovered.size()) + " total)";
            fail(ErrorKind::CoverageError, "missing required variant predictions for: " + ids);
        }
        result.dropped_ids = std::move(uncovered);
    }
    return result;
}

void write_report(const AuditReport& report, const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) fail(ErrorKind::IoError, "cannot create '" + dir.string() + "': " + ec.message());

    Json j;
    j["schema_version"] = report.schema_version;
    j["system_id"] = report.system_id;
    j["dataset_tag"] = report.dataset_tag;
    j["settings"] = Json{{"max_options", report.settings.max_options},
                         {"flag_threshold", report.settings.flag_threshold},
                         {"mi_bins", report.settings.mi_bins},
                         {"calibrated", report.settings.calibrated}};
    j["dropped"] = report.dropped;
    j["calibration"] = report.calibration;
    j["per_question"] = report.per_question;
    j["bins"] = Json{{"no_context", report.bins_no_context}, {"full", report.bins_full}};
    j["mi_curve"] = report.mi_curve;
    j["flags"] = report.flags;
    j["cross_table"] = Json{{"runs", report.cross_runs}};
    {
        auto out = open_output(dir / kReportFile);
        out << j.dump(2) << '\n';
    }

    {
        auto out = open_output(dir / "bins.csv");
        out << "bin_low,bin_high,count_no_context,accuracy_no_context,count_full,accuracy_full\n";
        const std::size_t rows = std::max(report.bins_no_context.size(), report.bins_full.size());
        for (std::size_t i = 0; i < rows; ++i) {
            const BinRow* nc = i < report.bins_no_context.size() ? &report.bins_no_context[i] : nullptr;
            const BinRow* full = i < report.bins_full.size() ? &report.bins_full[i] : nullptr;
            const BinRow& edges = nc ? *nc : *full;
            out << num(edges.bin_low) << ',' << num(edges.bin_high) << ',' << (nc ? nc->count : 0) << ','
                << (nc ? opt_num(nc->accuracy) : "") << ',' << (full ? full->count : 0) << ','
                << (full ? opt_num(full->accuracy) : "") << '\n';
        }
    }
    {
        auto out = open_output(dir / "mi_curve.csv");
        out << "rank_bin,start_rank,count,mean_mi,accuracy_full,accuracy_no_context\n";
        for (const auto& r : report.mi_curve) {
            out << r.rank_bin << ',' << r.start_rank << ',' << r.count << ',' << num(r.mean_mi) << ','
                << num(r.accuracy_full) << ',' << num(r.accuracy_no_context) << '\n';
        }
    }
    {
        auto out = open_output(dir / "per_question.csv");
        out << "question_id,entropy_no_context,entropy_full,effective_options_no_context,"
               "effective_options_full,mutual_information,correct_no_context,correct_full\n";
        for (const auto& m : report.per_question) {
            out << csv_field(m.question_id) << ',' << num(m.entropy_no_context) << ',' << num(m.entropy_full) << ','
                << num(m.effective_options_no_context) << ',' << num(m.effective_options_full) << ','
                << num(m.mutual_information) << ',' << (m.correct_no_context ? 1 : 0) << ','
                << (m.correct_full ? 1 : 0) << '\n';
        }
    }
}

AuditReport read_report(const fs::path& dir) {
    auto in = open_input(dir / kReportFile);
    std::stringstream buffer;
    buffer << in.rdbuf();
    try {
        const Json j = Json::parse(buffer.str());
        const int version = j.at("schema_version").get<int>();
        if (version != kReportSchemaVersion) {
            fail(ErrorKind::VersionError, "report schema_version " + std::to_string(version) + " is not supported (expected " +
                                              std::to_string(kReportSchemaVersion) + ")");
        }
        AuditReport report;
        report.schema_version = version;
        report.system_id = j.at("system_id").get<std::string>();
        report.dataset_tag = j.at("dataset_tag").get<std::string>();
        const Json& s = j.at("settings");
        report.settings.max_options = s.at("max_options").get<std::size_t>();
        report.settings.flag_threshold = s.at("flag_threshold").get<double>();
        report.settings.mi_bins = s.at("mi_bins").get<std::size_t>();
        report.settings.calibrated = s.at("calibrated").get<bool>();
        report.dropped = j.at("dropped").get<std::size_t>();
        report.calibration = j.at("calibration").get<std::vector<CalibrationResult>>();
        report.per_question = j.at("per_question").get<std::vector<QuestionMetrics>>();
        report.bins_no_context = j.at("bins").at("no_context").get<std::vector<BinRow>>();
        report.bins_full = j.at("bins").at("full").get<std::vector<BinRow>>();
        report.mi_curve = j.at("mi_curve").get<std::vector<MiCurveRow>>();
        report.flags = j.at("flags").get<std::vector<FlagSet>>();
        report.cross_runs = j.at("cross_table").at("runs").get<std::vector<CrossRun>>();
        return report;
    } catch (const Json::exception& e) {
        fail(ErrorKind::ParseError, (dir / kReportFile).string() + ": " + e.what());
    }
}

}  // namespace mcqa
