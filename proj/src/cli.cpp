#include "mcqa/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "mcqa/calibration.hpp"
#include "mcqa/error.hpp"
#include "mcqa/ingestion.hpp"
#include "mcqa/kernels.hpp"
#include "mcqa/pipeline.hpp"
#include "mcqa/serialize.hpp"

namespace mcqa::cli {

namespace fs = std::filesystem;

namespace {

inline constexpr const char* kItemsFile = "items.jsonl";

void write_error_line(std::ostream& err, std::string_view kind, const std::string& message) {
    err << Json{{"error", kind}, {"message", message}}.dump() << '\n';
}

void print_warnings(std::ostream& err, const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) err << Json{{"warning", w}}.dump() << '\n';
}

struct ConvertArgs {
    std::string format;
    std::string in;
    std::string out;
};

struct ScoreArgs {
    std::string dataset;
    std::string variant;
    std::string out;
    std::string system = "baseline";
    std::int64_t seed = 0;
};

struct CalibrateArgs {
    std::string dataset;
    std::string preds;
    std::string system;
    std::string variant;
};

struct AuditArgs {
    std::string dataset;
    std::string preds;
    std::string system;
    std::string tag;
    double flag_threshold = kDefaultFlagThreshold;
    std::size_t mi_bins = kDefaultMiBins;
    bool raw = false;
    bool permissive = false;
    std::string out;
};

struct SelectArgs {
    std::string report;
    std::string key;
    std::size_t low = 0;
    std::size_t high = 0;
    std::string out;
    std::uint64_t seed = 0;
};

struct ReportArgs {
    std::string report;
    std::string format = "md";
    std::string runs;
};

int do_convert(const ConvertArgs& a, std::ostream& out) {
    const auto items = convert_dataset(a.format, a.in);
    std::set<std::string> ids;
    for (const auto& item : items) {
        if (!ids.insert(item.id).second) fail(ErrorKind::DuplicateId, "converted id '" + item.id + "' is not unique");
    }
    write_dataset(a.out, items);
    out << "wrote " << items.size() << " questions to " << a.out << '\n';
    return kExitOk;
}

int do_score(const ScoreArgs& a, std::ostream& out) {
    const auto items = load_dataset(a.dataset);
    const InputVariant variant = parse_variant(a.variant);
    const auto rows = kernels::parallel::score_items(items, variant);
    std::vector<PredictionRecord> records;
    records.reserve(items.size());
    for (std::size_t i = 0; i < items.size(); ++i) records.push_back({items[i].id, a.system, variant, a.seed, rows[i]});
    write_predictions(a.out, records);
    out << "wrote " << records.size() << " predictions to " << a.out << '\n';
    return kExitOk;
}

int do_calibrate(const CalibrateArgs& a, std::ostream& out) {
    const auto items = load_dataset(a.dataset);
    const auto preds = load_predictions(a.preds);
    const InputVariant variant = parse_variant(a.variant);
    const auto joined = join(items, preds, a.system, {variant});
    if (joined.items.empty()) fail(ErrorKind::CoverageError, "no predictions from system '" + a.system + "'");
    std::vector<ProbDist> dists;
    std::vector<std::size_t> golds;
    for (const auto& j : joined.items) {
        dists.push_back(*j.ensemble(variant));
        golds.push_back(j.item.answer_index);
    }
    const auto [result, calibrated] = calibrate_ensemble(dists, golds, a.system, variant);
    out << Json(result).dump(2) << '\n';
    return kExitOk;
}

int do_audit(const AuditArgs& a, std::ostream& out, std::ostream& err) {
    const auto items = load_dataset(a.dataset);
    const auto preds = load_predictions(a.preds);
    AuditOptions options;
    options.system_id = a.system;
    options.dataset_tag = a.tag.empty() ? fs::path(a.dataset).stem().string() : a.tag;
    options.flag_threshold = a.flag_threshold;
    options.mi_bins = a.mi_bins;
    options.calibrated = !a.raw;
    options.permissive = a.permissive;
    const auto outcome = run_audit(items, preds, options);
    print_warnings(err, outcome.warnings);
    write_report(outcome.report, a.out);
    write_dataset(fs::path(a.out) / kItemsFile, outcome.items);
    out << "audited " << outcome.report.per_question.size() << " questions; flagged "
        << outcome.report.flags.front().question_ids.size() << "; report in " << a.out << '\n';
    return kExitOk;
}

int do_select(const SelectArgs& a, std::ostream& out) {
    const auto report = read_report(a.report);
    const auto items = load_dataset(fs::path(a.report) / kItemsFile);
    ExtremeKey key;
    if (a.key == "entropy") {
        key = ExtremeKey::EntropyNoContext;
    } else if (a.key == "mi") {
        key = ExtremeKey::MutualInformation;
    } else {
        fail(ErrorKind::InvalidArgument, "--key must be 'entropy' or 'mi'");
    }
    const auto [low, high] = select_extremes(report.per_question, key, a.low, a.high);

    std::map<std::string, const McqItem*> by_id;
    for (const auto& item : items) by_id.emplace(item.id, &item);
    std::map<std::string, const QuestionMetrics*> metrics_by_id;
    for (const auto& m : report.per_question) metrics_by_id.emplace(m.question_id, &m);

    struct Entry {
        std::string id;
        std::string group;
    };
    std::vector<Entry> entries;
    for (const auto& id : low.question_ids) entries.push_back({id, "low"});
    for (const auto& id : high.question_ids) entries.push_back({id, "high"});
    for (const auto& e : entries) {
        if (!by_id.contains(e.id)) fail(ErrorKind::OrphanPrediction, "report question '" + e.id + "' is not in " + kItemsFile);
    }

    // Questions are answered without context first; the MI protocol then
    // repeats them with the passage.
    std::vector<std::string> phases{"no_context"};
    if (key == ExtremeKey::MutualInformation) phases.push_back("with_context");

    std::mt19937_64 rng(a.seed);
    std::ofstream sheet(a.out, std::ios::binary | std::ios::trunc);
    if (!sheet) fail(ErrorKind::IoError, "cannot write '" + a.out + "'");
    std::size_t row_no = 0;
    for (const auto& phase : phases) {
        auto order = entries;
        std::shuffle(order.begin(), order.end(), rng);
        for (const auto& e : order) {
            const McqItem& item = *by_id.at(e.id);
            Json row{{"row", row_no++}, {"phase", phase}, {"question_id", item.id}, {"question", item.question}};
            if (phase == "with_context") row["context"] = item.context;
            row["options"] = item.options;
            sheet << row.dump() << '\n';
        }
    }

    const std::string key_path = a.out + ".key.jsonl";
    std::ofstream key_file(key_path, std::ios::binary | std::ios::trunc);
    if (!key_file) fail(ErrorKind::IoError, "cannot write '" + key_path + "'");
    for (const auto& e : entries) {
        const auto& m = *metrics_by_id.at(e.id);
        key_file << Json{{"question_id", e.id},
                         {"group", e.group},
                         {"answer_index", by_id.at(e.id)->answer_index},
                         {"entropy_no_context", m.entropy_no_context},
                         {"mutual_information", m.mutual_information}}
                        .dump()
                 << '\n';
    }
    out << "wrote " << row_no << " worksheet rows to " << a.out << " (answer key: " << key_path << ")\n";
    return kExitOk;
}

std::vector<CrossRun> load_runs(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::IoError, "cannot open '" + path + "'");
    std::vector<CrossRun> runs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            runs.push_back(Json::parse(line).get<CrossRun>());
        } catch (const Json::exception& e) {
            fail(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return runs;
}

std::string fmt(double v, int digits = 4) {
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(digits);
    s << v;
    return s.str();
}

void render_markdown(const AuditReport& r, const CrossTable& table, std::ostream& out) {
    out << "# Audit: " << r.system_id << " on " << r.dataset_tag << "\n\n";
    out << "Questions: " << r.per_question.size() << " (dropped " << r.dropped << ")\n\n";
    if (!r.calibration.empty()) {
        out << "## Calibration\n\n| variant | T | accuracy | mean max prob before | after | converged |\n"
               "|---|---|---|---|---|---|\n";
        for (const auto& c : r.calibration) {
            out << "| " << to_string(c.variant) << " | " << fmt(c.temperature) << " | " << fmt(c.accuracy) << " | "
                << fmt(c.mean_max_prob_before) << " | " << fmt(c.mean_max_prob_after) << " | "
                << (c.converged ? "yes" : "no") << " |\n";
        }
        out << '\n';
    }
    out << "## Flags\n\n";
    for (const auto& f : r.flags) {
        out << "- `" << f.rule << "`: " << f.question_ids.size() << " question(s)";
        for (std::size_t i = 0; i < f.question_ids.size(); ++i) out << (i ? ", " : ": ") << f.question_ids[i];
        out << '\n';
    }
    out << "\n## Effective number of options\n\n| bin | no-context count | no-context acc | full count | full acc |\n"
           "|---|---|---|---|---|\n";
    for (std::size_t i = 0; i < r.bins_no_context.size() && i < r.bins_full.size(); ++i) {
        const auto& nc = r.bins_no_context[i];
        const auto& fu = r.bins_full[i];
        out << "| [" << fmt(nc.bin_low, 1) << ", " << fmt(nc.bin_high, 1) << (i + 1 == r.bins_full.size() ? "]" : ")")
            << " | " << nc.count << " | " << (nc.accuracy ? fmt(*nc.accuracy) : "-") << " | " << fu.count << " | "
            << (fu.accuracy ? fmt(*fu.accuracy) : "-") << " |\n";
    }
    out << "\n## Mutual information rank curve\n\n| rank bin | count | mean MI | full acc | no-context acc |\n"
           "|---|---|---|---|---|\n";
    for (const auto& m : r.mi_curve) {
        out << "| " << m.rank_bin << " | " << m.count << " | " << fmt(m.mean_mi) << " | " << fmt(m.accuracy_full)
            << " | " << fmt(m.accuracy_no_context) << " |\n";
    }
    out << "\n## Cross-performance (accuracy %)\n\n" << render_cross_table(table, TableFormat::Markdown);
}

int do_report(const ReportArgs& a, std::ostream& out) {
    const auto report = read_report(a.report);
    auto runs = report.cross_runs;
    if (!a.runs.empty()) {
        const auto extra = load_runs(a.runs);
        runs.insert(runs.end(), extra.begin(), extra.end());
    }
    const auto table = runs.empty() ? CrossTable{} : cross_table(runs);
    if (a.format == "csv") {
        out << render_cross_table(table, TableFormat::Csv);
    } else if (a.format == "json") {
        Json pivot{{"columns", table.eval_tags}, {"rows", Json::array()}};
        for (const auto& row : table.rows) {
            Json cells = Json::array();
            for (const auto& c : row.cells) cells.push_back(c ? Json(*c) : Json(nullptr));
            pivot["rows"].push_back(Json{{"train", row.train}, {"variant", std::string(to_string(row.variant))}, {"cells", cells}});
        }
        Json doc{{"system_id", report.system_id},
                 {"dataset_tag", report.dataset_tag},
                 {"calibration", report.calibration},
                 {"flags", report.flags},
                 {"cross_table", pivot}};
        out << doc.dump(2) << '\n';
    } else if (a.format == "md") {
        render_markdown(report, table, out);
    } else {
        fail(ErrorKind::InvalidArgument, "--format must be json, csv or md");
    }
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Audit multiple-choice questions for answerability without the passage", "mcq-audit"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every subcommand");
    int threads = 0;
    auto add_threads = [&threads](CLI::App* sub) {
        sub->add_option("--threads", threads, "Worker threads for parallel kernels (0: OpenMP default)")
            ->capture_default_str();
    };

    ConvertArgs convert_args;
    auto* convert = app.add_subcommand("convert", "Convert a public dataset file to canonical JSONL");
    convert->add_option("format", convert_args.format, "race | cosmosqa | reclor")->required();
    convert->add_option("in", convert_args.in, "Input file")->required();
    convert->add_option("out", convert_args.out, "Output JSONL")->required();

    ScoreArgs score_args;
    auto* score = app.add_subcommand("score", "Score a dataset with the lexical baseline scorer");
    score->add_option("--dataset", score_args.dataset, "Canonical dataset JSONL")->required();
    score->add_option("--variant", score_args.variant, "full | no_context | options_only | options_context")->required();
    score->add_option("--out", score_args.out, "Predictions JSONL to write")->required();
    score->add_option("--system", score_args.system, "system_id written into the records")->capture_default_str();
    score->add_option("--seed", score_args.seed, "seed written into the records")->capture_default_str();

    CalibrateArgs cal_args;
    auto* calibrate = app.add_subcommand("calibrate", "Fit the calibration temperature for one system and variant");
    calibrate->add_option("--dataset", cal_args.dataset, "Canonical dataset JSONL")->required();
    calibrate->add_option("--preds", cal_args.preds, "Predictions JSONL")->required();
    calibrate->add_option("--system", cal_args.system, "system_id to calibrate")->required();
    calibrate->add_option("--variant", cal_args.variant, "Input variant")->required();

    AuditArgs audit_args;
    auto* audit = app.add_subcommand("audit", "Run the full audit and write a report directory");
    audit->add_option("--dataset", audit_args.dataset, "Canonical dataset JSONL")->required();
    audit->add_option("--preds", audit_args.preds, "Predictions JSONL")->required();
    audit->add_option("--system", audit_args.system, "system_id to audit")->required();
    audit->add_option("--tag", audit_args.tag, "Dataset tag for the cross-performance table (default: file stem)");
    audit->add_option("--flag-threshold", audit_args.flag_threshold, "Flag when no-context effective options < this")
        ->capture_default_str();
    audit->add_option("--mi-bins", audit_args.mi_bins, "Equal-count bins for the MI rank curve")->capture_default_str();
    audit->add_flag("--raw-entropy", audit_args.raw, "Skip calibration; use raw ensemble entropies");
    audit->add_flag("--permissive", audit_args.permissive, "Drop uncovered questions instead of failing");
    audit->add_option("--out", audit_args.out, "Report directory")->required();

    SelectArgs select_args;
    auto* select = app.add_subcommand("select", "Export a human-evaluation worksheet of extreme questions");
    select->add_option("--report", select_args.report, "Report directory written by audit")->required();
    select->add_option("--key", select_args.key, "entropy | mi")->required();
    select->add_option("--low", select_args.low, "Number of lowest-key questions")->capture_default_str();
    select->add_option("--high", select_args.high, "Number of highest-key questions")->capture_default_str();
    select->add_option("--out", select_args.out, "Worksheet JSONL")->required();
    select->add_option("--seed", select_args.seed, "Shuffle seed")->capture_default_str();

    ReportArgs report_args;
    auto* report = app.add_subcommand("report", "Render a report directory as tables");
    report->add_option("--report", report_args.report, "Report directory")->required();
    report->add_option("--format", report_args.format, "json | csv | md")->capture_default_str();
    report->add_option("--runs", report_args.runs, "Extra cross-performance runs JSONL {train, eval, variant, accuracy}");

    for (auto* sub : {convert, score, calibrate, audit, select, report}) add_threads(sub);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        if (code == 0) return kExitOk;
        write_error_line(err, "UsageError", e.what());
        return kExitValidation;
    }

    try {
        if (threads > 0) kernels::set_worker_count(threads);
        kernels::apply_thread_env();
        if (*convert) return do_convert(convert_args, out);
        if (*score) return do_score(score_args, out);
        if (*calibrate) return do_calibrate(cal_args, out);
        if (*audit) return do_audit(audit_args, out, err);
        if (*select) return do_select(select_args, out);
        if (*report) return do_report(report_args, out);
    } catch (const AuditError& e) {
        write_error_line(err, to_string(e.kind()), e.what());
        return e.kind() == ErrorKind::CoverageError ? kExitCoverage : kExitValidation;
    } catch (const std::exception& e) {
        write_error_line(err, "InternalError", e.what());
        return kExitValidation;
    }
    return kExitValidation;
}

}  // namespace mcqa::cli
