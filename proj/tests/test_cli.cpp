#include <algorithm>
#include <fstream>

#include "cli_helpers.hpp"
#include "doctest.h"
#include "mcqa/ingestion.hpp"
#include "mcqa/serialize.hpp"

using namespace mcqa;

namespace {

std::size_t csv_column_sum(const std::string& csv, std::size_t column) {
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    std::size_t total = 0;
    while (std::getline(in, line)) {
        std::istringstream cells(line);
        std::string cell;
        for (std::size_t c = 0; c <= column; ++c) std::getline(cells, cell, ',');
        total += std::stoul(cell);
    }
    return total;
}

std::vector<Json> read_jsonl(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::vector<Json> rows;
    std::string line;
    while (std::getline(in, line)) rows.push_back(Json::parse(line));
    return rows;
}

}  // namespace

TEST_CASE("audit on the toy corpus writes a complete report directory") {
    TempDir dir;
    const auto preds = score_toy(dir);
    const auto out = dir / "report";
    const auto r = run_cli({"audit", "--dataset", MCQA_TOY_CORPUS, "--preds", preds.string(), "--system", "baseline",
                            "--out", out.string()});
    REQUIRE(r.code == 0);
    CHECK(r.err.find("mi-bins") != std::string::npos);
    for (const char* f : {"report.json", "bins.csv", "mi_curve.csv", "per_question.csv", "items.jsonl"}) {
        CHECK(std::filesystem::exists(out / f));
    }
    const auto bins = read_file(out / "bins.csv");
    CHECK(csv_column_sum(bins, 2) == 20);
    CHECK(csv_column_sum(bins, 4) == 20);

    const auto report = read_report(out);
    CHECK(report.dataset_tag == "toy_corpus");
    CHECK(report.calibration.size() == 2);
    CHECK(report.cross_runs.size() == 2);
    CHECK(report.settings.mi_bins == 20);
}

TEST_CASE("raw-entropy audit skips calibration") {
    TempDir dir;
    const auto preds = score_toy(dir);
    const auto r = run_cli({"audit", "--dataset", MCQA_TOY_CORPUS, "--preds", preds.string(), "--system", "baseline",
                            "--raw-entropy", "--mi-bins", "4", "--out", (dir / "raw").string()});
    REQUIRE(r.code == 0);
    const auto report = read_report(dir / "raw");
    CHECK(report.calibration.empty());
    CHECK_FALSE(report.settings.calibrated);
    CHECK(report.mi_curve.size() == 4);
}

TEST_CASE("audit is byte-identical across worker counts") {
    TempDir dir;
    const auto preds = score_toy(dir);
    for (const char* threads : {"1", "4"}) {
        const auto r = run_cli({"audit", "--threads", threads, "--dataset", MCQA_TOY_CORPUS, "--preds", preds.string(),
                                "--system", "baseline", "--out", (dir / (std::string("run") + threads)).string()});
        REQUIRE(r.code == 0);
    }
    CHECK(snapshot(dir / "run1") == snapshot(dir / "run4"));
}

TEST_CASE("coverage errors exit with 2") {
    TempDir dir;
    const auto full = dir / "full.jsonl";
    run_cli({"score", "--dataset", MCQA_TOY_CORPUS, "--variant", "full", "--out", full.string()});
    const auto r = run_cli({"audit", "--dataset", MCQA_TOY_CORPUS, "--preds", full.string(), "--system", "baseline",
                            "--out", (dir / "x").string()});
    CHECK(r.code == 2);
    const auto err = Json::parse(r.err.substr(0, r.err.find('\n')));
    CHECK(err["error"] == "CoverageError");

    const auto permissive = run_cli({"audit", "--dataset", MCQA_TOY_CORPUS, "--preds", full.string(), "--system",
                                     "baseline", "--permissive", "--out", (dir / "y").string()});
    CHECK(permissive.code == 2);  // nothing left once every question is dropped
}

TEST_CASE("calibrate prints the fitted temperature") {
    TempDir dir;
    const auto preds = score_toy(dir);
    const auto r = run_cli({"calibrate", "--dataset", MCQA_TOY_CORPUS, "--preds", preds.string(), "--system",
                            "baseline", "--variant", "no_context"});
    REQUIRE(r.code == 0);
    const auto result = Json::parse(r.out).get<CalibrationResult>();
    CHECK(result.variant == InputVariant::NoContext);
    CHECK(result.converged);
    CHECK(std::abs(result.mean_max_prob_after - result.accuracy) <= 1e-6);
}

TEST_CASE("calibrate on constant logits fails with UncalibratableSystem") {
    TempDir dir;
    const auto preds = dir / "flat.jsonl";
    REQUIRE(run_cli({"score", "--dataset", MCQA_TOY_CORPUS, "--variant", "options_only", "--out", preds.string()}).code == 0);
    const auto r = run_cli({"calibrate", "--dataset", MCQA_TOY_CORPUS, "--preds", preds.string(), "--system",
                            "baseline", "--variant", "options_only"});
    CHECK(r.code == 1);
    CHECK(Json::parse(r.err)["error"] == "UncalibratableSystem");
}

TEST_CASE("select writes shuffled worksheets without context for the no-context phase") {
    TempDir dir;
    const auto preds = score_toy(dir);
    const auto report = dir / "report";
    REQUIRE(run_cli({"audit", "--dataset", MCQA_TOY_CORPUS, "--preds", preds.string(), "--system", "baseline", "--out",
                     report.string()})
                .code == 0);

    const auto sheet = dir / "sheet.jsonl";
    REQUIRE(run_cli({"select", "--report", report.string(), "--key", "entropy", "--low", "5", "--high", "5", "--out",
                     sheet.string()})
                .code == 0);
    const auto rows = read_jsonl(sheet);
    CHECK(rows.size() == 10);
    for (const auto& row : rows) {
        CHECK_FALSE(row.contains("context"));
        CHECK_FALSE(row.contains("answer_index"));
        CHECK(row["phase"] == "no_context");
    }
    const auto key = read_jsonl(sheet.string() + ".key.jsonl");
    REQUIRE(key.size() == 10);
    // The five lowest-entropy questions are giveaways.
    for (std::size_t i = 0; i < 5; ++i) CHECK(key[i]["question_id"].get<std::string>()[0] == 'g');

    const auto first = read_file(sheet);
    run_cli({"select", "--report", report.string(), "--key", "entropy", "--low", "5", "--high", "5", "--out", sheet.string()});
    CHECK(read_file(sheet) == first);
    run_cli({"select", "--report", report.string(), "--key", "entropy", "--low", "5", "--high", "5", "--seed", "9",
             "--out", sheet.string()});
    CHECK(read_file(sheet) != first);

    const auto mi_sheet = dir / "mi.jsonl";
    REQUIRE(run_cli({"select", "--report", report.string(), "--key", "mi", "--low", "3", "--high", "3", "--out",
                     mi_sheet.string()})
                .code == 0);
    const auto mi_rows = read_jsonl(mi_sheet);
    REQUIRE(mi_rows.size() == 12);
    for (std::size_t i = 0; i < 6; ++i) CHECK_FALSE(mi_rows[i].contains("context"));
    for (std::size_t i = 6; i < 12; ++i) CHECK(mi_rows[i]["phase"] == "with_context");
}

TEST_CASE("select oversubscription exits 1") {
    TempDir dir;
    const auto dataset = dir.write("three.jsonl",
                                   R"({"id":"a","context":"x y","question":"x?","options":["x","z"],"answer_index":0})" "\n"
                                   R"({"id":"b","context":"x y","question":"y?","options":["y","z"],"answer_index":0})" "\n"
                                   R"({"id":"c","context":"x y","question":"w?","options":["x","y"],"answer_index":1})" "\n");
    const auto preds = dir / "p.jsonl";
    run_cli({"score", "--dataset", dataset.string(), "--variant", "full", "--out", (dir / "f.jsonl").string()});
    run_cli({"score", "--dataset", dataset.string(), "--variant", "no_context", "--out", (dir / "n.jsonl").string()});
    std::ofstream(preds) << read_file(dir / "f.jsonl") << read_file(dir / "n.jsonl");
    REQUIRE(run_cli({"audit", "--dataset", dataset.string(), "--preds", preds.string(), "--system", "baseline",
                     "--mi-bins", "3", "--out", (dir / "rep").string()})
                .code == 0);
    const auto r = run_cli({"select", "--report", (dir / "rep").string(), "--key", "entropy", "--low", "2", "--high",
                            "2", "--out", (dir / "w.jsonl").string()});
    CHECK(r.code == 1);
    CHECK(Json::parse(r.err)["error"] == "InsufficientQuestions");
}

TEST_CASE("report renders every format and merges extra runs") {
    TempDir dir;
    const auto preds = score_toy(dir);
    const auto report = dir / "report";
    REQUIRE(run_cli({"audit", "--dataset", MCQA_TOY_CORPUS, "--preds", preds.string(), "--system", "baseline", "--tag",
                     "TOY", "--out", report.string()})
                .code == 0);

    const auto md = run_cli({"report", "--report", report.string()});
    REQUIRE(md.code == 0);
    CHECK(md.out.find("## Calibration") != std::string::npos);
    CHECK(md.out.find("| baseline | Q+{O}") != std::string::npos);

    const auto runs = dir.write("runs.jsonl", R"({"train":"RACE++","eval":"TOY","variant":"no_context","accuracy":0.5732})" "\n");
    const auto csv = run_cli({"report", "--report", report.string(), "--format", "csv", "--runs", runs.string()});
    REQUIRE(csv.code == 0);
    CHECK(csv.out.find("RACE++,Q+{O},57.32") != std::string::npos);
    CHECK(csv.out.find("baseline,Q+{O},60.00") != std::string::npos);

    const auto json = run_cli({"report", "--report", report.string(), "--format", "json"});
    REQUIRE(json.code == 0);
    CHECK(Json::parse(json.out)["cross_table"]["columns"][0] == "TOY");

    CHECK(run_cli({"report", "--report", report.string(), "--format", "xml"}).code == 1);
    CHECK(run_cli({"report", "--report", report.string(), "--runs", runs.string() + ".missing"}).code == 1);
}

TEST_CASE("corrupted report and bad inputs exit 1") {
    TempDir dir;
    dir.write("report.json", "{ not json");
    const auto r = run_cli({"report", "--report", dir.path().string()});
    CHECK(r.code == 1);
    CHECK(Json::parse(r.err)["error"] == "ParseError");

    const auto bad = dir.write("bad.jsonl", "{\"id\":\"a\"}\n");
    const auto s = run_cli({"score", "--dataset", bad.string(), "--variant", "full", "--out", (dir / "o").string()});
    CHECK(s.code == 1);
    CHECK(Json::parse(s.err)["message"].get<std::string>().find("line 1") != std::string::npos);

    CHECK(run_cli({"score", "--dataset", MCQA_TOY_CORPUS, "--variant", "noctx", "--out", (dir / "o").string()}).code == 1);
    CHECK(run_cli({"audit"}).code == 1);
    CHECK(run_cli({}).code == 1);
}

TEST_CASE("convert writes canonical JSONL") {
    TempDir dir;
    const auto in = dir.write("reclor.json", R"([{"context":"c","question":"q","answers":["a","b","c","d"],"label":2,"id_string":"r0"}])");
    const auto out = dir / "out.jsonl";
    REQUIRE(run_cli({"convert", "reclor", in.string(), out.string()}).code == 0);
    const auto items = load_dataset(out);
    REQUIRE(items.size() == 1);
    CHECK(items[0].answer_index == 2);
}

TEST_CASE("every subcommand's help lists its flags with defaults") {
    const auto audit = run_cli({"audit", "--help"});
    CHECK(audit.code == 0);
    CHECK(audit.out.find("--flag-threshold FLOAT [2]") != std::string::npos);
    CHECK(audit.out.find("--mi-bins UINT [50]") != std::string::npos);
    CHECK(audit.out.find("--threads INT [0]") != std::string::npos);
    const auto select = run_cli({"select", "--help"});
    CHECK(select.out.find("--seed UINT [0]") != std::string::npos);
    CHECK(select.out.find("--low UINT [0]") != std::string::npos);
    for (const char* sub : {"convert", "score", "calibrate", "report"}) {
        const auto h = run_cli({sub, "--help"});
        CHECK(h.code == 0);
        CHECK(h.out.find("--threads") != std::string::npos);
    }
    CHECK(run_cli({"report", "--help"}).out.find("--format TEXT [md]") != std::string::npos);
    CHECK(run_cli({"score", "--help"}).out.find("--system TEXT [baseline]") != std::string::npos);
}
