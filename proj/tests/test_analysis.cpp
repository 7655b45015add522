#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "mcqa/analysis.hpp"
#include "mcqa/error.hpp"

using namespace mcqa;

namespace {

QuestionMetrics with_effective(std::string id, double eff_nc, bool correct_nc, double eff_full = 4.0,
                               bool correct_full = false) {
    QuestionMetrics m;
    m.question_id = std::move(id);
    m.effective_options_no_context = eff_nc;
    m.entropy_no_context = std::log2(eff_nc);
    m.effective_options_full = eff_full;
    m.entropy_full = std::log2(eff_full);
    m.mutual_information = m.entropy_no_context - m.entropy_full;
    m.correct_no_context = correct_nc;
    m.correct_full = correct_full;
    return m;
}

QuestionMetrics with_mi(std::string id, double mi, bool correct_full = false, bool correct_nc = false) {
    QuestionMetrics m;
    m.question_id = std::move(id);
    m.mutual_information = mi;
    m.entropy_no_context = mi;
    m.correct_full = correct_full;
    m.correct_no_context = correct_nc;
    return m;
}

std::vector<QuestionMetrics> random_metrics(std::uint64_t seed, std::size_t n) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> eff(1.0, 4.0);
    std::bernoulli_distribution coin(0.5);
    std::vector<QuestionMetrics> out;
    for (std::size_t i = 0; i < n; ++i) {
        // Some exact edges, including the closed upper one.
        double e = i % 17 == 0 ? 1.0 + 0.2 * static_cast<double>(i % 16) : eff(rng);
        if (i % 23 == 0) e = 4.0;
        out.push_back(with_effective("q" + std::to_string(i), e, coin(rng), eff(rng), coin(rng)));
    }
    return out;
}

ErrorKind kind_of(auto&& f) {
    try {
        f();
    } catch (const AuditError& e) {
        return e.kind();
    }
    FAIL("expected an AuditError");
    return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("bins cover [1, 4] with width 0.2") {
    const auto bins = bin_effective_options(std::vector<QuestionMetrics>{}, EntropyStream::NoContext, 4);
    REQUIRE(bins.size() == 15);
    CHECK(bins.front().bin_low == 1.0);
    CHECK(bins.back().bin_high == 4.0);
    for (const auto& b : bins) {
        CHECK(std::abs((b.bin_high - b.bin_low) - 0.2) <= 1e-12);
        CHECK(b.count == 0);
        CHECK_FALSE(b.accuracy.has_value());
    }
}

TEST_CASE("bin examples") {
    const std::vector<QuestionMetrics> two{with_effective("a", 1.05, true), with_effective("b", 1.15, true)};
    const auto bins = bin_effective_options(two, EntropyStream::NoContext);
    CHECK(bins[0].count == 2);
    CHECK(bins[0].accuracy == 1.0);

    const std::vector<QuestionMetrics> top{with_effective("u", 4.0, false)};
    const auto last = bin_effective_options(top, EntropyStream::NoContext);
    CHECK(last.back().count == 1);
    CHECK(last.back().bin_low == doctest::Approx(3.8));
    CHECK(last.back().accuracy == 0.0);

    // An exact interior edge goes to the upper bin.
    const std::vector<QuestionMetrics> edge{with_effective("e", 1.2, true)};
    CHECK(bin_effective_options(edge, EntropyStream::NoContext)[1].count == 1);
}

TEST_CASE("bins use the selected stream") {
    const std::vector<QuestionMetrics> m{with_effective("a", 1.1, true, 3.9, false)};
    const auto full = bin_effective_options(m, EntropyStream::Full);
    CHECK(full.back().count == 1);
    CHECK(full.back().accuracy == 0.0);
}

TEST_CASE("property: bin counts partition the questions") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto metrics = random_metrics(seed, 500);
        for (auto stream : {EntropyStream::NoContext, EntropyStream::Full}) {
            const auto bins = bin_effective_options(metrics, stream);
            std::size_t total = 0;
            for (const auto& b : bins) {
                total += b.count;
                CHECK(b.accuracy.has_value() == (b.count > 0));
            }
            CHECK(total == metrics.size());
        }
    }
}

TEST_CASE("MI rank curve examples") {
    const std::vector<QuestionMetrics> four{with_mi("a", 0.9, true), with_mi("b", -0.1), with_mi("c", 0.5, true),
                                            with_mi("d", 0.2)};
    const auto rows = mi_rank_curve(four, 2);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].count == 2);
    CHECK(rows[0].accuracy_full == 0.0);
    CHECK(rows[0].mean_mi == doctest::Approx(0.05));
    CHECK(rows[1].accuracy_full == 1.0);
    CHECK(rows[1].start_rank == 2);

    std::vector<QuestionMetrics> five;
    for (int i = 0; i < 5; ++i) five.push_back(with_mi("q" + std::to_string(i), 0.3));
    const auto uneven = mi_rank_curve(five, 2);
    CHECK(uneven[0].count == 3);
    CHECK(uneven[1].count == 2);

    CHECK(kind_of([&] { mi_rank_curve(five, 6); }) == ErrorKind::TooManyBins);
}

TEST_CASE("MI ties fall back to id order") {
    const std::vector<QuestionMetrics> tied{with_mi("b", 0.0, true), with_mi("a", 0.0, false), with_mi("d", 0.0, true),
                                            with_mi("c", 0.0, false)};
    const auto rows = mi_rank_curve(tied, 2);
    // ids a, b in the first bin: one correct of two.
    CHECK(rows[0].accuracy_full == 0.5);
    CHECK(rows[1].accuracy_full == 0.5);
    CHECK(rows[0].count == rows[1].count);
}

TEST_CASE("property: MI rank bins partition the dataset") {
    for (std::size_t n : {1u, 7u, 50u, 333u}) {
        const auto metrics = random_metrics(n, n);
        for (std::size_t bins : {std::size_t{1}, std::min<std::size_t>(n, 4), n}) {
            const auto rows = mi_rank_curve(metrics, bins);
            std::size_t total = 0;
            std::size_t expected_start = 0;
            for (const auto& r : rows) {
                CHECK(r.start_rank == expected_start);
                expected_start += r.count;
                total += r.count;
            }
            CHECK(total == n);
            CHECK(rows.front().count - rows.back().count <= 1);
        }
    }
}

TEST_CASE("select_extremes examples") {
    std::vector<QuestionMetrics> m{with_mi("x", 0.1), with_mi("y", 0.5), with_mi("z", 1.9)};
    for (auto& q : m) q.entropy_no_context = q.mutual_information;
    const auto [low, high] = select_extremes(m, ExtremeKey::EntropyNoContext, 1, 1);
    CHECK(low.question_ids == std::vector<std::string>{"x"});
    CHECK(high.question_ids == std::vector<std::string>{"z"});
    CHECK(low.threshold == 0.1);
    CHECK(high.threshold == 1.9);

    const auto [none, rest] = select_extremes(m, ExtremeKey::MutualInformation, 0, 2);
    CHECK(none.question_ids.empty());
    CHECK_FALSE(none.threshold.has_value());
    CHECK(rest.question_ids == std::vector<std::string>{"y", "z"});

    const std::vector<QuestionMetrics> tied{with_mi("b", 1.0), with_mi("a", 1.0), with_mi("c", 1.0)};
    const auto [tl, th] = select_extremes(tied, ExtremeKey::MutualInformation, 1, 1);
    CHECK(tl.question_ids == std::vector<std::string>{"a"});
    CHECK(th.question_ids == std::vector<std::string>{"c"});

    CHECK(kind_of([&] { select_extremes(m, ExtremeKey::MutualInformation, 2, 2); }) ==
          ErrorKind::InsufficientQuestions);
}

TEST_CASE("property: extreme sets are disjoint and correctly sized") {
    const auto metrics = random_metrics(5, 400);
    for (auto [lo, hi] : {std::pair<std::size_t, std::size_t>{100, 100}, {50, 50}, {0, 400}, {200, 200}, {3, 0}}) {
        for (auto key : {ExtremeKey::EntropyNoContext, ExtremeKey::MutualInformation}) {
            const auto [low, high] = select_extremes(metrics, key, lo, hi);
            CHECK(low.question_ids.size() == lo);
            CHECK(high.question_ids.size() == hi);
            std::set<std::string> all(low.question_ids.begin(), low.question_ids.end());
            all.insert(high.question_ids.begin(), high.question_ids.end());
            CHECK(all.size() == lo + hi);
        }
    }
}

TEST_CASE("low-entropy flags") {
    const std::vector<QuestionMetrics> m{with_effective("a", 1.3, true), with_effective("b", 3.9, false),
                                         with_effective("c", 1.1, true)};
    const auto flags = flag_low_entropy(m, 2.0);
    CHECK(flags.question_ids == std::vector<std::string>{"c", "a"});
    CHECK(flags.threshold == 2.0);
    CHECK(kind_of([&] { flag_low_entropy(m, 1.0); }) == ErrorKind::InvalidThreshold);
    CHECK(kind_of([&] { flag_low_entropy(m, 4.5); }) == ErrorKind::InvalidThreshold);
    CHECK_NOTHROW(flag_low_entropy(m, 4.0));
}

TEST_CASE("property: flagging is monotone in the threshold") {
    const auto metrics = random_metrics(13, 300);
    std::set<std::string> previous;
    for (double t = 1.05; t <= 4.0; t += 0.05) {
        const auto flags = flag_low_entropy(metrics, t);
        const std::set<std::string> now(flags.question_ids.begin(), flags.question_ids.end());
        CHECK(std::includes(now.begin(), now.end(), previous.begin(), previous.end()));
        previous = now;
    }
}

TEST_CASE("cross table") {
    const std::vector<CrossRun> single{{"RACE++", "RACE++", InputVariant::NoContext, 0.5732}};
    const auto one = cross_table(single);
    CHECK(one.eval_tags.size() == 1);
    CHECK(one.rows.size() == 1);
    CHECK(render_cross_table(one, TableFormat::Csv) == "train,input,RACE++\nRACE++,Q+{O},57.32\n");

    // Accuracies from the published cross-performance table.
    const std::vector<CrossRun> runs{
        {"RACE++", "RACE++", InputVariant::Full, 0.8501},     {"RACE++", "RACE++", InputVariant::NoContext, 0.5732},
        {"RACE++", "COSMOS", InputVariant::Full, 0.7005},     {"RACE++", "COSMOS", InputVariant::NoContext, 0.5404},
        {"RACE++", "RACE++", InputVariant::OptionsOnly, 0.4176}, {"COSMOS", "COSMOS", InputVariant::Full, 0.8449},
    };
    const auto table = cross_table(runs);
    CHECK(table.eval_tags == std::vector<std::string>{"RACE++", "COSMOS"});
    REQUIRE(table.rows.size() == 4);
    CHECK(table.rows[0].variant == InputVariant::OptionsOnly);
    CHECK(table.rows[1].variant == InputVariant::NoContext);
    CHECK(table.rows[2].variant == InputVariant::Full);
    CHECK(table.rows[3].train == "COSMOS");
    const auto csv = render_cross_table(table, TableFormat::Csv);
    CHECK(csv.find("RACE++,Q+{O},57.32,54.04") != std::string::npos);
    CHECK(csv.find("RACE++,{O},41.76,--") != std::string::npos);
    CHECK(csv.find("COSMOS,Q+{O}+C,--,84.49") != std::string::npos);
    const auto md = render_cross_table(table, TableFormat::Markdown);
    CHECK(md.find("| 57.32") != std::string::npos);

    auto dup = runs;
    dup.push_back(runs.front());
    CHECK(kind_of([&] { cross_table(dup); }) == ErrorKind::DuplicateCell);
}
