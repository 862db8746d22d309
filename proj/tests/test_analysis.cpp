#include <doctest.h>

#include <regex>

#include "docspace/analysis.hpp"
#include "docspace/error.hpp"
#include "docspace/random.hpp"
#include "docspace/text_io.hpp"
#include "oracles.hpp"

using namespace docspace;

namespace {

QualityRecord record(const std::string& dataset, double ch, double db, Toggle tfidf = Toggle::On) {
    QualityRecord r;
    r.config.dataset = dataset;
    r.config.tm = TopicModel::VSM;
    r.config.tfidf = tfidf;
    r.config.dr.method = Reduction::MDS;
    r.metrics = MetricVector{0.9, 0.9, 0.5, 0.8, 0.7, 0.2, ch, db, 7};
    return r;
}

AggregatedRecord scored(const std::string& dataset, Reduction dr, double alpha, int variant = 0) {
    AggregatedRecord a;
    a.record = record(dataset, 1, 1);
    a.record.config.dr.method = dr;
    a.record.config.dr.mds.max_iter = 300 + 20 * variant;
    a.record.config.dr.tsne.perplexity = 30 + 5 * variant;
    a.alpha = a.beta = alpha;
    return a;
}

std::size_t count(const std::string& s, const std::string& what) {
    std::size_t n = 0;
    for (auto p = s.find(what); p != std::string::npos; p = s.find(what, p + 1)) ++n;
    return n;
}

}  // namespace

TEST_SUITE("analysis") {
    TEST_CASE("aggregate formulas") {
        CHECK(aggregate_alpha(1, 1, 1, 1) == 1.0);
        CHECK(aggregate_alpha(1, 1, 1, 0) == 0.5);
        CHECK(aggregate_alpha(0, 0, -1, 0) == 0.0);
        CHECK(aggregate_beta(0, 1, 1, 1) == 1.0);
        CHECK(aggregate_beta(1, 0, -1, 0) == 0.0);
        CHECK(aggregate_beta(0.5, 0.5, 0, 0.5) == doctest::Approx(0.5).epsilon(1e-15));
    }

    TEST_CASE("aggregates are monotone in every argument") {
        const std::vector<double> unit{0.0, 0.25, 0.5, 0.75, 1.0};
        const std::vector<double> signed_unit{-1.0, -0.5, 0.0, 0.5, 1.0};
        const double h = 0.01;
        for (double a : unit)
            for (double b : unit)
                for (double s : signed_unit)
                    for (double d : unit) {
                        const double alpha = aggregate_alpha(a, b, s, d);
                        if (a + h <= 1) CHECK(aggregate_alpha(a + h, b, s, d) >= alpha);
                        if (b + h <= 1) CHECK(aggregate_alpha(a, b + h, s, d) >= alpha);
                        if (s + h <= 1) CHECK(aggregate_alpha(a, b, s + h, d) >= alpha);
                        if (d + h <= 1) CHECK(aggregate_alpha(a, b, s, d + h) >= alpha);
                        const double beta = aggregate_beta(a, b, s, d);
                        if (a + h <= 1) CHECK(aggregate_beta(a + h, b, s, d) <= beta);
                        if (b + h <= 1) CHECK(aggregate_beta(a, b + h, s, d) >= beta);
                        if (s + h <= 1) CHECK(aggregate_beta(a, b, s + h, d) >= beta);
                        if (d + h <= 1) CHECK(aggregate_beta(a, b, s, d + h) >= beta);
                    }
    }

    TEST_CASE("group normalization") {
        auto rows = normalize_group_metrics({record("x", 2, 0), record("x", 4, 5)});
        CHECK(rows[0].beta_ch == 0.5);
        CHECK(rows[1].beta_ch == 1.0);
        CHECK(rows[0].beta_db == 0.0);
        CHECK(rows[1].beta_db == 1.0);

        rows = normalize_group_metrics({record("solo", 3, 2)});
        CHECK(rows[0].beta_ch == 1.0);
        CHECK(rows[0].beta_db == 1.0);

        const double inf = std::numeric_limits<double>::infinity();
        rows = normalize_group_metrics({record("y", 1, inf), record("y", 2, 4), record("y", 3, 2),
                                        record("y", 9, 9, Toggle::Off)});
        CHECK(rows[0].beta_db == 1.0);
        CHECK(rows[1].beta_db == 1.0);
        CHECK(rows[2].beta_db == 0.5);
        CHECK(rows[2].beta_ch == 1.0);
        CHECK(rows[3].beta_ch == 1.0);

        auto failed = record("x", 1, 1);
        failed.status = "failed:timeout";
        failed.metrics.reset();
        CHECK(normalize_group_metrics({failed, record("x", 1, 1)}).size() == 1);
        CHECK_THROWS_AS(normalize_group_metrics({record("z", inf, inf)}), Error);
    }

    TEST_CASE("normalization keeps the within-group argmax") {
        Rng rng(5);
        std::vector<QualityRecord> rows;
        for (int i = 0; i < 30; ++i) rows.push_back(record(i % 2 ? "a" : "b", rng.uniform(1, 50), rng.uniform(0, 3)));
        const auto agg = normalize_group_metrics(rows);
        for (const std::string g : {"a", "b"}) {
            std::size_t raw_ch = 0, raw_db = 0, n_ch = 0, n_db = 0;
            bool first = true;
            for (std::size_t i = 0; i < agg.size(); ++i) {
                if (agg[i].record.config.dataset != g) continue;
                if (first) raw_ch = raw_db = n_ch = n_db = i;
                first = false;
                if (agg[i].record.metrics->ch_raw > agg[raw_ch].record.metrics->ch_raw) raw_ch = i;
                if (agg[i].record.metrics->db_raw > agg[raw_db].record.metrics->db_raw) raw_db = i;
                if (agg[i].beta_ch > agg[n_ch].beta_ch) n_ch = i;
                if (agg[i].beta_db > agg[n_db].beta_db) n_db = i;
            }
            CHECK(raw_ch == n_ch);
            CHECK(raw_db == n_db);
            CHECK(agg[n_ch].beta_ch == 1.0);
        }
    }

    TEST_CASE("correlation groups") {
        Rng rng(17);
        const int rows = 400;
        Eigen::MatrixXd cols(rows, 8);
        for (int i = 0; i < rows; ++i) {
            const double s = rng.uniform(-1, 1);
            cols.row(i) << 0.5 * (s + 1), 0.5 * (s + 1), s, rng.uniform(), rng.uniform(), rng.uniform(-1, 1),
                rng.uniform(), rng.uniform();
        }
        const auto rep = metric_correlations(cols);
        CHECK(rep.matrix(0, 1) == doctest::Approx(1.0));
        CHECK(rep.matrix(0, 2) == doctest::Approx(1.0));
        CHECK(rep.group[0] == rep.group[1]);
        CHECK(rep.group[0] == rep.group[2]);
        std::set<int> others;
        for (int c = 3; c < 8; ++c) others.insert(rep.group[static_cast<std::size_t>(c)]);
        CHECK(others.size() == 5);
        CHECK(others.count(rep.group[0]) == 0);

        cols.col(4) = -cols.col(3);
        cols.col(7).setConstant(0.25);
        const auto neg = metric_correlations(cols, 0.8, CorrelationType::Spearman);
        CHECK(neg.matrix(3, 4) == doctest::Approx(-1.0));
        CHECK(neg.group[3] != neg.group[4]);
        CHECK(std::isnan(neg.matrix(7, 0)));
        CHECK(neg.group[7] == -1);

        std::vector<double> x{1, 2, 3, 4}, y{1, 4, 9, 16};
        CHECK(spearman(x, y) == doctest::Approx(1.0));
        CHECK(pearson(x, y) == doctest::Approx(oracle::pearson(x, y)).epsilon(1e-12));
    }

    TEST_CASE("exact sign test") {
        CHECK(binomial_sign_test(3, 3).p_value == 0.125);
        CHECK(binomial_sign_test(4, 2).p_value == doctest::Approx(0.6875).epsilon(1e-14));
        CHECK(binomial_sign_test(9, 0).p_value == 1.0);
        for (std::int64_t n : {1, 5, 20, 60}) CHECK(binomial_sign_test(n, n).p_value == std::ldexp(1.0, static_cast<int>(-n)));

        Rng rng(3);
        for (int trial = 0; trial < 30; ++trial) {
            const auto n = static_cast<std::int64_t>(1 + rng.below(400));
            const auto k = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n) + 1));
            const auto t = binomial_sign_test(n, k);
            CHECK(t.p_value == doctest::Approx(oracle::binomial_upper_tail(n, k, 0.5)).epsilon(1e-9));
            CHECK(std::abs(t.conf_lower - oracle::clopper_pearson_lower(n, k, 0.99)) < 1e-9);
        }

        const auto paper = binomial_sign_test(14172, 10936);
        CHECK(paper.p_value < 0.005);
        CHECK(paper.conf_lower >= 0.75);
        CHECK(paper.conf_lower <= 0.77);
        CHECK_THROWS_AS(binomial_sign_test(3, 4), Error);
    }

    TEST_CASE("paired sign test") {
        std::vector<AggregatedRecord> rows;
        auto add = [&](const std::string& ds, int variant, Toggle tfidf, double alpha) {
            auto a = scored(ds, Reduction::MDS, alpha, variant);
            a.record.config.tfidf = tfidf;
            a.record.config.dr.seed = static_cast<std::uint64_t>(rows.size());
            rows.push_back(a);
        };
        add("a", 0, Toggle::On, 0.9);
        add("a", 0, Toggle::Off, 0.5);
        add("a", 1, Toggle::On, 0.5);
        add("a", 1, Toggle::Off, 0.5);
        add("b", 0, Toggle::On, 0.7);
        add("b", 0, Toggle::Off, 0.6);
        add("b", 1, Toggle::On, 0.7);  // unmatched
        const auto t = paired_sign_test(rows, ToggleColumn::Tfidf, Score::Alpha);
        REQUIRE(t.size() == 3);
        CHECK(t[0].dataset == "a");
        CHECK(t[0].n == 2);
        CHECK(t[0].k == 1);
        CHECK(t[1].dataset == "b");
        CHECK(t[1].n == 1);
        CHECK(t[1].k == 1);
        CHECK(t[2].dataset == "Total");
        CHECK(t[2].n == 3);
        CHECK(t[2].k == 2);
        CHECK(t[2].test.p_value == 0.5);
        CHECK_THROWS_AS(paired_sign_test(rows, ToggleColumn::Lincomb, Score::Alpha), Error);
    }

    TEST_CASE("best results") {
        CHECK(best_results({scored("d", Reduction::MDS, 0.42)}, Score::Alpha).front().config_ids ==
              std::vector<std::string>{"(VSM,+,MDS,X)"});
        const auto tie = best_results({scored("d", Reduction::MDS, 0.791), scored("d", Reduction::TSNE, 0.794)}, Score::Alpha);
        CHECK(tie.front().value == 0.79);
        CHECK(tie.front().config_ids.size() == 2);
        const auto strict = best_results({scored("d", Reduction::MDS, 0.5), scored("d", Reduction::TSNE, 0.7)}, Score::Beta);
        CHECK(strict.front().config_ids == std::vector<std::string>{"(VSM,+,t-SNE,X)"});
    }

    TEST_CASE("five-number summaries") {
        const auto a = five_number_summary({5, 3, 1, 4, 2});
        CHECK(a.min == 1);
        CHECK(a.q1 == 2);
        CHECK(a.median == 3);
        CHECK(a.q3 == 4);
        CHECK(a.max == 5);
        const auto one = five_number_summary({0.4});
        CHECK((one.min == 0.4 && one.q1 == 0.4 && one.median == 0.4 && one.q3 == 0.4 && one.max == 0.4));
        const auto b = five_number_summary({4, 1, 3, 2});
        CHECK(b.q1 == 1.75);
        CHECK(b.median == 2.5);
        CHECK(b.q3 == 3.25);

        std::vector<AggregatedRecord> rows;
        for (int i = 0; i < 9; ++i) rows.push_back(scored("d", i % 2 ? Reduction::MDS : Reduction::TSNE, 0.1 * i, i));
        auto shuffled = rows;
        Rng(2).shuffle(shuffled.begin(), shuffled.end());
        const auto s1 = five_number_summaries(rows, Score::Alpha);
        const auto s2 = five_number_summaries(shuffled, Score::Alpha);
        REQUIRE(s1.size() == 2);
        for (std::size_t g = 0; g < 2; ++g) {
            CHECK(s1[g].config_id == s2[g].config_id);
            CHECK(s1[g].summary.median == s2[g].summary.median);
            CHECK(s1[g].summary.q1 == s2[g].summary.q1);
        }
    }

    TEST_CASE("default percentiles") {
        std::vector<AggregatedRecord> rows;
        for (int v = 0; v < 10; ++v) rows.push_back(scored("d", Reduction::MDS, v == 0 ? 0.0 : 0.1 * v, v));
        auto p = default_percentiles(rows, Score::Alpha);
        REQUIRE(p.size() == 1);
        CHECK(p[0].fraction == doctest::Approx(0.9));

        rows[0].alpha = 5.0;
        CHECK(default_percentiles(rows, Score::Alpha)[0].fraction == 0.0);
        CHECK(default_percentiles({rows[0]}, Score::Alpha)[0].fraction == 0.0);

        auto shuffled = rows;
        Rng(8).shuffle(shuffled.begin(), shuffled.end());
        CHECK(default_percentiles(shuffled, Score::Alpha)[0].fraction == default_percentiles(rows, Score::Alpha)[0].fraction);

        std::vector<std::string> missing;
        CHECK(default_percentiles({rows[3]}, Score::Alpha, {}, &missing).empty());
        CHECK(missing.size() == 1);

        auto tsne = scored("d", Reduction::TSNE, 0.5);
        tsne.record.config.dr.tsne = {30, 1000, std::nullopt};
        CHECK(DefaultHyperparameters{}.matches(tsne.record.config.dr));
        tsne.record.config.dr.tsne.learning_rate = 250.0;
        CHECK_FALSE(DefaultHyperparameters{}.matches(tsne.record.config.dr));
    }

    TEST_CASE("SVG export") {
        Positions three(3, 2);
        three << 0, 0, 1, 2, 3, 1;
        const auto svg = layout_svg(three, {"a", "b", "a"});
        CHECK(count(svg, "<circle") == 3);
        CHECK(count(svg, "<text") == 2);
        CHECK(svg.find("viewBox=\"0 0 1000 1000\"") != std::string::npos);

        const auto same = layout_svg(Positions::Constant(4, 2, 7.0), {"a", "a", "a", "a"});
        CHECK(count(same, "cx=\"500.000\" cy=\"500.000\"") == 4);
        CHECK(count(same, "<text") == 1);

        std::regex circle("cx=\"([0-9.]+)\" cy=\"([0-9.]+)\"");
        for (auto it = std::sregex_iterator(svg.begin(), svg.end(), circle); it != std::sregex_iterator(); ++it) {
            const double cx = std::stod((*it)[1]), cy = std::stod((*it)[2]);
            CHECK((cx >= 50.0 && cx <= 950.0 && cy >= 50.0 && cy <= 950.0));
        }
        const auto dir = oracle::scratch_dir("svg");
        export_layout_svg(three, {"a", "b", "a"}, dir / "x.svg");
        CHECK(text::read_file(dir / "x.svg") == svg);
        CHECK_THROWS_AS(export_layout_svg(three, {"a", "b", "a"}, dir / "missing" / "x.svg"), Error);
    }

    TEST_CASE("report bundle") {
        std::vector<QualityRecord> rows;
        Rng rng(4);
        for (int v = 0; v < 12; ++v) {
            for (Toggle t : {Toggle::On, Toggle::Off}) {
                auto r = record("d", rng.uniform(1, 10), rng.uniform(0.1, 2), t);
                r.config.dr.mds.max_iter = 300 + 20 * v;
                r.metrics->trust = rng.uniform();
                r.metrics->nh = rng.uniform();
                r.metrics->shepard = rng.uniform(-1, 1);
                r.metrics->silhouette = rng.uniform(-1, 1);
                rows.push_back(r);
            }
        }
        const auto dir = oracle::scratch_dir("report");
        const auto notes = write_analysis_report(rows, dir);
        for (const char* f : {"aggregated.csv", "correlations.csv", "sign_tests.csv", "best.csv", "summaries.csv",
                              "default_percentiles.csv"}) {
            CHECK(std::filesystem::exists(dir / f));
        }
        CHECK(text::lines(text::read_file(dir / "aggregated.csv")).size() == 25);
        CHECK(text::read_file(dir / "correlations.csv").rfind("# correlation=pearson threshold=0.8\n", 0) == 0);
        const auto signs = text::lines(text::read_file(dir / "sign_tests.csv"));
        CHECK(signs.size() == 3);
        CHECK(signs[2].rfind("tfidf,Total,12,", 0) == 0);
        CHECK(notes.size() == 1);  // no lincomb pairs for VSM
    }
}
