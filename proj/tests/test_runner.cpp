#include <doctest.h>

#include <fstream>
#include <set>

#include "docspace/error.hpp"
#include "docspace/random.hpp"
#include "docspace/runner.hpp"
#include "docspace/text_io.hpp"
#include "oracles.hpp"

using namespace docspace;

namespace {

LayoutConfig make(TopicModel tm, Toggle tfidf, Reduction dr, Toggle lincomb) {
    LayoutConfig c;
    c.dataset = "d";
    c.tm = tm;
    c.tfidf = tfidf;
    c.dr.method = dr;
    c.lincomb = lincomb;
    if (tm == TopicModel::LSI || tm == TopicModel::NMF || tm == TopicModel::LDA) c.topics = 4;
    return c;
}

std::map<Reduction, int> count_by_dr(const std::vector<LayoutConfig>& configs) {
    std::map<Reduction, int> n;
    for (const auto& c : configs) n[c.dr.method]++;
    return n;
}

std::map<std::string, Dataset> small_corpus() {
    SyntheticCorpusParams p;
    p.docs_per_class = 10;
    auto corpus = generate_synthetic_corpus(p);
    corpus.name = "syn";
    std::map<std::string, Dataset> out;
    out.emplace("syn", Dataset{corpus, std::nullopt});
    return out;
}

}  // namespace

TEST_SUITE("runner") {
    TEST_CASE("layout quadruples") {
        CHECK(encode_config_id(make(TopicModel::LSI, Toggle::On, Reduction::TSNE, Toggle::Off)) == "(LSI,+,t-SNE,-)");
        CHECK(encode_config_id(make(TopicModel::VSM, Toggle::On, Reduction::TSNE, Toggle::NotApplicable)) ==
              "(VSM,+,t-SNE,X)");
        CHECK(encode_config_id(make(TopicModel::LDA, Toggle::NotApplicable, Reduction::TSNE, Toggle::On)) ==
              "(LDA,X,t-SNE,+)");
    }

    TEST_CASE("config invariants") {
        CHECK(is_valid(make(TopicModel::NMF, Toggle::Off, Reduction::UMAP, Toggle::On)));
        CHECK_FALSE(is_valid(make(TopicModel::LDA, Toggle::On, Reduction::TSNE, Toggle::On)));
        CHECK_FALSE(is_valid(make(TopicModel::VSM, Toggle::On, Reduction::TSNE, Toggle::On)));
        CHECK_FALSE(is_valid(make(TopicModel::EXT, Toggle::NotApplicable, Reduction::TSNE, Toggle::Off)));
        CHECK(is_valid(make(TopicModel::EXT, Toggle::NotApplicable, Reduction::SOM, Toggle::NotApplicable)));
        auto c = make(TopicModel::LSI, Toggle::On, Reduction::MDS, Toggle::Off);
        c.topics.reset();
        CHECK_FALSE(is_valid(c));
    }

    TEST_CASE("default grid cell sizes") {
        const DrGrid g;
        CHECK(g.tsne_learning_rate.size() * g.tsne_n_iter.size() * g.tsne_perplexity.size() == 500);
        CHECK(g.umap_min_dist.size() * g.umap_n_neighbors.size() == 132);
        CHECK(g.som_m.size() * g.som_n.size() == 121);
        CHECK(g.mds_max_iter.size() == 31);
        CHECK(g.mds_max_iter.front() == 300);
        CHECK(g.mds_max_iter.back() == 900);

        ExpandOptions o;
        o.tfidf = {Toggle::On};
        o.lincomb = {Toggle::Off};
        o.default_topics = 5;
        const auto n = count_by_dr(expand_grid({"a"}, {TopicModel::LSI}, o));
        CHECK(n.at(Reduction::TSNE) == 500);
        CHECK(n.at(Reduction::UMAP) == 132);
        CHECK(n.at(Reduction::SOM) == 121);
        CHECK(n.at(Reduction::MDS) == 31);
    }

    TEST_CASE("grid expansion filters invalid toggles") {
        ExpandOptions o;
        o.drs = {Reduction::MDS};
        CHECK(expand_grid({"a"}, {TopicModel::VSM}, o).size() == 62);

        o.default_topics = 4;
        // Cells: VSM 2x1, LSI 2x2, NMF 2x2, LDA 1x2, EXT 1x1.
        const auto all = expand_grid({"a", "b"}, {TopicModel::VSM, TopicModel::LSI, TopicModel::NMF, TopicModel::LDA,
                                                  TopicModel::EXT},
                                     o);
        CHECK(all.size() == 2u * (2 + 4 + 4 + 2 + 1) * 31);

        o.tfidf = {Toggle::On};
        CHECK_THROWS_AS(expand_grid({"a"}, {TopicModel::LDA}, o), Error);
        o.tfidf = {Toggle::On, Toggle::Off, Toggle::NotApplicable};
        o.default_topics = 0;
        CHECK_THROWS_AS(expand_grid({"a"}, {TopicModel::LSI}, o), Error);
        CHECK_THROWS_AS(expand_grid({}, {TopicModel::VSM}, o), Error);
    }

    TEST_CASE("grid order is shuffled by the global seed and seeds derive from identity") {
        ExpandOptions o;
        o.drs = {Reduction::MDS, Reduction::UMAP};
        o.global_seed = 3;
        const auto a = expand_grid({"a"}, {TopicModel::VSM}, o);
        const auto b = expand_grid({"a"}, {TopicModel::VSM}, o);
        std::vector<std::string> ka, kb;
        for (const auto& c : a) ka.push_back(identity_key(c));
        for (const auto& c : b) kb.push_back(identity_key(c));
        CHECK(ka == kb);
        CHECK_FALSE(std::is_sorted(a.begin(), a.end(), identity_less));
        std::set<std::string> unique(ka.begin(), ka.end());
        CHECK(unique.size() == ka.size());
        for (const auto& c : a) CHECK(c.dr.seed == derive_seed(3, identity_key(c)));

        o.global_seed = 4;
        const auto other = expand_grid({"a"}, {TopicModel::VSM}, o);
        CHECK(identity_key(other.front()) != identity_key(a.front()));

        o.include_tsne_default = true;
        o.drs = {Reduction::TSNE};
        const auto with_default = expand_grid({"a"}, {TopicModel::VSM}, o);
        CHECK(with_default.size() == 2u * 501);
        CHECK(std::count_if(with_default.begin(), with_default.end(),
                            [](const LayoutConfig& c) { return !c.dr.tsne.learning_rate; }) == 2);
    }

    TEST_CASE("result rows round trip") {
        auto c = make(TopicModel::LSI, Toggle::On, Reduction::TSNE, Toggle::Off);
        c.dr.tsne = {25.0, 129, std::nullopt};
        c.dr.seed = 18446744073709551615ull;
        QualityRecord r;
        r.config = c;
        r.metrics = MetricVector{0.9, 0.8, 0.7, 0.6, 0.5, -0.25, 123.5, std::numeric_limits<double>::infinity(), 7};
        r.runtime_s = 0.125;
        const auto line = format_record(r);
        CHECK(line.find(",auto,") != std::string::npos);
        const auto back = parse_record(line);
        CHECK(format_record(back) == line);
        CHECK(std::isinf(back.metrics->db_raw));
        CHECK(back.config.dr.seed == c.dr.seed);

        QualityRecord failed;
        failed.config = make(TopicModel::VSM, Toggle::Off, Reduction::SOM, Toggle::NotApplicable);
        failed.status = "failed:timeout";
        const auto fline = format_record(failed);
        CHECK(text::split(fline, ',').size() == text::split(kResultsHeader, ',').size());
        const auto fback = parse_record(fline);
        CHECK_FALSE(fback.metrics.has_value());
        CHECK(fback.status == "failed:timeout");
        CHECK(fline.find(",10,10,,10,") != std::string::npos);

        const auto dir = oracle::scratch_dir("results_io");
        write_results_csv({r, failed}, dir / "r.csv");
        std::ofstream(dir / "r.csv", std::ios::app) << "d,LSI,+,4,t-SNE";
        CHECK_THROWS_AS(read_results_csv(dir / "r.csv"), Error);
        CHECK(read_results_csv(dir / "r.csv", true).size() == 2);
    }

    TEST_CASE("benchmark isolates failures and normalizes the table") {
        const auto corpora = small_corpus();
        std::vector<LayoutConfig> configs;
        auto ok = make(TopicModel::VSM, Toggle::On, Reduction::MDS, Toggle::NotApplicable);
        ok.dataset = "syn";
        auto bad = make(TopicModel::VSM, Toggle::On, Reduction::TSNE, Toggle::NotApplicable);
        bad.dataset = "syn";
        bad.dr.tsne.perplexity = 30;  // m = 30
        configs = {bad, ok};
        RunOptions opts;
        opts.out = oracle::scratch_dir("bench") / "r.csv";
        opts.resume = false;
        const auto table = run_benchmark(corpora, configs, opts);
        REQUIRE(table.size() == 2);
        CHECK(table[0].config.dr.method == Reduction::TSNE);
        CHECK(table[0].status == "failed:perplexity-infeasible");
        CHECK_FALSE(table[0].metrics.has_value());
        CHECK(table[1].ok());
        CHECK(table[1].runtime_s.has_value());
        CHECK(read_results_csv(opts.out).size() == 2);

        auto missing = ok;
        missing.dataset = "nope";
        try {
            run_benchmark(corpora, {missing}, opts);
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::UnknownDataset);
        }
    }

    TEST_CASE("timeouts and memory ceilings become failed rows") {
        const auto corpora = small_corpus();
        auto c = make(TopicModel::VSM, Toggle::On, Reduction::TSNE, Toggle::NotApplicable);
        c.dataset = "syn";
        c.dr.tsne.perplexity = 5;
        RunOptions opts;
        opts.out = oracle::scratch_dir("limits") / "r.csv";
        opts.resume = false;
        opts.job_timeout_s = 1e-9;
        CHECK(run_benchmark(corpora, {c}, opts).front().status == "failed:timeout");
        opts.job_timeout_s.reset();
        opts.memory_limit_bytes = 1024;
        CHECK(run_benchmark(corpora, {c}, opts).front().status == "failed:memory-limit");
    }

    TEST_CASE("resume skips completed rows and drops a torn line") {
        const auto corpora = small_corpus();
        ExpandOptions o;
        o.drs = {Reduction::MDS};
        o.grid.mds_max_iter = {300, 320, 340};
        o.tfidf = {Toggle::On, Toggle::Off};
        const auto configs = expand_grid({"syn"}, {TopicModel::VSM}, o);
        REQUIRE(configs.size() == 6);

        const auto dir = oracle::scratch_dir("resume");
        RunOptions opts;
        opts.record_runtime = false;
        opts.out = dir / "full.csv";
        const auto full = run_benchmark(corpora, configs, opts);
        const auto expected = text::read_file(opts.out);

        opts.out = dir / "partial.csv";
        opts.max_new_jobs = 4;
        CHECK(run_benchmark(corpora, configs, opts).size() == 4);
        std::ofstream(opts.out, std::ios::app) << "syn,VSM,+,,MDS";
        opts.max_new_jobs.reset();
        const auto resumed = run_benchmark(corpora, configs, opts);
        CHECK(resumed.size() == 6);
        CHECK(text::read_file(opts.out) == expected);

        opts.parallelism = 3;
        opts.out = dir / "parallel.csv";
        run_benchmark(corpora, configs, opts);
        CHECK(text::read_file(opts.out) == expected);
    }

    TEST_CASE("single layouts for every pipeline") {
        const auto corpora = small_corpus();
        const auto& dataset = corpora.at("syn");
        ModelParams model;
        for (TopicModel tm : {TopicModel::VSM, TopicModel::LSI, TopicModel::NMF, TopicModel::LDA}) {
            for (Toggle lincomb : {Toggle::On, Toggle::Off, Toggle::NotApplicable}) {
                const Toggle tfidf = tm == TopicModel::LDA ? Toggle::NotApplicable : Toggle::On;
                auto c = make(tm, tfidf, Reduction::MDS, lincomb);
                c.dataset = "syn";
                if (!is_valid(c)) continue;
                for (ReferenceSpace ref : {ReferenceSpace::TmSpace, ReferenceSpace::Vsm}) {
                    c.reference_space = ref;
                    const auto r = compute_layout(dataset, c, model, 1);
                    CHECK(r.layout.positions.rows() == 30);
                    CHECK(r.layout.config_ref == encode_config_id(c));
                    CHECK(r.metrics.nh >= 0.0);
                }
            }
        }
        auto tiny = make(TopicModel::LSI, Toggle::On, Reduction::TSNE, Toggle::On);
        tiny.dataset = "syn";
        tiny.topics = 3;
        CHECK_THROWS_AS(compute_layout(dataset, tiny, model, 1), Error);
        tiny.topics = 8;
        CHECK(compute_layout(dataset, tiny, model, 1).layout.positions.allFinite());
    }
}
