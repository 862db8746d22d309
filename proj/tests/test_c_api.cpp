#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "docspace/docspace.h"

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("docspace_capi_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ds_corpus* small_corpus(const char* name, int per_class = 12) {
    ds_synthetic_params p;
    ds_synthetic_params_default(&p);
    p.docs_per_class = per_class;
    ds_corpus* c = nullptr;
    REQUIRE(ds_corpus_synthetic(&p, &c) == DS_OK);
    REQUIRE(ds_corpus_set_name(c, name) == DS_OK);
    return c;
}

}  // namespace

TEST_CASE("status names and errors") {
    CHECK(std::strlen(ds_version()) > 0);
    CHECK(std::string(ds_status_name(DS_OK)) == "ok");
    CHECK(std::string(ds_status_name(DS_ERR_PERPLEXITY_INFEASIBLE)) == "perplexity-infeasible");

    ds_corpus* c = nullptr;
    CHECK(ds_corpus_load_dtm("/nonexistent/docspace", &c) == DS_ERR_IO);
    CHECK(c == nullptr);
    CHECK(std::strlen(ds_last_error()) > 0);
    CHECK(ds_corpus_load_dtm(nullptr, &c) == DS_ERR_INVALID_ARGUMENT);
    CHECK(ds_corpus_synthetic(nullptr, &c) == DS_ERR_INVALID_ARGUMENT);

    double p = 0, lo = 0;
    CHECK(ds_sign_test(3, 3, 0.99, &p, &lo) == DS_OK);
    CHECK(std::string(ds_last_error()).empty());
    CHECK(p == 0.125);
    CHECK(ds_sign_test(3, 5, 0.99, &p, &lo) != DS_OK);
    CHECK(ds_sign_test(14172, 10936, 0.99, &p, nullptr) == DS_OK);
    CHECK(p < 0.005);
}

TEST_CASE("corpus handles") {
    ds_corpus* c = small_corpus("syn");
    CHECK(ds_corpus_num_docs(c) == 36);
    CHECK(ds_corpus_num_classes(c) == 3);
    CHECK(ds_corpus_num_terms(c) == 60);
    CHECK(std::string(ds_corpus_name(c)) == "syn");

    const auto dir = scratch("dtm");
    REQUIRE(ds_corpus_write_dtm(c, dir.string().c_str()) == DS_OK);
    ds_corpus* back = nullptr;
    REQUIRE(ds_corpus_load_dtm(dir.string().c_str(), &back) == DS_OK);
    CHECK(ds_corpus_num_docs(back) == 36);
    CHECK(ds_corpus_num_terms(back) == 60);
    ds_corpus_free(back);

    const auto tree = scratch("tree");
    fs::create_directories(tree / "a");
    fs::create_directories(tree / "b");
    std::ofstream(tree / "a" / "1.txt") << "apple banana apple";
    std::ofstream(tree / "a" / "2.txt") << "apple cherry";
    std::ofstream(tree / "b" / "1.txt") << "banana cherry";
    std::ofstream(tree / "b" / "2.txt") << "the of";
    ds_preprocess_options o;
    ds_preprocess_options_default(&o);
    o.min_df = 1;
    o.max_df_fraction = 1.0;
    size_t empty = 0;
    ds_corpus* t = nullptr;
    REQUIRE(ds_corpus_load_tree(tree.string().c_str(), &o, &t, &empty) == DS_OK);
    CHECK(ds_corpus_num_docs(t) == 4);
    CHECK(ds_corpus_num_classes(t) == 2);
    CHECK(empty == 1);
    ds_corpus_free(t);
    ds_corpus_free(c);
    ds_corpus_free(nullptr);
}

TEST_CASE("single layouts") {
    ds_corpus* c = small_corpus("syn");
    ds_layout_spec spec;
    ds_layout_spec_default(&spec);
    CHECK(std::string(spec.tm) == "VSM");
    CHECK(std::string(spec.dr) == "t-SNE");
    CHECK(spec.perplexity == 30.0);
    CHECK(spec.n_iter == 1000);

    spec.dr = "MDS";
    ds_layout* l = nullptr;
    REQUIRE(ds_layout_compute(c, &spec, &l) == DS_OK);
    CHECK(ds_layout_size(l) == 36);
    CHECK(std::string(ds_layout_config_id(l)) == "(VSM,+,MDS,X)");
    double x = NAN, y = NAN;
    CHECK(ds_layout_position(l, 0, &x, &y) == DS_OK);
    CHECK(std::isfinite(x));
    CHECK(ds_layout_position(l, 36, &x, &y) == DS_ERR_OUT_OF_RANGE);
    ds_metrics m;
    REQUIRE(ds_layout_get_metrics(l, &m) == DS_OK);
    CHECK(m.nh >= 0.9);
    CHECK(m.trust > 0.5);
    CHECK(m.trust <= 1.0);
    CHECK(ds_layout_is_degenerate(l) == 0);

    const auto dir = scratch("layout");
    const auto csv = (dir / "l.csv").string(), svg = (dir / "l.svg").string(), svg2 = (dir / "p.svg").string();
    CHECK(ds_layout_write_csv(l, csv.c_str()) == DS_OK);
    CHECK(ds_layout_write_svg(l, svg.c_str()) == DS_OK);
    CHECK(ds_plot_layout_csv(csv.c_str(), svg2.c_str()) == DS_OK);
    CHECK(slurp(csv).rfind("doc_id,x,y,label\n", 0) == 0);
    CHECK(slurp(svg).find("<circle") != std::string::npos);
    ds_layout_free(l);

    ds_layout* again = nullptr;
    REQUIRE(ds_layout_compute(c, &spec, &again) == DS_OK);
    double x2 = 0, y2 = 0;
    ds_layout_position(again, 0, &x2, &y2);
    CHECK(x2 == x);
    CHECK(y2 == y);
    ds_layout_free(again);

    spec.tm = "LSI";
    spec.topics = 3;
    spec.lincomb = "+";
    spec.dr = "t-SNE";
    l = nullptr;
    CHECK(ds_layout_compute(c, &spec, &l) == DS_ERR_PERPLEXITY_INFEASIBLE);
    CHECK(l == nullptr);
    CHECK(std::string(ds_last_error()).find("t-SNE") != std::string::npos);

    spec.lincomb = "-";
    spec.tfidf = "+";
    spec.perplexity = 5;
    REQUIRE(ds_layout_compute(c, &spec, &l) == DS_OK);
    CHECK(std::string(ds_layout_config_id(l)) == "(LSI,+,t-SNE,-)");
    ds_layout_free(l);

    spec.tm = "LDA";
    CHECK(ds_layout_compute(c, &spec, &l) == DS_ERR_INVALID_ARGUMENT);
    spec.tm = "bogus";
    CHECK(ds_layout_compute(c, &spec, &l) == DS_ERR_INVALID_ARGUMENT);
    CHECK(ds_layout_compute(nullptr, &spec, &l) == DS_ERR_INVALID_ARGUMENT);
    ds_corpus_free(c);
}

TEST_CASE("grid and analysis") {
    ds_corpus* a = small_corpus("a");
    ds_corpus* b = small_corpus("b", 10);
    const ds_corpus* both[] = {a, b};
    ds_grid_options o;
    ds_grid_options_default(&o);
    o.tms = "VSM";
    o.drs = "MDS";
    o.tfidf = "+,-";
    size_t n = 0;
    REQUIRE(ds_grid_count(both, 2, &o, &n) == DS_OK);
    CHECK(n == 2 * 2 * 31);

    o.drs = "t-SNE";
    o.tfidf = "+";
    REQUIRE(ds_grid_count(both, 1, &o, &n) == DS_OK);
    CHECK(n == 500);
    o.include_defaults = 1;
    REQUIRE(ds_grid_count(both, 1, &o, &n) == DS_OK);
    CHECK(n == 501);

    const auto dir = scratch("grid");
    const auto out = (dir / "results.csv").string();
    o.drs = "MDS";
    o.tfidf = "+,-";
    o.include_defaults = 0;
    o.out = out.c_str();
    o.resume = 0;
    o.record_runtime = 0;
    size_t rows = 0;
    REQUIRE(ds_grid_run(both, 1, &o, &rows) == DS_OK);
    CHECK(rows == 62);
    const std::string first = slurp(out);
    o.parallelism = 3;
    REQUIRE(ds_grid_run(both, 1, &o, &rows) == DS_OK);
    CHECK(slurp(out) == first);

    const auto report = (dir / "report").string();
    REQUIRE(ds_analyze(out.c_str(), report.c_str(), 0.8, 1) == DS_OK);
    CHECK(fs::exists(dir / "report" / "best.csv"));
    CHECK(slurp(dir / "report" / "correlations.csv").rfind("# correlation=spearman", 0) == 0);
    CHECK(std::string(ds_analysis_notes()).find("lincomb") != std::string::npos);
    CHECK(ds_analyze("/nonexistent/results.csv", report.c_str(), 0.8, 0) == DS_ERR_IO);

    const ds_corpus* dup[] = {a, a};
    CHECK(ds_grid_count(dup, 2, &o, &n) == DS_ERR_INVALID_ARGUMENT);
    o.tms = "nope";
    CHECK(ds_grid_count(both, 2, &o, &n) == DS_ERR_INVALID_ARGUMENT);
    ds_corpus_free(a);
    ds_corpus_free(b);
}
