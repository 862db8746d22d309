#include "docspace/docspace.h"

#include <new>
#include <set>
#include <string>

#include "docspace/analysis.hpp"
#include "docspace/corpus.hpp"
#include "docspace/error.hpp"
#include "docspace/runner.hpp"
#include "docspace/text_io.hpp"

using namespace docspace;

struct ds_corpus {
    Corpus corpus;
};

struct ds_layout {
    Layout layout;
    MetricVector metrics;
    std::vector<std::string> doc_ids;
    std::vector<std::string> labels;
};

namespace {

static_assert(static_cast<int>(ErrorCode::UnknownDataset) == DS_ERR_UNKNOWN_DATASET);
static_assert(static_cast<int>(ErrorCode::PerplexityInfeasible) == DS_ERR_PERPLEXITY_INFEASIBLE);

thread_local std::string last_error;
thread_local std::string last_notes;

template <typename F>
ds_status guarded(F&& body) {
    try {
        body();
        last_error.clear();
        return DS_OK;
    } catch (const Error& e) {
        last_error = e.what();
        return static_cast<ds_status>(e.code());
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return DS_ERR_MEMORY_LIMIT;
    } catch (const std::exception& e) {
        last_error = e.what();
        return DS_ERR_INTERNAL;
    }
}

void need(const void* p, const char* what) {
    require(p != nullptr, ErrorCode::InvalidArgument, std::string(what) + " is null");
}

std::string str(const char* s) { return s ? std::string(s) : std::string(); }

std::vector<std::string_view> list(const char* s) {
    std::vector<std::string_view> out;
    if (!s) return out;
    for (auto part : text::split(s, ',')) {
        if (!part.empty()) out.push_back(part);
    }
    return out;
}

LayoutConfig config_from(const ds_layout_spec& s, const std::string& dataset) {
    LayoutConfig c;
    c.dataset = dataset;
    c.tm = parse_topic_model(str(s.tm));
    c.tfidf = parse_toggle(str(s.tfidf));
    c.lincomb = parse_toggle(str(s.lincomb));
    if (c.tm == TopicModel::LSI || c.tm == TopicModel::NMF || c.tm == TopicModel::LDA) c.topics = s.topics;
    c.reference_space = parse_reference_space(s.reference_space ? s.reference_space : "tm-space");
    c.dr.method = parse_reduction(str(s.dr));
    c.dr.tsne.perplexity = s.perplexity;
    c.dr.tsne.n_iter = s.n_iter;
    if (s.learning_rate > 0.0) c.dr.tsne.learning_rate = s.learning_rate;
    c.dr.umap = {s.n_neighbors, s.min_dist, s.umap_epochs};
    c.dr.mds.max_iter = s.max_iter;
    c.dr.som = {s.grid_m, s.grid_n, s.som_epochs};
    c.dr.seed = s.seed;
    validate(c);
    return c;
}

std::map<std::string, Dataset> datasets_from(const ds_corpus* const* corpora, size_t count) {
    require(corpora != nullptr && count > 0, ErrorCode::InvalidArgument, "no corpora given");
    std::map<std::string, Dataset> out;
    for (size_t i = 0; i < count; ++i) {
        need(corpora[i], "corpus");
        const auto& c = corpora[i]->corpus;
        require(!c.name.empty(), ErrorCode::InvalidArgument, "corpus without a name");
        require(out.emplace(c.name, Dataset{c, std::nullopt}).second, ErrorCode::InvalidArgument,
                "duplicate corpus name '" + c.name + "'");
    }
    return out;
}

std::vector<LayoutConfig> expand_from(const std::map<std::string, Dataset>& datasets, const ds_grid_options& o) {
    std::vector<std::string> names;
    for (const auto& [name, _] : datasets) names.push_back(name);
    std::vector<TopicModel> tms;
    for (auto t : list(o.tms)) tms.push_back(parse_topic_model(t));
    ExpandOptions e;
    e.drs.clear();
    for (auto d : list(o.drs)) e.drs.push_back(parse_reduction(d));
    require(!e.drs.empty(), ErrorCode::InvalidArgument, "no reductions given");
    if (o.tfidf) {
        e.tfidf.clear();
        for (auto t : list(o.tfidf)) e.tfidf.push_back(parse_toggle(t));
    }
    if (o.lincomb) {
        e.lincomb.clear();
        for (auto t : list(o.lincomb)) e.lincomb.push_back(parse_toggle(t));
    }
    e.default_topics = o.topics;
    e.reference_space = parse_reference_space(o.reference_space ? o.reference_space : "tm-space");
    e.global_seed = o.global_seed;
    e.include_tsne_default = o.include_defaults != 0;
    return expand_grid(names, tms, e);
}

}  // namespace

extern "C" {

const char* ds_version(void) { return "1.0.0"; }

const char* ds_status_name(ds_status status) {
    if (status == DS_OK) return "ok";
    if (status == DS_ERR_INTERNAL) return "internal";
    if (status >= DS_ERR_INVALID_ARGUMENT && status <= DS_ERR_UNKNOWN_DATASET) {
        return error_slug(static_cast<ErrorCode>(status)).data();
    }
    return "unknown";
}

const char* ds_last_error(void) { return last_error.c_str(); }

const char* ds_analysis_notes(void) { return last_notes.c_str(); }

void ds_preprocess_options_default(ds_preprocess_options* o) {
    if (!o) return;
    o->min_df = 1;
    o->max_df_fraction = 1.0;
    o->strip_suffixes = 0;
    o->use_stopwords = 1;
}

ds_status ds_corpus_load_dtm(const char* dir, ds_corpus** out) {
    return guarded([&] {
        need(dir, "dir");
        need(out, "out");
        *out = new ds_corpus{load_corpus(dir, CorpusFormat::DtmFiles)};
    });
}

ds_status ds_corpus_load_tree(const char* dir, const ds_preprocess_options* options, ds_corpus** out,
                              size_t* empty_docs) {
    return guarded([&] {
        need(dir, "dir");
        need(out, "out");
        PreprocessConfig config;
        if (options) {
            config.min_df = options->min_df;
            config.max_df_fraction = options->max_df_fraction;
            config.strip_suffixes = options->strip_suffixes != 0;
            if (!options->use_stopwords) config.stopwords.clear();
        }
        std::vector<std::string> empty;
        *out = new ds_corpus{load_corpus(dir, CorpusFormat::LabelDirectories, config, &empty)};
        if (empty_docs) *empty_docs = empty.size();
    });
}

void ds_synthetic_params_default(ds_synthetic_params* p) {
    if (!p) return;
    const SyntheticCorpusParams d;
    *p = {d.num_classes, d.docs_per_class, d.terms_per_class, d.noise, d.doc_length, d.seed};
}

ds_status ds_corpus_synthetic(const ds_synthetic_params* p, ds_corpus** out) {
    return guarded([&] {
        need(p, "params");
        need(out, "out");
        SyntheticCorpusParams params{p->num_classes, p->docs_per_class, p->terms_per_class,
                                     p->noise,       p->doc_length,     p->seed};
        *out = new ds_corpus{generate_synthetic_corpus(params)};
    });
}

ds_status ds_corpus_write_dtm(const ds_corpus* corpus, const char* dir) {
    return guarded([&] {
        need(corpus, "corpus");
        need(dir, "dir");
        write_dtm_files(corpus->corpus, dir);
    });
}

ds_status ds_corpus_set_name(ds_corpus* corpus, const char* name) {
    return guarded([&] {
        need(corpus, "corpus");
        need(name, "name");
        corpus->corpus.name = name;
    });
}

const char* ds_corpus_name(const ds_corpus* c) { return c ? c->corpus.name.c_str() : ""; }
size_t ds_corpus_num_docs(const ds_corpus* c) { return c ? c->corpus.num_docs() : 0; }
size_t ds_corpus_num_terms(const ds_corpus* c) { return c ? c->corpus.num_terms() : 0; }
size_t ds_corpus_num_classes(const ds_corpus* c) { return c ? c->corpus.num_classes() : 0; }
void ds_corpus_free(ds_corpus* c) { delete c; }

void ds_layout_spec_default(ds_layout_spec* s) {
    if (!s) return;
    const DRParams d;
    *s = ds_layout_spec{};
    s->tm = "VSM";
    s->tfidf = "+";
    s->topics = 0;
    s->dr = "t-SNE";
    s->lincomb = "X";
    s->reference_space = "tm-space";
    s->perplexity = d.tsne.perplexity;
    s->n_iter = d.tsne.n_iter;
    s->learning_rate = 0.0;
    s->n_neighbors = d.umap.n_neighbors;
    s->min_dist = d.umap.min_dist;
    s->umap_epochs = d.umap.n_epochs;
    s->max_iter = d.mds.max_iter;
    s->grid_m = d.som.grid_m;
    s->grid_n = d.som.grid_n;
    s->som_epochs = d.som.epochs;
    s->seed = 0;
    s->embedding_path = nullptr;
}

ds_status ds_layout_compute(const ds_corpus* corpus, const ds_layout_spec* spec, ds_layout** out) {
    return guarded([&] {
        need(corpus, "corpus");
        need(spec, "spec");
        need(out, "out");
        const auto& c = corpus->corpus;
        const auto config = config_from(*spec, c.name.empty() ? "corpus" : c.name);
        ModelParams model;
        if (spec->embedding_path) model.embedding_path = spec->embedding_path;
        const Dataset dataset{c, std::nullopt};
        auto result = compute_layout(dataset, config, model, topic_model_seed(spec->seed, config));
        auto* layout = new ds_layout{std::move(result.layout), result.metrics, c.doc_ids, {}};
        for (int l : c.labels) layout->labels.push_back(c.label_names[static_cast<std::size_t>(l)]);
        *out = layout;
    });
}

size_t ds_layout_size(const ds_layout* l) { return l ? static_cast<size_t>(l->layout.size()) : 0; }

ds_status ds_layout_position(const ds_layout* l, size_t index, double* x, double* y) {
    return guarded([&] {
        need(l, "layout");
        require(index < static_cast<size_t>(l->layout.size()), ErrorCode::OutOfRange, "index out of range");
        if (x) *x = l->layout.positions(static_cast<Eigen::Index>(index), 0);
        if (y) *y = l->layout.positions(static_cast<Eigen::Index>(index), 1);
    });
}

ds_status ds_layout_get_metrics(const ds_layout* l, ds_metrics* out) {
    return guarded([&] {
        need(l, "layout");
        need(out, "out");
        const auto& m = l->metrics;
        *out = {m.trust, m.cont, m.shepard, m.nh, m.dsc, m.silhouette, m.ch_raw, m.db_raw};
    });
}

const char* ds_layout_config_id(const ds_layout* l) { return l ? l->layout.config_ref.c_str() : ""; }
int ds_layout_is_degenerate(const ds_layout* l) { return l && l->layout.degenerate ? 1 : 0; }

ds_status ds_layout_write_csv(const ds_layout* l, const char* path) {
    return guarded([&] {
        need(l, "layout");
        need(path, "path");
        write_layout_csv(l->layout, l->doc_ids, l->labels, path);
    });
}

ds_status ds_layout_write_svg(const ds_layout* l, const char* path) {
    return guarded([&] {
        need(l, "layout");
        need(path, "path");
        export_layout_svg(l->layout.positions, l->labels, path);
    });
}

void ds_layout_free(ds_layout* l) { delete l; }

ds_status ds_plot_layout_csv(const char* csv_path, const char* svg_path) {
    return guarded([&] {
        need(csv_path, "csv_path");
        need(svg_path, "svg_path");
        const auto table = read_layout_csv(csv_path);
        export_layout_svg(table.layout.positions, table.labels, svg_path);
    });
}

void ds_grid_options_default(ds_grid_options* o) {
    if (!o) return;
    *o = ds_grid_options{};
    o->tms = "VSM";
    o->drs = "t-SNE,UMAP,MDS,SOM";
    o->tfidf = "+,-,X";
    o->lincomb = "+,-,X";
    o->topics = 0;
    o->reference_space = "tm-space";
    o->parallelism = 1;
    o->global_seed = 0;
    o->out = "results.csv";
    o->resume = 1;
    o->record_runtime = 1;
    o->include_defaults = 0;
    o->job_timeout_s = 0.0;
    o->memory_limit_mb = 0;
    o->max_new_jobs = 0;
}

ds_status ds_grid_count(const ds_corpus* const* corpora, size_t count, const ds_grid_options* options,
                        size_t* configs) {
    return guarded([&] {
        need(options, "options");
        need(configs, "configs");
        *configs = expand_from(datasets_from(corpora, count), *options).size();
    });
}

ds_status ds_grid_run(const ds_corpus* const* corpora, size_t count, const ds_grid_options* options, size_t* rows) {
    return guarded([&] {
        need(options, "options");
        need(options->out, "out");
        const auto datasets = datasets_from(corpora, count);
        const auto configs = expand_from(datasets, *options);
        RunOptions run;
        run.parallelism = options->parallelism;
        run.out = options->out;
        run.resume = options->resume != 0;
        run.record_runtime = options->record_runtime != 0;
        run.global_seed = options->global_seed;
        if (options->job_timeout_s > 0.0) run.job_timeout_s = options->job_timeout_s;
        if (options->memory_limit_mb > 0) run.memory_limit_bytes = options->memory_limit_mb * 1024 * 1024;
        if (options->max_new_jobs > 0) run.max_new_jobs = options->max_new_jobs;
        const auto table = run_benchmark(datasets, configs, run);
        if (rows) *rows = table.size();
    });
}

ds_status ds_analyze(const char* results_csv, const char* out_dir, double threshold, int use_spearman) {
    return guarded([&] {
        need(results_csv, "results_csv");
        need(out_dir, "out_dir");
        ReportOptions options;
        options.correlation_threshold = threshold;
        options.correlation = use_spearman ? CorrelationType::Spearman : CorrelationType::Pearson;
        const auto notes = write_analysis_report(read_results_csv(results_csv), out_dir, options);
        last_notes.clear();
        for (const auto& n : notes) last_notes += (last_notes.empty() ? "" : "\n") + n;
    });
}

ds_status ds_sign_test(int64_t n, int64_t k, double confidence, double* p_value, double* conf_lower) {
    return guarded([&] {
        const auto t = binomial_sign_test(n, k, confidence);
        if (p_value) *p_value = t.p_value;
        if (conf_lower) *conf_lower = t.conf_lower;
    });
}

}  // extern "C"
