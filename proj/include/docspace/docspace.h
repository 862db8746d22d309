/* C interface to the docspace library. All handles are opaque; every call that can fail
 * returns a ds_status and leaves a message retrievable with ds_last_error() on the
 * calling thread. */
#ifndef DOCSPACE_H
#define DOCSPACE_H

#include <stddef.h>
#include <stdint.h>

#if defined(DOCSPACE_BUILDING_LIBRARY)
#define DS_API __attribute__((visibility("default")))
#else
#define DS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ds_status {
    DS_OK = 0,
    DS_ERR_INVALID_ARGUMENT = 1,
    DS_ERR_IO = 2,
    DS_ERR_PARSE = 3,
    DS_ERR_DIMENSION_MISMATCH = 4,
    DS_ERR_EMPTY_CORPUS = 5,
    DS_ERR_EMPTY_VOCABULARY = 6,
    DS_ERR_ZERO_COLUMN = 7,
    DS_ERR_OUT_OF_RANGE = 8,
    DS_ERR_PERPLEXITY_INFEASIBLE = 9,
    DS_ERR_ZERO_VARIANCE = 10,
    DS_ERR_ZERO_NORM = 11,
    DS_ERR_DEGENERATE = 12,
    DS_ERR_NOT_CONVERGED = 13,
    DS_ERR_TIMEOUT = 14,
    DS_ERR_MEMORY_LIMIT = 15,
    DS_ERR_NO_PAIRS = 16,
    DS_ERR_UNKNOWN_DATASET = 17,
    DS_ERR_INTERNAL = 100
} ds_status;

DS_API const char* ds_version(void);
DS_API const char* ds_status_name(ds_status status);
/* Message of the last failed call on this thread; empty after a successful call. */
DS_API const char* ds_last_error(void);

/* ---- corpora ---- */

typedef struct ds_corpus ds_corpus;

typedef struct ds_preprocess_options {
    int min_df;
    double max_df_fraction;
    int strip_suffixes;
    int use_stopwords;
} ds_preprocess_options;

DS_API void ds_preprocess_options_default(ds_preprocess_options* options);

/* Directory of matrix.txt, vocab.txt and labels.txt. */
DS_API ds_status ds_corpus_load_dtm(const char* dir, ds_corpus** out);
/* One subdirectory per class holding plain-text documents. `empty_docs` may be NULL. */
DS_API ds_status ds_corpus_load_tree(const char* dir, const ds_preprocess_options* options, ds_corpus** out,
                                     size_t* empty_docs);

typedef struct ds_synthetic_params {
    int num_classes;
    int docs_per_class;
    int terms_per_class;
    double noise;
    int doc_length;
    uint64_t seed;
} ds_synthetic_params;

DS_API void ds_synthetic_params_default(ds_synthetic_params* params);
DS_API ds_status ds_corpus_synthetic(const ds_synthetic_params* params, ds_corpus** out);

DS_API ds_status ds_corpus_write_dtm(const ds_corpus* corpus, const char* dir);
DS_API ds_status ds_corpus_set_name(ds_corpus* corpus, const char* name);
DS_API const char* ds_corpus_name(const ds_corpus* corpus);
DS_API size_t ds_corpus_num_docs(const ds_corpus* corpus);
DS_API size_t ds_corpus_num_terms(const ds_corpus* corpus);
DS_API size_t ds_corpus_num_classes(const ds_corpus* corpus);
DS_API void ds_corpus_free(ds_corpus* corpus);

/* ---- single layouts ---- */

/* Strings use the results-table spellings: tm in {VSM, LSI, NMF, LDA, EXT}, toggles "+", "-"
 * or "X", dr in {t-SNE, UMAP, MDS, SOM}, reference_space in {tm-space, vsm}. */
typedef struct ds_layout_spec {
    const char* tm;
    const char* tfidf;
    int topics;
    const char* dr;
    const char* lincomb;
    const char* reference_space;
    double perplexity;
    int n_iter;
    /* <= 0 selects the automatic learning rate. */
    double learning_rate;
    int n_neighbors;
    double min_dist;
    int umap_epochs;
    int max_iter;
    int grid_m;
    int grid_n;
    int som_epochs;
    uint64_t seed;
    /* Used when tm is EXT: whitespace file with an "m K" header. */
    const char* embedding_path;
} ds_layout_spec;

/* VSM, tf-idf on, t-SNE with its default hyperparameters, seed 0. */
DS_API void ds_layout_spec_default(ds_layout_spec* spec);

typedef struct ds_metrics {
    double trust;
    double cont;
    double shepard;
    double nh;
    double dsc;
    double silhouette;
    double ch_raw;
    double db_raw;
} ds_metrics;

typedef struct ds_layout ds_layout;

DS_API ds_status ds_layout_compute(const ds_corpus* corpus, const ds_layout_spec* spec, ds_layout** out);
DS_API size_t ds_layout_size(const ds_layout* layout);
DS_API ds_status ds_layout_position(const ds_layout* layout, size_t index, double* x, double* y);
DS_API ds_status ds_layout_get_metrics(const ds_layout* layout, ds_metrics* out);
/* Layout quadruple such as "(LSI,+,t-SNE,-)". */
DS_API const char* ds_layout_config_id(const ds_layout* layout);
DS_API int ds_layout_is_degenerate(const ds_layout* layout);
DS_API ds_status ds_layout_write_csv(const ds_layout* layout, const char* path);
DS_API ds_status ds_layout_write_svg(const ds_layout* layout, const char* path);
DS_API void ds_layout_free(ds_layout* layout);

/* Renders a doc_id,x,y,label CSV as SVG. */
DS_API ds_status ds_plot_layout_csv(const char* csv_path, const char* svg_path);

/* ---- grid runs ---- */

typedef struct ds_grid_options {
    /* Comma-separated lists. */
    const char* tms;
    const char* drs;
    const char* tfidf;
    const char* lincomb;
    int topics;
    const char* reference_space;
    int parallelism;
    uint64_t global_seed;
    const char* out;
    int resume;
    int record_runtime;
    /* Adds the t-SNE default configuration (perplexity 30, 1000 iterations, automatic rate). */
    int include_defaults;
    /* <= 0 disables the per-job wall-clock limit. */
    double job_timeout_s;
    /* 0 disables the memory ceiling. */
    size_t memory_limit_mb;
    /* 0 runs everything; otherwise stop after this many new rows without finalizing. */
    size_t max_new_jobs;
} ds_grid_options;

DS_API void ds_grid_options_default(ds_grid_options* options);
/* Number of configurations the grid expands to; nothing is run. */
DS_API ds_status ds_grid_count(const ds_corpus* const* corpora, size_t count, const ds_grid_options* options,
                               size_t* configs);
/* Corpora are keyed by their names. `rows` (may be NULL) receives the table size. */
DS_API ds_status ds_grid_run(const ds_corpus* const* corpora, size_t count, const ds_grid_options* options,
                             size_t* rows);

/* ---- analysis ---- */

/* Reads a results table and writes the report bundle into out_dir. */
DS_API ds_status ds_analyze(const char* results_csv, const char* out_dir, double correlation_threshold,
                            int use_spearman);
/* Newline-separated notes about report sections the last ds_analyze call skipped. */
DS_API const char* ds_analysis_notes(void);

/* One-sided exact sign test P[X >= k], X ~ Binomial(n, 1/2), and the Clopper-Pearson lower bound. */
DS_API ds_status ds_sign_test(int64_t n, int64_t k, double confidence, double* p_value, double* conf_lower);

#ifdef __cplusplus
}
#endif

#endif
