// Command-line front end; talks to the library only through the C interface.
#include <cstdio>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "docspace/docspace.h"

namespace {

struct CorpusDeleter {
    void operator()(ds_corpus* c) const { ds_corpus_free(c); }
};
using CorpusPtr = std::unique_ptr<ds_corpus, CorpusDeleter>;

struct LayoutDeleter {
    void operator()(ds_layout* l) const { ds_layout_free(l); }
};
using LayoutPtr = std::unique_ptr<ds_layout, LayoutDeleter>;

int report(ds_status status, const std::string& what) {
    if (status == DS_OK) return 0;
    std::fprintf(stderr, "error: %s: %s (%s)\n", what.c_str(), ds_last_error(), ds_status_name(status));
    return 1;
}

// "synthetic", "name=dir" or a DTM directory named after its last path component.
ds_status open_dataset(const std::string& spec, std::uint64_t seed, CorpusPtr& out) {
    ds_corpus* raw = nullptr;
    std::string name, path = spec;
    if (auto eq = spec.find('='); eq != std::string::npos) {
        name = spec.substr(0, eq);
        path = spec.substr(eq + 1);
    }
    ds_status status;
    if (path == "synthetic") {
        ds_synthetic_params params;
        ds_synthetic_params_default(&params);
        params.seed = seed;
        status = ds_corpus_synthetic(&params, &raw);
    } else {
        status = ds_corpus_load_dtm(path.c_str(), &raw);
        if (name.empty()) name = std::filesystem::path(path).lexically_normal().filename().string();
        if (name.empty()) name = std::filesystem::path(path).parent_path().filename().string();
    }
    if (status != DS_OK) return status;
    out.reset(raw);
    if (!name.empty()) return ds_corpus_set_name(out.get(), name.c_str());
    return DS_OK;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Document spatialization benchmark"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(ds_version()));
    int rc = 0;

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Build DTM files from a directory with one folder per class");
    std::string ingest_in, ingest_out;
    ds_preprocess_options prep;
    ds_preprocess_options_default(&prep);
    bool strip = false, no_stopwords = false;
    ingest->add_option("input", ingest_in, "Label-directory tree")->required()->check(CLI::ExistingDirectory);
    ingest->add_option("-o,--out", ingest_out, "Output directory")->required();
    ingest->add_option("--min-df", prep.min_df, "Drop terms in fewer documents");
    ingest->add_option("--max-df", prep.max_df_fraction, "Drop terms in a larger fraction of documents");
    ingest->add_flag("--strip-suffixes", strip, "Strip common English suffixes");
    ingest->add_flag("--no-stopwords", no_stopwords, "Keep stop words");
    ingest->callback([&] {
        prep.strip_suffixes = strip;
        prep.use_stopwords = !no_stopwords;
        ds_corpus* raw = nullptr;
        size_t empty = 0;
        if ((rc = report(ds_corpus_load_tree(ingest_in.c_str(), &prep, &raw, &empty), "ingest"))) return;
        CorpusPtr corpus(raw);
        if ((rc = report(ds_corpus_write_dtm(corpus.get(), ingest_out.c_str()), "write"))) return;
        std::printf("%zu documents, %zu terms, %zu classes", ds_corpus_num_docs(raw), ds_corpus_num_terms(raw),
                    ds_corpus_num_classes(raw));
        if (empty > 0) std::printf(", %zu empty after filtering", empty);
        std::printf("\n");
    });

    // synth
    auto* synth = app.add_subcommand("synth", "Write a synthetic labeled corpus as DTM files");
    ds_synthetic_params sp;
    ds_synthetic_params_default(&sp);
    std::string synth_out;
    synth->add_option("-o,--out", synth_out, "Output directory")->required();
    synth->add_option("--classes", sp.num_classes)->capture_default_str();
    synth->add_option("--docs-per-class", sp.docs_per_class)->capture_default_str();
    synth->add_option("--terms-per-class", sp.terms_per_class)->capture_default_str();
    synth->add_option("--noise", sp.noise)->capture_default_str();
    synth->add_option("--doc-length", sp.doc_length)->capture_default_str();
    synth->add_option("--seed", sp.seed)->capture_default_str();
    synth->callback([&] {
        ds_corpus* raw = nullptr;
        if ((rc = report(ds_corpus_synthetic(&sp, &raw), "synth"))) return;
        CorpusPtr corpus(raw);
        rc = report(ds_corpus_write_dtm(raw, synth_out.c_str()), "write");
    });

    // layout
    auto* layout = app.add_subcommand("layout", "Compute one layout and its quality metrics");
    ds_layout_spec spec;
    ds_layout_spec_default(&spec);
    std::string dataset, tm = spec.tm, tfidf = spec.tfidf, dr = spec.dr, lincomb = spec.lincomb,
                         ref = spec.reference_space, embedding, layout_csv, layout_svg;
    layout->add_option("-d,--dataset", dataset, "DTM directory, name=dir, or 'synthetic'")->required();
    layout->add_option("--tm", tm, "VSM, LSI, NMF, LDA or EXT")->capture_default_str();
    layout->add_option("--tfidf", tfidf, "+, - or X")->capture_default_str();
    layout->add_option("--topics", spec.topics, "Topic count K");
    layout->add_option("--dr", dr, "t-SNE, UMAP, MDS or SOM")->capture_default_str();
    layout->add_option("--lincomb", lincomb, "+, - or X")->capture_default_str();
    layout->add_option("--reference-space", ref, "tm-space or vsm")->capture_default_str();
    layout->add_option("--perplexity", spec.perplexity)->capture_default_str();
    layout->add_option("--n-iter", spec.n_iter)->capture_default_str();
    layout->add_option("--learning-rate", spec.learning_rate, "<= 0 selects max(m/48, 50)");
    layout->add_option("--n-neighbors", spec.n_neighbors)->capture_default_str();
    layout->add_option("--min-dist", spec.min_dist)->capture_default_str();
    layout->add_option("--umap-epochs", spec.umap_epochs)->capture_default_str();
    layout->add_option("--max-iter", spec.max_iter)->capture_default_str();
    layout->add_option("--grid-m", spec.grid_m)->capture_default_str();
    layout->add_option("--grid-n", spec.grid_n)->capture_default_str();
    layout->add_option("--som-epochs", spec.som_epochs)->capture_default_str();
    layout->add_option("--seed", spec.seed)->capture_default_str();
    layout->add_option("--embedding", embedding, "Embedding file for EXT");
    layout->add_option("--csv", layout_csv, "Write doc_id,x,y,label");
    layout->add_option("--svg", layout_svg, "Write a scatter plot");
    layout->callback([&] {
        CorpusPtr corpus;
        if ((rc = report(open_dataset(dataset, 1, corpus), "dataset"))) return;
        spec.tm = tm.c_str();
        spec.tfidf = tfidf.c_str();
        spec.dr = dr.c_str();
        spec.lincomb = lincomb.c_str();
        spec.reference_space = ref.c_str();
        spec.embedding_path = embedding.empty() ? nullptr : embedding.c_str();
        ds_layout* raw = nullptr;
        if ((rc = report(ds_layout_compute(corpus.get(), &spec, &raw), "layout"))) return;
        LayoutPtr result(raw);
        ds_metrics m;
        ds_layout_get_metrics(raw, &m);
        std::printf("%s\ntrust=%.6f cont=%.6f shepard=%.6f nh=%.6f dsc=%.6f silhouette=%.6f ch_raw=%.6g db_raw=%.6g\n",
                    ds_layout_config_id(raw), m.trust, m.cont, m.shepard, m.nh, m.dsc, m.silhouette, m.ch_raw,
                    m.db_raw);
        if (!layout_csv.empty() && (rc = report(ds_layout_write_csv(raw, layout_csv.c_str()), "csv"))) return;
        if (!layout_svg.empty()) rc = report(ds_layout_write_svg(raw, layout_svg.c_str()), "svg");
    });

    // grid
    auto* grid = app.add_subcommand("grid", "Expand the hyperparameter grid and run every job");
    ds_grid_options go;
    ds_grid_options_default(&go);
    std::vector<std::string> datasets;
    std::string tms = go.tms, drs = go.drs, tfidf_set = go.tfidf, lincomb_set = go.lincomb,
                grid_ref = go.reference_space, out = go.out;
    bool resume = true, no_timing = false, with_defaults = false, dry_run = false;
    grid->add_option("--datasets", datasets, "DTM directories, name=dir entries, or 'synthetic'")
        ->required()
        ->delimiter(',');
    grid->add_option("--tms", tms, "Comma-separated topic models")->capture_default_str();
    grid->add_option("--drs", drs, "Comma-separated reductions")->capture_default_str();
    grid->add_option("--tfidf", tfidf_set, "Candidate tf-idf toggles")->capture_default_str();
    grid->add_option("--lincomb", lincomb_set, "Candidate linear-combination toggles")->capture_default_str();
    grid->add_option("--topics", go.topics, "Topic count K for LSI, NMF and LDA");
    grid->add_option("--reference-space", grid_ref, "tm-space or vsm")->capture_default_str();
    grid->add_option("--parallelism", go.parallelism, "Worker threads")->capture_default_str();
    grid->add_option("--global-seed", go.global_seed)->capture_default_str();
    grid->add_option("--out", out, "Results CSV")->capture_default_str();
    grid->add_flag("--resume,!--no-resume", resume, "Skip jobs already in the results file (default on)");
    grid->add_flag("--no-timing", no_timing, "Leave runtime_s empty so reruns are byte-identical");
    grid->add_flag("--with-defaults", with_defaults, "Add the default t-SNE configuration per cell");
    grid->add_option("--timeout", go.job_timeout_s, "Per-job wall-clock limit in seconds");
    grid->add_option("--memory-limit-mb", go.memory_limit_mb, "Per-job memory ceiling");
    grid->add_option("--max-jobs", go.max_new_jobs, "Stop after this many new rows without finalizing");
    grid->add_flag("--dry-run", dry_run, "Only print the number of configurations");
    grid->callback([&] {
        std::vector<CorpusPtr> owned;
        std::vector<const ds_corpus*> corpora;
        for (const auto& d : datasets) {
            CorpusPtr c;
            if ((rc = report(open_dataset(d, go.global_seed + 1, c), "dataset " + d))) return;
            corpora.push_back(c.get());
            owned.push_back(std::move(c));
        }
        go.tms = tms.c_str();
        go.drs = drs.c_str();
        go.tfidf = tfidf_set.c_str();
        go.lincomb = lincomb_set.c_str();
        go.reference_space = grid_ref.c_str();
        go.out = out.c_str();
        go.resume = resume;
        go.record_runtime = !no_timing;
        go.include_defaults = with_defaults;
        size_t n = 0;
        if ((rc = report(ds_grid_count(corpora.data(), corpora.size(), &go, &n), "grid"))) return;
        std::printf("%zu configurations\n", n);
        if (dry_run) return;
        size_t rows = 0;
        if ((rc = report(ds_grid_run(corpora.data(), corpora.size(), &go, &rows), "grid"))) return;
        std::printf("%zu rows in %s\n", rows, out.c_str());
    });

    // analyze
    auto* analyze = app.add_subcommand("analyze", "Turn a results table into the report bundle");
    std::string results, report_dir = "report";
    double threshold = 0.8;
    bool spearman = false;
    analyze->add_option("results", results, "Results CSV")->required()->check(CLI::ExistingFile);
    analyze->add_option("-o,--out", report_dir, "Report directory")->capture_default_str();
    analyze->add_option("--threshold", threshold, "Correlation grouping threshold")->capture_default_str();
    analyze->add_flag("--spearman", spearman, "Use Spearman instead of Pearson correlations");
    analyze->callback([&] {
        if ((rc = report(ds_analyze(results.c_str(), report_dir.c_str(), threshold, spearman), "analyze"))) return;
        const std::string notes = ds_analysis_notes();
        if (!notes.empty()) std::fprintf(stderr, "%s\n", notes.c_str());
        std::printf("report written to %s\n", report_dir.c_str());
    });

    // plot
    auto* plot = app.add_subcommand("plot", "Render a layout CSV as SVG");
    std::string plot_in, plot_out;
    plot->add_option("layout", plot_in, "Layout CSV")->required()->check(CLI::ExistingFile);
    plot->add_option("-o,--out", plot_out, "SVG path")->required();
    plot->callback([&] { rc = report(ds_plot_layout_csv(plot_in.c_str(), plot_out.c_str()), "plot"); });

    CLI11_PARSE(app, argc, argv);
    return rc;
}
