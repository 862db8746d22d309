#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "docspace/corpus.hpp"
#include "docspace/models.hpp"
#include "docspace/projection.hpp"
#include "docspace/quality.hpp"

namespace docspace {

/// '+' applied, '-' not applied, 'X' not applicable.
enum class Toggle { On, Off, NotApplicable };
char symbol(Toggle t);
Toggle parse_toggle(std::string_view text);

enum class ReferenceSpace { TmSpace, Vsm };
std::string_view to_string(ReferenceSpace r);
ReferenceSpace parse_reference_space(std::string_view text);

struct LayoutConfig {
    std::string dataset;
    TopicModel tm = TopicModel::VSM;
    Toggle tfidf = Toggle::Off;
    std::optional<int> topics;
    /// Method, hyperparameters and the per-job seed.
    DRParams dr;
    Toggle lincomb = Toggle::NotApplicable;
    ReferenceSpace reference_space = ReferenceSpace::TmSpace;
};

/// Enforces the toggle invariants: tf-idf is X exactly for LDA/EXT, the linear
/// combination is X exactly for VSM/EXT, and K is set exactly for LSI/NMF/LDA.
void validate(const LayoutConfig& config);
bool is_valid(const LayoutConfig& config);

/// Layout quadruple, e.g. "(LSI,+,t-SNE,-)".
std::string encode_config_id(const LayoutConfig& config);

/// Comma-joined identity columns of the results table (everything except seed and outcomes).
std::string identity_key(const LayoutConfig& config);

/// Strict weak order on config identity used to normalize the results table.
bool identity_less(const LayoutConfig& a, const LayoutConfig& b);

struct QualityRecord {
    LayoutConfig config;
    std::optional<MetricVector> metrics;
    std::optional<double> runtime_s;
    /// "ok" or "failed:<reason>".
    std::string status = "ok";

    bool ok() const { return status == "ok"; }
};

// --- grid expansion ---

/// Hyperparameter ranges per reduction; defaults reproduce the benchmark grid.
struct DrGrid {
    std::vector<double> tsne_learning_rate{250, 1000, 2000, 4000, 10000};
    std::vector<int> tsne_n_iter{10, 17, 28, 46, 77, 129, 215, 359, 599, 1000};
    std::vector<double> tsne_perplexity{5, 10, 15, 20, 25, 30, 35, 40, 45, 50};
    std::vector<double> umap_min_dist{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    std::vector<int> umap_n_neighbors{2, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20};
    std::vector<int> som_m{10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20};
    std::vector<int> som_n{10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20};
    std::vector<int> mds_max_iter = default_mds_max_iter();
    int umap_n_epochs = 500;
    int som_epochs = 10;

    static std::vector<int> default_mds_max_iter();
};

struct ExpandOptions {
    std::vector<Reduction> drs{Reduction::TSNE, Reduction::UMAP, Reduction::MDS, Reduction::SOM};
    DrGrid grid;
    /// Candidate toggle values; combinations violating the config invariants are skipped.
    std::vector<Toggle> tfidf{Toggle::On, Toggle::Off, Toggle::NotApplicable};
    std::vector<Toggle> lincomb{Toggle::On, Toggle::Off, Toggle::NotApplicable};
    /// Topic count per dataset for LSI/NMF/LDA; `default_topics` applies to datasets not listed.
    std::map<std::string, int> topics;
    int default_topics = 0;
    ReferenceSpace reference_space = ReferenceSpace::TmSpace;
    std::uint64_t global_seed = 0;
    /// Adds one t-SNE config per cell with perplexity 30, n_iter 1000 and the automatic learning rate.
    bool include_tsne_default = false;
};

/// Cartesian product of all valid combinations, shuffled by `global_seed`.
/// Each config's seed is derive_seed(global_seed, identity_key(config)).
std::vector<LayoutConfig> expand_grid(const std::vector<std::string>& datasets, const std::vector<TopicModel>& tms,
                                      const ExpandOptions& options);

// --- execution ---

struct Dataset {
    Corpus corpus;
    /// EXT input, when available.
    std::optional<Eigen::MatrixXd> embedding;
};

struct RunOptions {
    int parallelism = 1;
    std::filesystem::path out;
    bool resume = true;
    bool record_runtime = true;
    std::uint64_t global_seed = 0;
    std::optional<double> job_timeout_s;
    std::optional<std::size_t> memory_limit_bytes;
    /// Stop after this many new rows without finalizing, as if the process had been killed.
    std::optional<std::size_t> max_new_jobs;
    ModelParams model;
    EvaluationOptions evaluation;
};

/// Runs every config not yet present in `options.out`, appending one row per job, then
/// rewrites the file sorted by config identity. Returns the finalized table.
std::vector<QualityRecord> run_benchmark(const std::map<std::string, Dataset>& corpora,
                                         const std::vector<LayoutConfig>& configs, const RunOptions& options);

/// Fit, project and evaluate a single config; throws on failure.
struct SingleLayout {
    Layout layout;
    MetricVector metrics;
};
SingleLayout compute_layout(const Dataset& dataset, const LayoutConfig& config, const ModelParams& model,
                            std::uint64_t tm_seed, const EvaluationOptions& evaluation = {});

/// Seed used for topic-model fits shared by all jobs of one (dataset, tm, tfidf, K) cell.
std::uint64_t topic_model_seed(std::uint64_t global_seed, const LayoutConfig& config);

// --- results CSV ---

inline constexpr std::string_view kResultsHeader =
    "dataset,tm,tfidf,K,dr,lincomb,reference_space,perplexity,n_iter,learning_rate,min_dist,n_neighbors,"
    "grid_m,grid_n,max_iter,epochs,seed,trust,cont,shepard,nh,dsc,silhouette,ch_raw,db_raw,runtime_s,status";

std::string format_record(const QualityRecord& record);
QualityRecord parse_record(std::string_view line);
void write_results_csv(const std::vector<QualityRecord>& records, const std::filesystem::path& path);
/// Reads a results table. With `skip_malformed`, unparsable rows (e.g. a torn last line) are dropped.
std::vector<QualityRecord> read_results_csv(const std::filesystem::path& path, bool skip_malformed = false);

}  // namespace docspace
