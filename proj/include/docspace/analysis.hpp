#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "docspace/runner.hpp"

namespace docspace {

struct AggregatedRecord {
    QualityRecord record;
    double beta_ch = 0.0;
    double beta_db = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
};

/// Aggregated accuracy in [0,1]: half neighborhood hit, half the mean of trust, continuity
/// and the Shepard correlation mapped to [0,1].
double aggregate_alpha(double trust, double cont, double shepard, double nh);
/// Aggregated perception in [0,1] from normalized DB (lower is better), normalized CH,
/// silhouette and distance consistency.
double aggregate_beta(double beta_db, double beta_ch, double silhouette, double dsc);

/// Keeps the ok rows and divides CH and DB by their maximum within each (dataset, tm, tfidf)
/// group. Infinite DB values are left out of the maximum and map to 1; a zero maximum maps to 0.
std::vector<AggregatedRecord> normalize_group_metrics(const std::vector<QualityRecord>& results);

enum class Score { Alpha, Beta };
std::string_view to_string(Score s);
double score_of(const AggregatedRecord& r, Score s);

// --- correlations ---

enum class CorrelationType { Pearson, Spearman };
std::string_view to_string(CorrelationType t);

inline constexpr std::array<std::string_view, 8> kCorrelationColumns{
    "trust", "cont", "shepard", "nh", "dsc", "silhouette", "beta_ch", "1-beta_db"};

struct CorrelationReport {
    /// NaN where a column is constant.
    Eigen::Matrix<double, 8, 8> matrix;
    /// Connected components of pairs correlated at or above the threshold; -1 for constant columns.
    std::array<int, 8> group{};
    CorrelationType type = CorrelationType::Pearson;
    double threshold = 0.8;
};

/// `columns` holds one observation per row in kCorrelationColumns order.
CorrelationReport metric_correlations(const Eigen::MatrixXd& columns, double threshold = 0.8,
                                      CorrelationType type = CorrelationType::Pearson);
CorrelationReport metric_correlations(const std::vector<AggregatedRecord>& rows, double threshold = 0.8,
                                      CorrelationType type = CorrelationType::Pearson);

/// Pearson correlation of average ranks.
double spearman(std::span<const double> x, std::span<const double> y);

// --- sign tests ---

struct BinomialTest {
    double p_value = 1.0;
    /// One-sided Clopper-Pearson lower bound on the success probability.
    double conf_lower = 0.0;
};
/// One-sided exact test of P[X >= k] for X ~ Binomial(n, 1/2).
BinomialTest binomial_sign_test(std::int64_t n, std::int64_t k, double confidence = 0.99);

enum class ToggleColumn { Tfidf, Lincomb };
std::string_view to_string(ToggleColumn t);

struct SignTestRow {
    std::string dataset;  // "Total" for the pooled row
    std::int64_t n = 0;
    std::int64_t k = 0;
    BinomialTest test;
};

/// Pairs ok rows that differ only in `toggle` (+ versus -); a pair succeeds when the + row
/// scores strictly higher. One row per dataset, sorted, then "Total".
std::vector<SignTestRow> paired_sign_test(const std::vector<AggregatedRecord>& rows, ToggleColumn toggle, Score score);

// --- best configurations ---

struct BestResult {
    std::string dataset;
    /// Maximum rounded to two decimals.
    double value = 0.0;
    /// Sorted, distinct layout quadruples reaching `value` after rounding.
    std::vector<std::string> config_ids;
};
std::vector<BestResult> best_results(const std::vector<AggregatedRecord>& rows, Score score);

// --- sensitivity summaries ---

struct FiveNumber {
    double min = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double max = 0.0;
};
/// Quartiles by linear interpolation between order statistics.
FiveNumber five_number_summary(std::vector<double> values);

struct SummaryRow {
    /// Layout quadruple, e.g. "(LSI,+,t-SNE,-)".
    std::string config_id;
    std::size_t count = 0;
    FiveNumber summary;
};
std::vector<SummaryRow> five_number_summaries(const std::vector<AggregatedRecord>& rows, Score score);

// --- default hyperparameters ---

struct DefaultHyperparameters {
    TsneParams tsne{30.0, 1000, std::nullopt};
    int umap_n_neighbors = 15;
    double umap_min_dist = 0.1;
    int mds_max_iter = 300;

    bool matches(const DRParams& dr) const;
};

struct DefaultPercentile {
    TopicModel tm = TopicModel::VSM;
    Reduction dr = Reduction::TSNE;
    /// Mean over groups of the fraction of rows scoring strictly above the default row.
    double fraction = 0.0;
    std::size_t groups = 0;
};

/// Groups are (dataset, tm, tfidf, K, lincomb, dr, reference space); groups without a default
/// row are skipped and reported through `missing`. SOM is not considered.
std::vector<DefaultPercentile> default_percentiles(const std::vector<AggregatedRecord>& rows, Score score,
                                                   const DefaultHyperparameters& defaults = {},
                                                   std::vector<std::string>* missing = nullptr);

// --- report bundle ---

struct ReportOptions {
    double correlation_threshold = 0.8;
    CorrelationType correlation = CorrelationType::Pearson;
    DefaultHyperparameters defaults;
};

/// Writes aggregated.csv, correlations.csv, sign_tests.csv, best.csv, summaries.csv and
/// default_percentiles.csv into `dir`. Returns notes about skipped sections.
std::vector<std::string> write_analysis_report(const std::vector<QualityRecord>& results,
                                               const std::filesystem::path& dir, const ReportOptions& options = {});

// --- SVG export ---

/// Scatter plot in a 1000x1000 view box with a 5% margin and a label legend.
std::string layout_svg(const Positions& positions, const std::vector<std::string>& labels);
void export_layout_svg(const Positions& positions, const std::vector<std::string>& labels,
                       const std::filesystem::path& path);

}  // namespace docspace
