#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "docspace/models.hpp"

namespace docspace {

using Positions = Eigen::Matrix<double, Eigen::Dynamic, 2>;

struct Layout {
    Positions positions;
    std::string config_ref;
    /// Set when every position coincides.
    bool degenerate = false;

    Eigen::Index size() const { return positions.rows(); }
};

enum class Reduction { TSNE, UMAP, MDS, SOM };

/// Display name as used in layout identifiers: t-SNE, UMAP, MDS, SOM.
std::string_view to_string(Reduction dr);
Reduction parse_reduction(std::string_view text);

struct TsneParams {
    double perplexity = 30.0;
    int n_iter = 1000;
    /// nullopt selects max(m / 48, 50).
    std::optional<double> learning_rate;
};

struct UmapParams {
    int n_neighbors = 15;
    double min_dist = 0.1;
    int n_epochs = 500;
};

struct MdsParams {
    int max_iter = 300;
};

struct SomParams {
    int grid_m = 10;
    int grid_n = 10;
    int epochs = 10;
};

struct DRParams {
    Reduction method = Reduction::TSNE;
    TsneParams tsne;
    UmapParams umap;
    MdsParams mds;
    SomParams som;
    std::uint64_t seed = 0;
};

/// Checks the per-method hyperparameter invariants that do not depend on the input size.
void validate(const DRParams& params);

Layout project(const DocumentRepresentation& rep, const DRParams& params);
/// t-SNE, UMAP and MDS only; SOM consumes vectors.
Layout project(const DistanceMatrix& distances, const DRParams& params);

/// Document i is placed at sum_j theta_ij * topic_j; rows of theta are renormalized to sum 1.
Layout linear_combination_layout(const Positions& topic_positions, const Eigen::MatrixXd& theta);

/// Principal-component scores covering at least `variance_fraction` of the total variance.
Eigen::MatrixXd pca_reduce(const Eigen::MatrixXd& matrix, double variance_fraction);

// --- individual reductions, exposed with their diagnostics ---

struct TsneTrace {
    /// Achieved perplexity 2^H(P_i) per point after bandwidth search.
    std::vector<double> perplexities;
    double kl_first_post_exaggeration = 0.0;
    double kl_final = 0.0;
};

/// Per-row Gaussian conditional probabilities on squared distances, calibrated to `perplexity`.
Eigen::MatrixXd tsne_conditional_affinities(const DistanceMatrix& distances, double perplexity,
                                            std::vector<double>* achieved = nullptr);
Positions run_tsne(const DistanceMatrix& distances, const TsneParams& params, std::uint64_t seed,
                   TsneTrace* trace = nullptr);

struct UmapCurve {
    double a = 0.0;
    double b = 0.0;
};
/// Least-squares fit of 1 / (1 + a x^(2b)) to the min_dist target curve on 300 points in [0, 3].
UmapCurve fit_umap_curve(double min_dist, double spread = 1.0);

struct FuzzyGraph {
    std::vector<int> head;
    std::vector<int> tail;
    std::vector<double> weight;
    std::vector<double> rho;
    std::vector<double> sigma;
};
/// k-NN graph (self counted as a neighbor) with smooth-kNN calibration and fuzzy union.
FuzzyGraph umap_fuzzy_graph(const DistanceMatrix& distances, int n_neighbors);
Positions run_umap(const DistanceMatrix& distances, const UmapParams& params, std::uint64_t seed);

/// SMACOF on raw stress; `stress_trace` receives the stress after init and after every iteration.
Positions run_smacof(const DistanceMatrix& dissimilarities, int max_iter, std::uint64_t seed,
                     std::vector<double>* stress_trace = nullptr);
double raw_stress(const DistanceMatrix& dissimilarities, const Positions& positions);

/// Trains a rectangular SOM and returns integer BMU grid coordinates (row, column).
Positions run_som(const Eigen::MatrixXd& vectors, const SomParams& params, std::uint64_t seed);

// --- layout I/O ---

void write_layout_csv(const Layout& layout, const std::vector<std::string>& doc_ids,
                      const std::vector<std::string>& labels, const std::filesystem::path& path);

struct LayoutTable {
    Layout layout;
    std::vector<std::string> doc_ids;
    std::vector<std::string> labels;
};
LayoutTable read_layout_csv(const std::filesystem::path& path);

}  // namespace docspace
