#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "docspace/corpus.hpp"

namespace docspace {

enum class TopicModel { VSM, LSI, NMF, LDA, EXT };
enum class Metric { Cosine, JensenShannon, Euclidean };

std::string_view to_string(TopicModel model);
std::string_view to_string(Metric metric);
TopicModel parse_topic_model(std::string_view text);

struct ModelParams {
    /// Topic count K; ignored by VSM and EXT.
    int topics = 0;
    int nmf_max_iter = 500;
    double nmf_tol = 1e-6;
    /// Symmetric document-topic prior; <= 0 selects 50/K.
    double dirichlet_alpha = 0.0;
    double dirichlet_beta = 0.01;
    int gibbs_iters = 500;
    /// EXT input: either a matrix or a path to an embedding file.
    std::optional<Eigen::MatrixXd> embedding;
    std::filesystem::path embedding_path;
};

struct DocumentRepresentation {
    Eigen::MatrixXd matrix;
    Metric metric = Metric::Cosine;
    /// K x n topic vectors; present exactly for LSI, NMF and LDA.
    std::optional<Eigen::MatrixXd> topic_term;
    TopicModel model = TopicModel::VSM;
    /// Not applicable (nullopt) for LDA and EXT.
    std::optional<bool> tfidf_applied;
};

struct DistanceMatrix {
    Eigen::MatrixXd values;
    Metric metric = Metric::Euclidean;

    Eigen::Index size() const { return values.rows(); }
    double operator()(Eigen::Index i, Eigen::Index j) const { return values(i, j); }
};

/// Fits `model` on `input`. `tfidf_applied` tells whether `input` is already weighted;
/// LDA rejects weighted or non-integer input.
DocumentRepresentation fit_representation(const SparseMatrix& input, bool tfidf_applied, TopicModel model,
                                          const ModelParams& params, std::uint64_t seed);

/// Convenience overload that weights the corpus first when `apply_tfidf` is set.
DocumentRepresentation fit_representation(const Corpus& corpus, TopicModel model, bool apply_tfidf,
                                          const ModelParams& params, std::uint64_t seed);

DistanceMatrix pairwise_distances(const DocumentRepresentation& rep);
DistanceMatrix pairwise_distances(const Eigen::MatrixXd& rows, Metric metric);

/// Reads the `m K` header followed by m rows of K floats.
Eigen::MatrixXd load_embedding(const std::filesystem::path& path);

// Lower-level fits, exposed for diagnostics and tests.

struct LsiResult {
    Eigen::MatrixXd documents;  // m x K, U_K * Sigma_K
    Eigen::MatrixXd topics;     // K x n, right singular vectors as rows
    Eigen::VectorXd singular_values;
};
LsiResult fit_lsi(const Eigen::MatrixXd& a, int topics);

struct NmfResult {
    Eigen::MatrixXd w;  // m x K
    Eigen::MatrixXd h;  // K x n
    /// Frobenius objective ||A - WH||_F after initialization and after every sweep.
    std::vector<double> objective;
};
NmfResult fit_nmf(const Eigen::MatrixXd& a, int topics, int max_iter, double tol, std::uint64_t seed);

struct LdaResult {
    Eigen::MatrixXd theta;  // m x K, rows sum to 1
    Eigen::MatrixXd phi;    // K x n, rows sum to 1
};
LdaResult fit_lda(const SparseMatrix& counts, int topics, double alpha, double beta, int iterations,
                  std::uint64_t seed);

}  // namespace docspace
