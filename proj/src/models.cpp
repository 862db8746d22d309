#include "docspace/models.hpp"

#include <cmath>

#include "docspace/error.hpp"
#include "docspace/text_io.hpp"

namespace docspace {

std::string_view to_string(TopicModel model) {
    switch (model) {
        case TopicModel::VSM: return "VSM";
        case TopicModel::LSI: return "LSI";
        case TopicModel::NMF: return "NMF";
        case TopicModel::LDA: return "LDA";
        case TopicModel::EXT: return "EXT";
    }
    return "?";
}

std::string_view to_string(Metric metric) {
    switch (metric) {
        case Metric::Cosine: return "cosine";
        case Metric::JensenShannon: return "jensen-shannon";
        case Metric::Euclidean: return "euclidean";
    }
    return "?";
}

TopicModel parse_topic_model(std::string_view text) {
    for (auto m : {TopicModel::VSM, TopicModel::LSI, TopicModel::NMF, TopicModel::LDA, TopicModel::EXT}) {
        if (text == to_string(m)) return m;
    }
    fail(ErrorCode::InvalidArgument, "unknown topic model '" + std::string(text) + "'");
}

Eigen::MatrixXd load_embedding(const std::filesystem::path& path) {
    const auto rows = text::lines(text::read_file(path));
    require(!rows.empty(), ErrorCode::Parse, "embedding file is empty: " + path.string());
    const auto header = text::fields(rows[0]);
    require(header.size() == 2, ErrorCode::Parse, "embedding header must be 'm K'");
    const auto m = text::parse_int(header[0], "embedding header");
    const auto k = text::parse_int(header[1], "embedding header");
    require(m > 0 && k > 0, ErrorCode::Parse, "embedding dimensions must be positive");
    require(static_cast<long long>(rows.size()) >= m + 1, ErrorCode::DimensionMismatch,
            "embedding file has fewer than m rows");

    Eigen::MatrixXd out(m, k);
    for (long long i = 0; i < m; ++i) {
        const auto f = text::fields(rows[static_cast<std::size_t>(i + 1)]);
        require(static_cast<long long>(f.size()) == k, ErrorCode::DimensionMismatch,
                "embedding row " + std::to_string(i) + " does not have K values");
        for (long long j = 0; j < k; ++j) out(i, j) = text::parse_double(f[static_cast<std::size_t>(j)], "embedding");
    }
    return out;
}

DocumentRepresentation fit_representation(const SparseMatrix& input, bool tfidf_applied, TopicModel model,
                                          const ModelParams& params, std::uint64_t seed) {
    const auto m = input.rows();
    const auto n = input.cols();
    DocumentRepresentation rep;
    rep.model = model;

    auto check_topics = [&] {
        require(params.topics >= 1 && params.topics <= std::min(m, n), ErrorCode::OutOfRange,
                "topic count K=" + std::to_string(params.topics) + " outside [1, min(m, n)]");
    };

    switch (model) {
        case TopicModel::VSM:
            rep.matrix = Eigen::MatrixXd(input);
            rep.metric = Metric::Cosine;
            rep.tfidf_applied = tfidf_applied;
            break;
        case TopicModel::LSI: {
            check_topics();
            auto lsi = fit_lsi(Eigen::MatrixXd(input), params.topics);
            rep.matrix = std::move(lsi.documents);
            rep.topic_term = std::move(lsi.topics);
            rep.metric = Metric::Cosine;
            rep.tfidf_applied = tfidf_applied;
            break;
        }
        case TopicModel::NMF: {
            check_topics();
            auto nmf = fit_nmf(Eigen::MatrixXd(input), params.topics, params.nmf_max_iter, params.nmf_tol, seed);
            rep.matrix = std::move(nmf.w);
            rep.topic_term = std::move(nmf.h);
            rep.metric = Metric::Cosine;
            rep.tfidf_applied = tfidf_applied;
            break;
        }
        case TopicModel::LDA: {
            require(!tfidf_applied, ErrorCode::InvalidArgument, "LDA requires raw counts, not tf-idf weights");
            require(params.topics >= 1, ErrorCode::OutOfRange, "LDA needs K >= 1");
            const double alpha = params.dirichlet_alpha > 0.0 ? params.dirichlet_alpha : 50.0 / params.topics;
            auto lda = fit_lda(input, params.topics, alpha, params.dirichlet_beta, params.gibbs_iters, seed);
            rep.matrix = std::move(lda.theta);
            rep.topic_term = std::move(lda.phi);
            rep.metric = Metric::JensenShannon;
            break;
        }
        case TopicModel::EXT: {
            rep.matrix = params.embedding ? *params.embedding : load_embedding(params.embedding_path);
            require(rep.matrix.rows() == m, ErrorCode::DimensionMismatch,
                    "embedding has " + std::to_string(rep.matrix.rows()) + " rows, corpus has " + std::to_string(m));
            rep.metric = Metric::Cosine;
            break;
        }
    }
    return rep;
}

DocumentRepresentation fit_representation(const Corpus& corpus, TopicModel model, bool apply_tfidf,
                                          const ModelParams& params, std::uint64_t seed) {
    require(!(apply_tfidf && (model == TopicModel::LDA || model == TopicModel::EXT)), ErrorCode::InvalidArgument,
            "tf-idf weighting does not apply to " + std::string(to_string(model)));
    if (apply_tfidf) return fit_representation(tfidf_weight(corpus), true, model, params, seed);
    return fit_representation(corpus.dtm, false, model, params, seed);
}

}  // namespace docspace
