#include <algorithm>
#include <cctype>
#include <cmath>

#include "docspace/error.hpp"
#include "docspace/projection.hpp"
#include "docspace/text_io.hpp"

namespace docspace {

namespace {

constexpr double kSomVarianceFraction = 0.95;
constexpr Eigen::Index kMinPoints = 4;

Layout finish(Positions positions) {
    require(positions.allFinite(), ErrorCode::Degenerate, "projection produced non-finite coordinates");
    Layout layout;
    layout.degenerate = (positions.rowwise() - positions.row(0)).cwiseAbs().maxCoeff() == 0.0;
    layout.positions = std::move(positions);
    return layout;
}

}  // namespace

std::string_view to_string(Reduction dr) {
    switch (dr) {
        case Reduction::TSNE: return "t-SNE";
        case Reduction::UMAP: return "UMAP";
        case Reduction::MDS: return "MDS";
        case Reduction::SOM: return "SOM";
    }
    return "?";
}

Reduction parse_reduction(std::string_view text) {
    std::string key;
    for (char c : text) {
        if (c != '-' && c != '_') key += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    if (key == "tsne") return Reduction::TSNE;
    if (key == "umap") return Reduction::UMAP;
    if (key == "mds") return Reduction::MDS;
    if (key == "som") return Reduction::SOM;
    fail(ErrorCode::InvalidArgument, "unknown dimensionality reduction '" + std::string(text) + "'");
}

void validate(const DRParams& p) {
    switch (p.method) {
        case Reduction::TSNE:
            require(p.tsne.perplexity >= 2.0, ErrorCode::PerplexityInfeasible, "perplexity must be >= 2");
            require(p.tsne.n_iter >= 1, ErrorCode::InvalidArgument, "n_iter must be >= 1");
            require(!p.tsne.learning_rate || *p.tsne.learning_rate > 0.0, ErrorCode::InvalidArgument,
                    "learning_rate must be positive");
            break;
        case Reduction::UMAP:
            require(p.umap.n_neighbors >= 2, ErrorCode::InvalidArgument, "n_neighbors must be >= 2");
            require(p.umap.min_dist >= 0.0, ErrorCode::InvalidArgument, "min_dist must be >= 0");
            require(p.umap.n_epochs >= 1, ErrorCode::InvalidArgument, "n_epochs must be >= 1");
            break;
        case Reduction::MDS:
            require(p.mds.max_iter >= 1, ErrorCode::InvalidArgument, "max_iter must be >= 1");
            break;
        case Reduction::SOM:
            require(p.som.grid_m >= 2 && p.som.grid_n >= 2, ErrorCode::InvalidArgument, "SOM grid must be >= 2x2");
            require(p.som.epochs >= 1, ErrorCode::InvalidArgument, "SOM epochs must be >= 1");
            break;
    }
}

Layout project(const DistanceMatrix& distances, const DRParams& params) {
    validate(params);
    const auto m = distances.size();
    require(m >= kMinPoints, ErrorCode::InvalidArgument, "projection needs at least 4 points");
    switch (params.method) {
        case Reduction::TSNE:
            require(params.tsne.perplexity < static_cast<double>(m - 1), ErrorCode::PerplexityInfeasible,
                    "perplexity " + text::format_double(params.tsne.perplexity) + " infeasible for " +
                        std::to_string(m) + " points");
            return finish(run_tsne(distances, params.tsne, params.seed));
        case Reduction::UMAP:
            return finish(run_umap(distances, params.umap, params.seed));
        case Reduction::MDS:
            return finish(run_smacof(distances, params.mds.max_iter, params.seed));
        case Reduction::SOM:
            fail(ErrorCode::InvalidArgument, "SOM requires vector input, not a distance matrix");
    }
    fail(ErrorCode::InvalidArgument, "unknown reduction");
}

Layout project(const DocumentRepresentation& rep, const DRParams& params) {
    validate(params);
    require(rep.matrix.rows() >= kMinPoints, ErrorCode::InvalidArgument, "projection needs at least 4 points");
    if (params.method == Reduction::SOM) {
        return finish(run_som(pca_reduce(rep.matrix, kSomVarianceFraction), params.som, params.seed));
    }
    if (params.method == Reduction::TSNE) {
        require(params.tsne.perplexity < static_cast<double>(rep.matrix.rows() - 1), ErrorCode::PerplexityInfeasible,
                "perplexity " + text::format_double(params.tsne.perplexity) + " infeasible for " +
                    std::to_string(rep.matrix.rows()) + " points");
    }
    return project(pairwise_distances(rep), params);
}

Layout linear_combination_layout(const Positions& topics, const Eigen::MatrixXd& theta) {
    require(theta.cols() == topics.rows(), ErrorCode::DimensionMismatch,
            "theta has " + std::to_string(theta.cols()) + " columns but there are " + std::to_string(topics.rows()) +
                " topic positions");
    require(theta.allFinite() && (theta.array() >= 0.0).all(), ErrorCode::InvalidArgument,
            "theta must be finite and non-negative");
    Positions out(theta.rows(), 2);
    for (Eigen::Index i = 0; i < theta.rows(); ++i) {
        const double total = theta.row(i).sum();
        require(total > 0.0, ErrorCode::Degenerate, "theta row " + std::to_string(i) + " is all zero");
        out.row(i) = (theta.row(i) / total) * topics;
    }
    return finish(std::move(out));
}

void write_layout_csv(const Layout& layout, const std::vector<std::string>& doc_ids,
                      const std::vector<std::string>& labels, const std::filesystem::path& path) {
    const auto m = static_cast<std::size_t>(layout.size());
    require(doc_ids.size() == m && labels.size() == m, ErrorCode::DimensionMismatch,
            "layout, doc_ids and labels differ in length");
    std::string out = "doc_id,x,y,label\n";
    for (std::size_t i = 0; i < m; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        out += doc_ids[i] + "," + text::format_double(layout.positions(r, 0)) + "," +
               text::format_double(layout.positions(r, 1)) + "," + labels[i] + "\n";
    }
    text::write_file(path, out);
}

LayoutTable read_layout_csv(const std::filesystem::path& path) {
    const auto rows = text::lines(text::read_file(path));
    require(!rows.empty() && rows[0] == "doc_id,x,y,label", ErrorCode::Parse,
            "layout CSV must start with header doc_id,x,y,label");
    LayoutTable t;
    std::vector<std::pair<double, double>> xy;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].empty()) continue;
        const auto f = text::split(rows[i], ',');
        require(f.size() == 4, ErrorCode::Parse, "layout CSV row " + std::to_string(i + 1) + " needs 4 fields");
        t.doc_ids.emplace_back(f[0]);
        xy.emplace_back(text::parse_double(f[1], "layout x"), text::parse_double(f[2], "layout y"));
        t.labels.emplace_back(f[3]);
    }
    t.layout.positions.resize(static_cast<Eigen::Index>(xy.size()), 2);
    for (std::size_t i = 0; i < xy.size(); ++i) {
        t.layout.positions(static_cast<Eigen::Index>(i), 0) = xy[i].first;
        t.layout.positions(static_cast<Eigen::Index>(i), 1) = xy[i].second;
    }
    if (!xy.empty()) {
        t.layout.degenerate =
            (t.layout.positions.rowwise() - t.layout.positions.row(0)).cwiseAbs().maxCoeff() == 0.0;
    }
    return t;
}

}  // namespace docspace
