#include <algorithm>
#include <tuple>

#include "docspace/error.hpp"
#include "docspace/runner.hpp"
#include "docspace/text_io.hpp"

namespace docspace {

namespace {

constexpr std::size_t kColumns = 27;
constexpr std::size_t kIdentityColumns = 16;

std::string opt(const std::optional<double>& v) { return v ? text::format_double(*v) : std::string(); }

bool has_topics(TopicModel tm) { return tm == TopicModel::LSI || tm == TopicModel::NMF || tm == TopicModel::LDA; }

// Hyperparameter cells in results-column order; inapplicable ones stay empty.
std::vector<std::string> hyperparameter_cells(const DRParams& dr) {
    std::vector<std::string> c(9);  // perplexity..epochs
    switch (dr.method) {
        case Reduction::TSNE:
            c[0] = text::format_double(dr.tsne.perplexity);
            c[1] = std::to_string(dr.tsne.n_iter);
            c[2] = dr.tsne.learning_rate ? text::format_double(*dr.tsne.learning_rate) : "auto";
            break;
        case Reduction::UMAP:
            c[3] = text::format_double(dr.umap.min_dist);
            c[4] = std::to_string(dr.umap.n_neighbors);
            c[8] = std::to_string(dr.umap.n_epochs);
            break;
        case Reduction::SOM:
            c[5] = std::to_string(dr.som.grid_m);
            c[6] = std::to_string(dr.som.grid_n);
            c[8] = std::to_string(dr.som.epochs);
            break;
        case Reduction::MDS:
            c[7] = std::to_string(dr.mds.max_iter);
            break;
    }
    return c;
}

auto identity_tuple(const LayoutConfig& c) {
    const auto& d = c.dr;
    const bool tsne = d.method == Reduction::TSNE, umap = d.method == Reduction::UMAP;
    const bool som = d.method == Reduction::SOM, mds = d.method == Reduction::MDS;
    return std::make_tuple(
        c.dataset, static_cast<int>(c.tm), static_cast<int>(c.tfidf), c.topics.value_or(-1), static_cast<int>(d.method),
        static_cast<int>(c.lincomb), static_cast<int>(c.reference_space), tsne ? d.tsne.perplexity : 0.0,
        tsne ? d.tsne.n_iter : 0, tsne ? d.tsne.learning_rate.value_or(-1.0) : 0.0, umap ? d.umap.min_dist : 0.0,
        umap ? d.umap.n_neighbors : 0, som ? d.som.grid_m : 0, som ? d.som.grid_n : 0, mds ? d.mds.max_iter : 0,
        umap ? d.umap.n_epochs : (som ? d.som.epochs : 0));
}

std::optional<double> optional_number(std::string_view cell, std::string_view what) {
    if (cell.empty()) return std::nullopt;
    return text::parse_double(cell, what);
}

int required_int(std::string_view cell, std::string_view what) {
    require(!cell.empty(), ErrorCode::Parse, "missing " + std::string(what));
    return static_cast<int>(text::parse_int(cell, what));
}

}  // namespace

char symbol(Toggle t) {
    switch (t) {
        case Toggle::On: return '+';
        case Toggle::Off: return '-';
        case Toggle::NotApplicable: return 'X';
    }
    return '?';
}

Toggle parse_toggle(std::string_view text) {
    if (text == "+" || text == "on") return Toggle::On;
    if (text == "-" || text == "off") return Toggle::Off;
    if (text == "X" || text == "x") return Toggle::NotApplicable;
    fail(ErrorCode::Parse, "unknown toggle '" + std::string(text) + "'");
}

std::string_view to_string(ReferenceSpace r) { return r == ReferenceSpace::TmSpace ? "tm-space" : "vsm"; }

ReferenceSpace parse_reference_space(std::string_view text) {
    if (text == "tm-space") return ReferenceSpace::TmSpace;
    if (text == "vsm") return ReferenceSpace::Vsm;
    fail(ErrorCode::Parse, "unknown reference space '" + std::string(text) + "'");
}

void validate(const LayoutConfig& c) {
    require(!c.dataset.empty() && c.dataset.find_first_of(",\n\"") == std::string::npos, ErrorCode::InvalidArgument,
            "dataset names must be non-empty and free of commas and quotes");
    const bool no_tfidf = c.tm == TopicModel::LDA || c.tm == TopicModel::EXT;
    require((c.tfidf == Toggle::NotApplicable) == no_tfidf, ErrorCode::InvalidArgument,
            "tf-idf toggle is X exactly for LDA and EXT");
    const bool no_topics = c.tm == TopicModel::VSM || c.tm == TopicModel::EXT;
    require((c.lincomb == Toggle::NotApplicable) == no_topics, ErrorCode::InvalidArgument,
            "linear-combination toggle is X exactly for VSM and EXT");
    require(c.topics.has_value() == has_topics(c.tm), ErrorCode::InvalidArgument,
            "K is set exactly for LSI, NMF and LDA");
    require(!c.topics || *c.topics >= 1, ErrorCode::OutOfRange, "K must be >= 1");
    validate(c.dr);
}

bool is_valid(const LayoutConfig& c) {
    try {
        validate(c);
        return true;
    } catch (const Error&) {
        return false;
    }
}

std::string encode_config_id(const LayoutConfig& c) {
    return "(" + std::string(to_string(c.tm)) + "," + symbol(c.tfidf) + "," + std::string(to_string(c.dr.method)) +
           "," + symbol(c.lincomb) + ")";
}

std::string identity_key(const LayoutConfig& c) {
    std::string key = c.dataset + "," + std::string(to_string(c.tm)) + "," + symbol(c.tfidf) + "," +
                      (c.topics ? std::to_string(*c.topics) : "") + "," + std::string(to_string(c.dr.method)) + "," +
                      symbol(c.lincomb) + "," + std::string(to_string(c.reference_space));
    for (const auto& cell : hyperparameter_cells(c.dr)) key += "," + cell;
    return key;
}

bool identity_less(const LayoutConfig& a, const LayoutConfig& b) { return identity_tuple(a) < identity_tuple(b); }

std::string format_record(const QualityRecord& r) {
    std::string line = identity_key(r.config) + "," + std::to_string(r.config.dr.seed);
    if (r.metrics) {
        const auto& m = *r.metrics;
        for (double v : {m.trust, m.cont, m.shepard, m.nh, m.dsc, m.silhouette, m.ch_raw, m.db_raw}) {
            line += "," + text::format_double(v);
        }
    } else {
        line += ",,,,,,,,";
    }
    line += "," + opt(r.runtime_s) + "," + r.status;
    return line;
}

QualityRecord parse_record(std::string_view line) {
    const auto f = text::split(line, ',');
    require(f.size() == kColumns, ErrorCode::Parse,
            "results row has " + std::to_string(f.size()) + " columns, expected " + std::to_string(kColumns));
    QualityRecord r;
    auto& c = r.config;
    c.dataset = std::string(f[0]);
    c.tm = parse_topic_model(f[1]);
    c.tfidf = parse_toggle(f[2]);
    if (!f[3].empty()) c.topics = static_cast<int>(text::parse_int(f[3], "K"));
    c.dr.method = parse_reduction(f[4]);
    c.lincomb = parse_toggle(f[5]);
    c.reference_space = parse_reference_space(f[6]);
    switch (c.dr.method) {
        case Reduction::TSNE:
            c.dr.tsne.perplexity = text::parse_double(f[7], "perplexity");
            c.dr.tsne.n_iter = required_int(f[8], "n_iter");
            if (f[9] == "auto") {
                c.dr.tsne.learning_rate.reset();
            } else {
                c.dr.tsne.learning_rate = text::parse_double(f[9], "learning_rate");
            }
            break;
        case Reduction::UMAP:
            c.dr.umap.min_dist = text::parse_double(f[10], "min_dist");
            c.dr.umap.n_neighbors = required_int(f[11], "n_neighbors");
            c.dr.umap.n_epochs = required_int(f[15], "epochs");
            break;
        case Reduction::SOM:
            c.dr.som.grid_m = required_int(f[12], "grid_m");
            c.dr.som.grid_n = required_int(f[13], "grid_n");
            c.dr.som.epochs = required_int(f[15], "epochs");
            break;
        case Reduction::MDS:
            c.dr.mds.max_iter = required_int(f[14], "max_iter");
            break;
    }
    c.dr.seed = static_cast<std::uint64_t>(std::stoull(std::string(f[16])));
    r.status = std::string(f[26]);
    require(r.status == "ok" || r.status.rfind("failed:", 0) == 0, ErrorCode::Parse, "bad status '" + r.status + "'");
    if (r.ok()) {
        MetricVector m;
        double* slots[] = {&m.trust, &m.cont, &m.shepard, &m.nh, &m.dsc, &m.silhouette, &m.ch_raw, &m.db_raw};
        for (std::size_t i = 0; i < 8; ++i) *slots[i] = text::parse_double(f[17 + i], "metric");
        r.metrics = m;
    } else {
        for (std::size_t i = 17; i < 25; ++i) require(f[i].empty(), ErrorCode::Parse, "failed row carries metrics");
    }
    r.runtime_s = optional_number(f[25], "runtime_s");
    validate(c);
    return r;
}

void write_results_csv(const std::vector<QualityRecord>& records, const std::filesystem::path& path) {
    std::string out(kResultsHeader);
    out += "\n";
    for (const auto& r : records) out += format_record(r) + "\n";
    text::write_file(path, out);
}

std::vector<QualityRecord> read_results_csv(const std::filesystem::path& path, bool skip_malformed) {
    const auto rows = text::lines(text::read_file(path));
    require(!rows.empty() && rows[0] == kResultsHeader, ErrorCode::Parse, "results CSV header mismatch in " + path.string());
    std::vector<QualityRecord> out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].empty()) continue;
        try {
            out.push_back(parse_record(rows[i]));
        } catch (const Error& e) {
            if (!skip_malformed) throw Error(e.code(), "line " + std::to_string(i + 1) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace docspace
