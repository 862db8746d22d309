#include "docspace/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "docspace/error.hpp"
#include "docspace/random.hpp"
#include "docspace/text_io.hpp"

namespace fs = std::filesystem;

namespace docspace {

namespace {

bool is_letter(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

bool ends_with(const std::string& s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string strip_suffix(std::string token) {
    if (token.size() > 4 && ends_with(token, "ies")) {
        token.resize(token.size() - 3);
        token += 'y';
    } else if (token.size() > 5 && ends_with(token, "ing")) {
        token.resize(token.size() - 3);
    } else if (token.size() > 4 && ends_with(token, "ed")) {
        token.resize(token.size() - 2);
    } else if (token.size() > 3 && ends_with(token, "s") && !ends_with(token, "ss")) {
        token.pop_back();
    }
    return token;
}

// Builds the label index and sorts documents by doc_id, permuting matrix rows along.
Corpus assemble(std::string name, std::vector<std::string> doc_ids, std::vector<std::string> doc_labels,
                std::vector<std::string> vocabulary, std::vector<Eigen::Triplet<double>> triplets) {
    const std::size_t m = doc_ids.size();
    require(m > 0, ErrorCode::EmptyCorpus, "corpus has no documents");

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return doc_ids[a] < doc_ids[b]; });
    std::vector<std::size_t> new_row(m);
    for (std::size_t r = 0; r < m; ++r) new_row[order[r]] = r;

    Corpus c;
    c.name = std::move(name);
    c.vocabulary = std::move(vocabulary);
    c.doc_ids.reserve(m);
    for (std::size_t r = 0; r < m; ++r) c.doc_ids.push_back(doc_ids[order[r]]);
    for (std::size_t r = 1; r < m; ++r) {
        require(c.doc_ids[r] != c.doc_ids[r - 1], ErrorCode::InvalidArgument, "duplicate doc_id " + c.doc_ids[r]);
    }

    std::set<std::string> distinct(doc_labels.begin(), doc_labels.end());
    c.label_names.assign(distinct.begin(), distinct.end());
    c.labels.reserve(m);
    for (std::size_t r = 0; r < m; ++r) {
        const auto& l = doc_labels[order[r]];
        c.labels.push_back(static_cast<int>(std::lower_bound(c.label_names.begin(), c.label_names.end(), l) -
                                            c.label_names.begin()));
    }

    for (auto& t : triplets) t = Eigen::Triplet<double>(static_cast<int>(new_row[t.row()]), t.col(), t.value());
    c.dtm.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(c.vocabulary.size()));
    c.dtm.setFromTriplets(triplets.begin(), triplets.end());
    c.dtm.prune(0.0);
    c.dtm.makeCompressed();
    validate(c);
    return c;
}

}  // namespace

bool operator==(const Corpus& a, const Corpus& b) {
    if (a.name != b.name || a.vocabulary != b.vocabulary || a.doc_ids != b.doc_ids ||
        a.label_names != b.label_names || a.labels != b.labels || a.dtm.rows() != b.dtm.rows() ||
        a.dtm.cols() != b.dtm.cols() || a.dtm.nonZeros() != b.dtm.nonZeros()) {
        return false;
    }
    for (Eigen::Index r = 0; r < a.dtm.outerSize(); ++r) {
        SparseMatrix::InnerIterator ia(a.dtm, r), ib(b.dtm, r);
        for (; ia && ib; ++ia, ++ib) {
            if (ia.col() != ib.col() || ia.value() != ib.value()) return false;
        }
        if (ia || ib) return false;
    }
    return true;
}

void validate(const Corpus& c) {
    const auto m = c.doc_ids.size();
    require(m > 0, ErrorCode::EmptyCorpus, "corpus has no documents");
    require(static_cast<std::size_t>(c.dtm.rows()) == m && c.labels.size() == m, ErrorCode::DimensionMismatch,
            "document count differs between matrix, labels and ids");
    require(static_cast<std::size_t>(c.dtm.cols()) == c.vocabulary.size(), ErrorCode::DimensionMismatch,
            "term count differs between matrix and vocabulary");
    require(!c.label_names.empty(), ErrorCode::InvalidArgument, "corpus needs at least one class");
    std::set<std::string> seen;
    for (const auto& term : c.vocabulary) {
        require(seen.insert(term).second, ErrorCode::InvalidArgument, "duplicate vocabulary term '" + term + "'");
    }
    for (int l : c.labels) {
        require(l >= 0 && static_cast<std::size_t>(l) < c.label_names.size(), ErrorCode::OutOfRange,
                "label index out of range");
    }
    for (Eigen::Index r = 0; r < c.dtm.outerSize(); ++r) {
        for (SparseMatrix::InnerIterator it(c.dtm, r); it; ++it) {
            require(it.value() >= 0.0 && std::isfinite(it.value()), ErrorCode::InvalidArgument,
                    "negative or non-finite count in row " + std::to_string(r));
        }
    }
}

std::set<std::string> PreprocessConfig::default_stopwords() {
    return {"a",     "about", "above", "after", "again", "against", "all",   "am",    "an",    "and",   "any",
            "are",   "as",    "at",    "be",    "because", "been",  "before", "being", "below", "between", "both",
            "but",   "by",    "can",   "could", "did",   "do",      "does",  "doing", "down",  "during", "each",
            "few",   "for",   "from",  "further", "had", "has",     "have",  "having", "he",   "her",   "here",
            "hers",  "herself", "him", "himself", "his", "how",     "i",     "if",    "in",    "into",  "is",
            "it",    "its",   "itself", "just", "me",    "more",    "most",  "my",    "myself", "no",   "nor",
            "not",   "now",   "of",    "off",   "on",    "once",    "only",  "or",    "other", "our",   "ours",
            "ourselves", "out", "over", "own",  "same",  "she",     "should", "so",   "some",  "such",  "than",
            "that",  "the",   "their", "theirs", "them", "themselves", "then", "there", "these", "they", "this",
            "those", "through", "to",  "too",   "under", "until",   "up",    "very",  "was",   "we",    "were",
            "what",  "when",  "where", "which", "while", "who",     "whom",  "why",   "will",  "with",  "would",
            "you",   "your",  "yours", "yourself", "yourselves"};
}

std::vector<std::string> tokenize(std::string_view text, bool strip_suffixes) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && !is_letter(static_cast<unsigned char>(text[i]))) ++i;
        std::size_t j = i;
        while (j < text.size() && is_letter(static_cast<unsigned char>(text[j]))) ++j;
        if (j > i) {
            std::string token(text.substr(i, j - i));
            for (auto& ch : token) {
                if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
            }
            tokens.push_back(strip_suffixes ? strip_suffix(std::move(token)) : std::move(token));
        }
        i = j;
    }
    return tokens;
}

PreprocessResult preprocess(const std::vector<RawDocument>& raw_docs, const PreprocessConfig& config,
                            std::string name) {
    require(!raw_docs.empty(), ErrorCode::EmptyCorpus, "no documents to preprocess");
    require(config.min_df >= 1, ErrorCode::InvalidArgument, "min_df must be >= 1");
    require(config.max_df_fraction > 0.0 && config.max_df_fraction <= 1.0, ErrorCode::InvalidArgument,
            "max_df_fraction must lie in (0, 1]");

    const std::size_t m = raw_docs.size();
    std::vector<std::map<std::string, int>> counts(m);
    std::map<std::string, int> document_frequency;
    for (std::size_t d = 0; d < m; ++d) {
        for (auto& token : tokenize(raw_docs[d].text, config.strip_suffixes)) {
            if (config.stopwords.count(token)) continue;
            ++counts[d][token];
        }
        for (const auto& [term, _] : counts[d]) ++document_frequency[term];
    }

    const double max_df = config.max_df_fraction * static_cast<double>(m);
    std::map<std::string, int> column;
    std::vector<std::string> vocabulary;
    for (const auto& [term, df] : document_frequency) {
        if (df >= config.min_df && static_cast<double>(df) <= max_df + 1e-9) {
            column.emplace(term, static_cast<int>(vocabulary.size()));
            vocabulary.push_back(term);
        }
    }
    require(!vocabulary.empty(), ErrorCode::EmptyVocabulary, "all terms were filtered out");

    std::vector<Eigen::Triplet<double>> triplets;
    std::vector<std::string> ids, labels;
    for (std::size_t d = 0; d < m; ++d) {
        ids.push_back(raw_docs[d].doc_id);
        labels.push_back(raw_docs[d].label);
        for (const auto& [term, n] : counts[d]) {
            auto it = column.find(term);
            if (it != column.end()) triplets.emplace_back(static_cast<int>(d), it->second, n);
        }
    }

    PreprocessResult result;
    result.corpus = assemble(std::move(name), std::move(ids), std::move(labels), std::move(vocabulary),
                             std::move(triplets));
    const auto& dtm = result.corpus.dtm;
    for (Eigen::Index r = 0; r < dtm.rows(); ++r) {
        if (dtm.outerIndexPtr()[r + 1] == dtm.outerIndexPtr()[r]) {
            result.empty_documents.push_back(result.corpus.doc_ids[static_cast<std::size_t>(r)]);
        }
    }
    return result;
}

Corpus load_corpus(const fs::path& path, CorpusFormat format, const PreprocessConfig& config,
                   std::vector<std::string>* empty_documents) {
    require(fs::exists(path), ErrorCode::Io, "path does not exist: " + path.string());
    const std::string name = path.filename().empty() ? path.parent_path().filename().string()
                                                     : path.filename().string();

    if (format == CorpusFormat::LabelDirectories) {
        std::vector<fs::path> class_dirs;
        for (const auto& entry : fs::directory_iterator(path)) {
            if (entry.is_directory() && entry.path().filename().string().front() != '.') {
                class_dirs.push_back(entry.path());
            }
        }
        std::sort(class_dirs.begin(), class_dirs.end());
        require(!class_dirs.empty(), ErrorCode::EmptyCorpus, "no label subdirectories in " + path.string());

        std::vector<RawDocument> docs;
        for (const auto& dir : class_dirs) {
            const std::string label = dir.filename().string();
            std::vector<fs::path> files;
            for (const auto& entry : fs::directory_iterator(dir)) {
                if (entry.is_regular_file() && entry.path().filename().string().front() != '.') {
                    files.push_back(entry.path());
                }
            }
            std::sort(files.begin(), files.end());
            require(!files.empty(), ErrorCode::EmptyCorpus, "label directory " + label + " holds no files");
            for (const auto& f : files) {
                docs.push_back({label + "/" + f.filename().string(), label, text::read_file(f)});
            }
        }
        auto result = preprocess(docs, config, name);
        if (empty_documents) *empty_documents = result.empty_documents;
        return std::move(result.corpus);
    }

    const auto matrix_lines = text::lines(text::read_file(path / "matrix.txt"));
    const auto vocab_lines = text::lines(text::read_file(path / "vocab.txt"));
    const auto label_lines = text::lines(text::read_file(path / "labels.txt"));
    require(!matrix_lines.empty(), ErrorCode::Parse, "matrix.txt is empty");

    const auto header = text::fields(matrix_lines[0]);
    require(header.size() == 3, ErrorCode::Parse, "matrix.txt header must be 'm n nnz'");
    const auto m = text::parse_int(header[0], "matrix.txt header");
    const auto n = text::parse_int(header[1], "matrix.txt header");
    const auto nnz = text::parse_int(header[2], "matrix.txt header");
    require(m > 0, ErrorCode::EmptyCorpus, "matrix.txt declares zero documents");
    require(n >= 0 && nnz >= 0, ErrorCode::Parse, "negative dimensions in matrix.txt");
    require(static_cast<long long>(matrix_lines.size()) >= nnz + 1, ErrorCode::DimensionMismatch,
            "matrix.txt has fewer entries than nnz");
    require(static_cast<long long>(vocab_lines.size()) == n, ErrorCode::DimensionMismatch,
            "vocab.txt has " + std::to_string(vocab_lines.size()) + " terms, matrix declares " + std::to_string(n));
    require(static_cast<long long>(label_lines.size()) == m, ErrorCode::DimensionMismatch,
            "labels.txt has " + std::to_string(label_lines.size()) + " rows, matrix declares " + std::to_string(m));

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(nnz));
    for (long long e = 1; e <= nnz; ++e) {
        const auto f = text::fields(matrix_lines[static_cast<std::size_t>(e)]);
        require(f.size() == 3, ErrorCode::Parse, "matrix.txt line " + std::to_string(e + 1) + " needs 3 fields");
        const auto row = text::parse_int(f[0], "matrix.txt");
        const auto col = text::parse_int(f[1], "matrix.txt");
        const double value = text::parse_double(f[2], "matrix.txt");
        require(row >= 0 && row < m && col >= 0 && col < n, ErrorCode::DimensionMismatch,
                "matrix.txt entry out of range on line " + std::to_string(e + 1));
        require(value >= 0.0 && std::isfinite(value), ErrorCode::Parse, "negative count in matrix.txt");
        triplets.emplace_back(static_cast<int>(row), static_cast<int>(col), value);
    }
    for (auto i = static_cast<std::size_t>(nnz) + 1; i < matrix_lines.size(); ++i) {
        require(text::fields(matrix_lines[i]).empty(), ErrorCode::DimensionMismatch,
                "matrix.txt has more entries than nnz");
    }

    std::vector<std::string> ids, labels;
    for (const auto& line : label_lines) {
        auto tab = line.find('\t');
        require(tab != std::string::npos, ErrorCode::Parse, "labels.txt line lacks a TAB: " + line);
        ids.push_back(line.substr(0, tab));
        labels.push_back(line.substr(tab + 1));
    }
    return assemble(name, std::move(ids), std::move(labels),
                    std::vector<std::string>(vocab_lines.begin(), vocab_lines.end()), std::move(triplets));
}

void write_dtm_files(const Corpus& corpus, const fs::path& dir) {
    fs::create_directories(dir);
    std::string matrix = std::to_string(corpus.dtm.rows()) + " " + std::to_string(corpus.dtm.cols()) + " " +
                         std::to_string(corpus.dtm.nonZeros()) + "\n";
    for (Eigen::Index r = 0; r < corpus.dtm.outerSize(); ++r) {
        for (SparseMatrix::InnerIterator it(corpus.dtm, r); it; ++it) {
            matrix += std::to_string(r) + " " + std::to_string(it.col()) + " " + text::format_double(it.value()) + "\n";
        }
    }
    std::string vocab;
    for (const auto& t : corpus.vocabulary) vocab += t + "\n";
    std::string labels;
    for (std::size_t i = 0; i < corpus.num_docs(); ++i) {
        labels += corpus.doc_ids[i] + "\t" + corpus.label_names[static_cast<std::size_t>(corpus.labels[i])] + "\n";
    }
    text::write_file(dir / "matrix.txt", matrix);
    text::write_file(dir / "vocab.txt", vocab);
    text::write_file(dir / "labels.txt", labels);
}

SparseMatrix tfidf_weight(const Corpus& corpus) {
    const auto& dtm = corpus.dtm;
    const auto n = static_cast<std::size_t>(dtm.cols());
    std::vector<double> column_sum(n, 0.0);
    std::vector<int> document_frequency(n, 0);
    for (Eigen::Index r = 0; r < dtm.outerSize(); ++r) {
        for (SparseMatrix::InnerIterator it(dtm, r); it; ++it) {
            if (it.value() > 0.0) {
                column_sum[static_cast<std::size_t>(it.col())] += it.value();
                ++document_frequency[static_cast<std::size_t>(it.col())];
            }
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        require(column_sum[j] > 0.0, ErrorCode::ZeroColumn,
                "term '" + corpus.vocabulary[j] + "' never occurs; tf-idf is undefined");
    }

    const double m = static_cast<double>(dtm.rows());
    SparseMatrix weighted = dtm;
    for (Eigen::Index r = 0; r < weighted.outerSize(); ++r) {
        for (SparseMatrix::InnerIterator it(weighted, r); it; ++it) {
            const auto j = static_cast<std::size_t>(it.col());
            const double idf = std::log(m / static_cast<double>(document_frequency[j]));
            it.valueRef() = it.value() / column_sum[j] * idf;
        }
    }
    weighted.prune(0.0);
    weighted.makeCompressed();
    return weighted;
}

Corpus generate_synthetic_corpus(const SyntheticCorpusParams& p) {
    require(p.num_classes >= 1 && p.docs_per_class >= 1 && p.terms_per_class >= 2 && p.doc_length >= 1,
            ErrorCode::InvalidArgument, "synthetic corpus needs k>=1, docs_per_class>=1, terms_per_class>=2");
    require(p.noise >= 0.0 && p.noise < 1.0, ErrorCode::InvalidArgument, "noise must lie in [0, 1)");

    auto padded = [](int value, int width) {
        std::string s = std::to_string(value);
        return std::string(static_cast<std::size_t>(std::max(0, width - static_cast<int>(s.size()))), '0') + s;
    };
    const int class_width = static_cast<int>(std::to_string(p.num_classes - 1).size());
    const int term_width = static_cast<int>(std::to_string(p.terms_per_class - 1).size());
    const int doc_width = static_cast<int>(std::to_string(p.docs_per_class - 1).size());

    std::vector<std::string> vocabulary;
    for (int c = 0; c < p.num_classes; ++c) {
        for (int t = 0; t < p.terms_per_class; ++t) {
            vocabulary.push_back("c" + padded(c, class_width) + "t" + padded(t, term_width));
        }
    }
    const auto total_terms = static_cast<std::uint64_t>(vocabulary.size());
    const int block_tokens = static_cast<int>(std::lround((1.0 - p.noise) * p.doc_length));

    Rng rng(p.seed);
    std::vector<std::string> ids, labels;
    std::vector<Eigen::Triplet<double>> triplets;
    int row = 0;
    for (int c = 0; c < p.num_classes; ++c) {
        for (int d = 0; d < p.docs_per_class; ++d, ++row) {
            ids.push_back("c" + padded(c, class_width) + "d" + padded(d, doc_width));
            labels.push_back("class" + padded(c, class_width));
            std::map<int, int> counts;
            for (int t = 0; t < block_tokens; ++t) {
                // The first slots of a class sweep the block so every term occurs.
                const long slot = static_cast<long>(d) * block_tokens + t;
                const int term = slot < p.terms_per_class
                                     ? static_cast<int>(slot)
                                     : static_cast<int>(rng.below(static_cast<std::uint64_t>(p.terms_per_class)));
                ++counts[c * p.terms_per_class + term];
            }
            for (int t = block_tokens; t < p.doc_length; ++t) ++counts[static_cast<int>(rng.below(total_terms))];
            for (const auto& [col, n] : counts) triplets.emplace_back(row, col, n);
        }
    }
    return assemble("synthetic", std::move(ids), std::move(labels), std::move(vocabulary), std::move(triplets));
}

}  // namespace docspace
