#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

namespace docspace {

/// Row-major sparse document-term matrix (documents are rows).
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct Corpus {
    std::string name;
    SparseMatrix dtm;
    std::vector<std::string> vocabulary;
    std::vector<std::string> doc_ids;
    /// Distinct class names, sorted; `labels[i]` indexes into this list.
    std::vector<std::string> label_names;
    std::vector<int> labels;

    std::size_t num_docs() const { return doc_ids.size(); }
    std::size_t num_terms() const { return vocabulary.size(); }
    std::size_t num_classes() const { return label_names.size(); }

    friend bool operator==(const Corpus& a, const Corpus& b);
};

/// Throws if the stored dimensions, labels, or vocabulary are inconsistent.
void validate(const Corpus& corpus);

struct PreprocessConfig {
    std::set<std::string> stopwords = default_stopwords();
    int min_df = 1;
    double max_df_fraction = 1.0;
    /// Crude plural/verb suffix stripping ("ies"->"y", "ing", "ed", trailing "s").
    bool strip_suffixes = false;

    static std::set<std::string> default_stopwords();
};

struct RawDocument {
    std::string doc_id;
    std::string label;
    std::string text;
};

struct PreprocessResult {
    Corpus corpus;
    /// Documents whose rows are all-zero after filtering. They are kept.
    std::vector<std::string> empty_documents;
};

/// Lowercased alphabetic runs. Bytes >= 0x80 count as letters so UTF-8 words stay whole.
std::vector<std::string> tokenize(std::string_view text, bool strip_suffixes = false);

PreprocessResult preprocess(const std::vector<RawDocument>& raw_docs, const PreprocessConfig& config,
                            std::string name = {});

enum class CorpusFormat { LabelDirectories, DtmFiles };

/// Loads a corpus; documents are ordered lexicographically by doc_id.
Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format,
                   const PreprocessConfig& config = {},
                   std::vector<std::string>* empty_documents = nullptr);

/// Writes matrix.txt, vocab.txt and labels.txt into `dir` (created if missing).
void write_dtm_files(const Corpus& corpus, const std::filesystem::path& dir);

/// tf-idf per term/document: n(w,d) / sum_d' n(w,d') * ln(m / df(w)).
SparseMatrix tfidf_weight(const Corpus& corpus);

struct SyntheticCorpusParams {
    int num_classes = 3;
    int docs_per_class = 50;
    int terms_per_class = 20;
    double noise = 0.1;
    int doc_length = 80;
    std::uint64_t seed = 1;
};

/// Vocabulary is `num_classes` disjoint blocks; a document takes round((1-noise)*doc_length)
/// tokens from its own block and the rest uniformly from the whole vocabulary.
Corpus generate_synthetic_corpus(const SyntheticCorpusParams& params);

}  // namespace docspace
