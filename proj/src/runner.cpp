#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <future>
#include <mutex>
#include <new>
#include <set>
#include <thread>
#include <unordered_map>

#include "docspace/deadline.hpp"
#include "docspace/error.hpp"
#include "docspace/random.hpp"
#include "docspace/runner.hpp"
#include "docspace/text_io.hpp"

namespace docspace {

namespace {

using Clock = std::chrono::steady_clock;

bool uses_topics(TopicModel tm) { return tm == TopicModel::LSI || tm == TopicModel::NMF || tm == TopicModel::LDA; }

std::string fit_key(const LayoutConfig& c) {
    return c.dataset + "|" + std::string(to_string(c.tm)) + "|" + symbol(c.tfidf) + "|" +
           (c.topics ? std::to_string(*c.topics) : "");
}

DocumentRepresentation fit_for(const Dataset& dataset, const LayoutConfig& c, const ModelParams& model,
                               std::uint64_t seed) {
    ModelParams params = model;
    params.topics = c.topics.value_or(0);
    if (c.tm == TopicModel::EXT && dataset.embedding) params.embedding = dataset.embedding;
    return fit_representation(dataset.corpus, c.tm, c.tfidf == Toggle::On, params, seed);
}

// Projects the K topic vectors and places documents as convex combinations of them.
Layout topic_combination_layout(const DocumentRepresentation& rep, const DRParams& dr) {
    require(rep.topic_term.has_value(), ErrorCode::InvalidArgument, "linear combination needs topic vectors");
    const Eigen::MatrixXd& topics = *rep.topic_term;
    const auto k = topics.rows();
    const Metric metric = rep.model == TopicModel::LDA ? Metric::JensenShannon : Metric::Cosine;

    DRParams params = dr;
    if (params.method == Reduction::TSNE) {
        const double cap = std::floor(static_cast<double>(k - 1) / 3.0);
        params.tsne.perplexity = std::max(2.0, std::min(params.tsne.perplexity, cap));
        require(params.tsne.perplexity < static_cast<double>(k - 1), ErrorCode::PerplexityInfeasible,
                "K=" + std::to_string(k) + " topics are too few for t-SNE");
    }
    Layout topic_layout;
    if (params.method == Reduction::SOM) {
        DocumentRepresentation topic_rep;
        topic_rep.matrix = topics;
        topic_rep.metric = metric;
        topic_layout = project(topic_rep, params);
    } else {
        topic_layout = project(pairwise_distances(topics, metric), params);
    }
    // LSI document coordinates are signed; their magnitudes serve as topic weights.
    const Eigen::MatrixXd theta = rep.model == TopicModel::LSI ? Eigen::MatrixXd(rep.matrix.cwiseAbs()) : rep.matrix;
    return linear_combination_layout(topic_layout.positions, theta);
}

DistanceMatrix reference_distances(const Dataset& dataset, const LayoutConfig& c, const DocumentRepresentation& rep) {
    if (c.reference_space == ReferenceSpace::TmSpace) return pairwise_distances(rep);
    const bool weighted = c.tfidf == Toggle::On;
    const Eigen::MatrixXd vsm = weighted ? Eigen::MatrixXd(tfidf_weight(dataset.corpus)) : Eigen::MatrixXd(dataset.corpus.dtm);
    return pairwise_distances(vsm, Metric::Cosine);
}

SingleLayout layout_from_representation(const Dataset& dataset, const LayoutConfig& c,
                                        const DocumentRepresentation& rep, const EvaluationOptions& evaluation) {
    SingleLayout out;
    std::optional<DistanceMatrix> native;
    if (c.lincomb == Toggle::On) {
        out.layout = topic_combination_layout(rep, c.dr);
    } else if (c.dr.method == Reduction::SOM) {
        out.layout = project(rep, c.dr);
    } else {
        require(rep.matrix.rows() >= 4, ErrorCode::InvalidArgument, "projection needs at least 4 points");
        if (c.dr.method == Reduction::TSNE) {
            require(c.dr.tsne.perplexity < static_cast<double>(rep.matrix.rows() - 1), ErrorCode::PerplexityInfeasible,
                    "perplexity " + text::format_double(c.dr.tsne.perplexity) + " infeasible for " +
                        std::to_string(rep.matrix.rows()) + " points");
        }
        native = pairwise_distances(rep);
        out.layout = project(*native, c.dr);
    }
    out.layout.config_ref = encode_config_id(c);
    check_deadline();

    const DistanceMatrix high = native && c.reference_space == ReferenceSpace::TmSpace
                                    ? std::move(*native)
                                    : reference_distances(dataset, c, rep);
    EvaluationOptions eval = evaluation;
    eval.seed = c.dr.seed;
    out.metrics = evaluate_layout(high, out.layout.positions, dataset.corpus.labels, eval);
    return out;
}

std::size_t predicted_bytes(const Dataset& dataset) {
    const auto m = static_cast<std::size_t>(dataset.corpus.dtm.rows());
    const auto n = static_cast<std::size_t>(dataset.corpus.dtm.cols());
    return sizeof(double) * (3 * m * m + m * n);
}

void write_atomically(const std::vector<QualityRecord>& rows, const std::filesystem::path& path) {
    auto tmp = path;
    tmp += ".tmp";
    write_results_csv(rows, tmp);
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    require(!ec, ErrorCode::Io, "cannot replace " + path.string() + ": " + ec.message());
}

// Fits shared by every job of one (dataset, tm, tfidf, K) cell; computed once on first use.
class FitCache {
public:
    FitCache(const std::map<std::string, Dataset>& corpora, const ModelParams& model, std::uint64_t global_seed)
        : corpora_(corpora), model_(model), global_seed_(global_seed) {}

    std::shared_future<DocumentRepresentation> get(const LayoutConfig& c) {
        const auto key = fit_key(c);
        std::promise<DocumentRepresentation> promise;
        {
            std::lock_guard lock(mutex_);
            auto it = fits_.find(key);
            if (it != fits_.end()) return it->second;
            fits_.emplace(key, promise.get_future().share());
        }
        try {
            ScopedDeadline no_deadline(std::nullopt);
            promise.set_value(fit_for(corpora_.at(c.dataset), c, model_, topic_model_seed(global_seed_, c)));
        } catch (...) {
            promise.set_exception(std::current_exception());
        }
        std::lock_guard lock(mutex_);
        return fits_.at(key);
    }

private:
    const std::map<std::string, Dataset>& corpora_;
    const ModelParams& model_;
    std::uint64_t global_seed_;
    std::mutex mutex_;
    std::unordered_map<std::string, std::shared_future<DocumentRepresentation>> fits_;
};

QualityRecord run_job(const std::map<std::string, Dataset>& corpora, const LayoutConfig& c, FitCache& cache,
                      const RunOptions& options) {
    QualityRecord record;
    record.config = c;
    const Dataset& dataset = corpora.at(c.dataset);
    try {
        if (options.memory_limit_bytes && predicted_bytes(dataset) > *options.memory_limit_bytes) {
            fail(ErrorCode::MemoryLimit, "predicted working set exceeds the memory ceiling");
        }
        const DocumentRepresentation& rep = cache.get(c).get();
        const auto start = Clock::now();
        std::optional<Clock::time_point> deadline;
        if (options.job_timeout_s) {
            deadline = start + std::chrono::duration_cast<Clock::duration>(
                                   std::chrono::duration<double>(*options.job_timeout_s));
        }
        ScopedDeadline scope(deadline);
        auto result = layout_from_representation(dataset, c, rep, options.evaluation);
        record.metrics = result.metrics;
        if (options.record_runtime) record.runtime_s = std::chrono::duration<double>(Clock::now() - start).count();
    } catch (const Error& e) {
        record.status = "failed:" + std::string(error_slug(e.code()));
    } catch (const std::bad_alloc&) {
        record.status = "failed:" + std::string(error_slug(ErrorCode::MemoryLimit));
    } catch (const std::exception&) {
        record.status = "failed:internal";
    }
    if (!record.ok()) record.metrics.reset();
    return record;
}

std::vector<QualityRecord> finalize(std::vector<QualityRecord> rows) {
    std::stable_sort(rows.begin(), rows.end(),
                     [](const QualityRecord& a, const QualityRecord& b) { return identity_less(a.config, b.config); });
    std::vector<QualityRecord> out;
    for (auto& r : rows) {
        if (!out.empty() && !identity_less(out.back().config, r.config)) continue;
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace

std::vector<int> DrGrid::default_mds_max_iter() {
    std::vector<int> v;
    for (int it = 300; it <= 900; it += 20) v.push_back(it);
    return v;
}

std::uint64_t topic_model_seed(std::uint64_t global_seed, const LayoutConfig& config) {
    return derive_seed(global_seed, fit_key(config));
}

std::vector<LayoutConfig> expand_grid(const std::vector<std::string>& datasets, const std::vector<TopicModel>& tms,
                                      const ExpandOptions& o) {
    require(!datasets.empty() && !tms.empty(), ErrorCode::InvalidArgument, "expand_grid needs datasets and models");
    const auto& g = o.grid;
    std::vector<LayoutConfig> out;
    for (const auto& name : datasets) {
        for (TopicModel tm : tms) {
            std::optional<int> topics;
            if (uses_topics(tm)) {
                auto it = o.topics.find(name);
                const int k = it != o.topics.end() ? it->second : o.default_topics;
                require(k >= 1, ErrorCode::InvalidArgument,
                        "no topic count given for dataset '" + name + "' and model " + std::string(to_string(tm)));
                topics = k;
            }
            for (Toggle tfidf : o.tfidf) {
                for (Toggle lincomb : o.lincomb) {
                    LayoutConfig base;
                    base.dataset = name;
                    base.tm = tm;
                    base.tfidf = tfidf;
                    base.lincomb = lincomb;
                    base.topics = topics;
                    base.reference_space = o.reference_space;
                    if (!is_valid(base)) continue;

                    auto add = [&](const DRParams& dr) {
                        LayoutConfig c = base;
                        c.dr = dr;
                        c.dr.seed = derive_seed(o.global_seed, identity_key(c));
                        validate(c);
                        out.push_back(std::move(c));
                    };
                    for (Reduction method : o.drs) {
                        DRParams dr;
                        dr.method = method;
                        switch (method) {
                            case Reduction::TSNE:
                                for (double lr : g.tsne_learning_rate)
                                    for (int it : g.tsne_n_iter)
                                        for (double p : g.tsne_perplexity) {
                                            dr.tsne = {p, it, lr};
                                            add(dr);
                                        }
                                if (o.include_tsne_default) {
                                    dr.tsne = TsneParams{};
                                    add(dr);
                                }
                                break;
                            case Reduction::UMAP:
                                for (double md : g.umap_min_dist)
                                    for (int nn : g.umap_n_neighbors) {
                                        dr.umap = {nn, md, g.umap_n_epochs};
                                        add(dr);
                                    }
                                break;
                            case Reduction::SOM:
                                for (int gm : g.som_m)
                                    for (int gn : g.som_n) {
                                        dr.som = {gm, gn, g.som_epochs};
                                        add(dr);
                                    }
                                break;
                            case Reduction::MDS:
                                for (int it : g.mds_max_iter) {
                                    dr.mds = {it};
                                    add(dr);
                                }
                                break;
                        }
                    }
                }
            }
        }
    }
    require(!out.empty(), ErrorCode::InvalidArgument, "grid expansion produced no valid configurations");
    Rng rng(derive_seed(o.global_seed, "job-order"));
    rng.shuffle(out.begin(), out.end());
    return out;
}

SingleLayout compute_layout(const Dataset& dataset, const LayoutConfig& config, const ModelParams& model,
                            std::uint64_t tm_seed, const EvaluationOptions& evaluation) {
    validate(config);
    const auto rep = fit_for(dataset, config, model, tm_seed);
    return layout_from_representation(dataset, config, rep, evaluation);
}

std::vector<QualityRecord> run_benchmark(const std::map<std::string, Dataset>& corpora,
                                         const std::vector<LayoutConfig>& configs, const RunOptions& options) {
    require(!options.out.empty(), ErrorCode::InvalidArgument, "no output path given");
    require(options.parallelism >= 1, ErrorCode::InvalidArgument, "parallelism must be >= 1");
    for (const auto& c : configs) {
        require(corpora.count(c.dataset) == 1, ErrorCode::UnknownDataset, "unknown dataset '" + c.dataset + "'");
        validate(c);
    }

    std::vector<QualityRecord> existing;
    if (options.resume && std::filesystem::exists(options.out)) {
        existing = read_results_csv(options.out, true);
    }
    // Rewriting drops a torn trailing line before new rows are appended.
    write_atomically(existing, options.out);

    std::set<std::string> done;
    for (const auto& r : existing) done.insert(identity_key(r.config));
    std::vector<const LayoutConfig*> pending;
    for (const auto& c : configs) {
        if (done.insert(identity_key(c)).second) pending.push_back(&c);
    }

    std::ofstream sink(options.out, std::ios::app | std::ios::binary);
    require(static_cast<bool>(sink), ErrorCode::Io, "cannot append to " + options.out.string());

    FitCache cache(corpora, options.model, options.global_seed);
    std::atomic<std::size_t> next{0};
    std::mutex write_mutex;
    std::size_t written = 0;
    bool stopped = false;
    std::vector<QualityRecord> fresh;

    auto worker = [&] {
        while (true) {
            {
                std::lock_guard lock(write_mutex);
                if (stopped) return;
            }
            const std::size_t i = next.fetch_add(1);
            if (i >= pending.size()) return;
            auto record = run_job(corpora, *pending[i], cache, options);
            std::lock_guard lock(write_mutex);
            if (stopped) return;
            sink << format_record(record) << '\n';
            sink.flush();
            fresh.push_back(std::move(record));
            if (options.max_new_jobs && ++written >= *options.max_new_jobs) stopped = true;
        }
    };

    const int threads = std::min<int>(options.parallelism, static_cast<int>(std::max<std::size_t>(pending.size(), 1)));
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    sink.close();
    require(!sink.fail(), ErrorCode::Io, "failed writing " + options.out.string());

    existing.insert(existing.end(), std::make_move_iterator(fresh.begin()), std::make_move_iterator(fresh.end()));
    if (stopped) return existing;
    auto table = finalize(std::move(existing));
    write_atomically(table, options.out);
    return table;
}

}  // namespace docspace
