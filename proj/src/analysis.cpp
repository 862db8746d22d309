#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <tuple>

#include "docspace/analysis.hpp"
#include "docspace/error.hpp"
#include "docspace/text_io.hpp"

namespace docspace {

namespace {

void check_unit(double v, const char* what) {
    if (!(v >= -1e-12 && v <= 1.0 + 1e-12)) throw std::logic_error(std::string(what) + " outside [0,1]");
}

double round2(double v) { return std::round(v * 100.0) / 100.0; }

std::string group_key(const LayoutConfig& c) {
    return c.dataset + "," + std::string(to_string(c.tm)) + "," + symbol(c.tfidf);
}

// Identity without hyperparameters: dataset, tm, tfidf, K, dr, lincomb, reference space.
std::string cell_key(const LayoutConfig& c) {
    return group_key(c) + "," + (c.topics ? std::to_string(*c.topics) : "") + "," + std::string(to_string(c.dr.method)) +
           "," + symbol(c.lincomb) + "," + std::string(to_string(c.reference_space));
}

std::string cell(double v) { return std::isnan(v) ? std::string() : text::format_double(v); }

int find_root(std::array<int, 8>& parent, int i) {
    while (parent[static_cast<std::size_t>(i)] != i) i = parent[static_cast<std::size_t>(i)];
    return i;
}

}  // namespace

double aggregate_alpha(double trust, double cont, double shepard, double nh) {
    const double alpha = 0.5 * nh + 0.5 * ((trust + cont + 0.5 * (shepard + 1.0)) / 3.0);
    check_unit(alpha, "alpha");
    return alpha;
}

double aggregate_beta(double beta_db, double beta_ch, double silhouette, double dsc) {
    const double beta = (1.0 - beta_db) / 3.0 + beta_ch / 3.0 + ((0.5 * (silhouette + 1.0) + dsc) / 2.0) / 3.0;
    check_unit(beta, "beta");
    return beta;
}

std::vector<AggregatedRecord> normalize_group_metrics(const std::vector<QualityRecord>& results) {
    std::map<std::string, std::pair<double, double>> maxima;  // group -> (max ch, max finite db)
    std::map<std::string, bool> has_finite;
    for (const auto& r : results) {
        if (!r.ok()) continue;
        auto [it, _] = maxima.try_emplace(group_key(r.config), 0.0, 0.0);
        auto& flag = has_finite[group_key(r.config)];
        const auto& m = *r.metrics;
        if (std::isfinite(m.ch_raw) && std::isfinite(m.db_raw)) flag = true;
        if (std::isfinite(m.ch_raw)) it->second.first = std::max(it->second.first, m.ch_raw);
        if (std::isfinite(m.db_raw)) it->second.second = std::max(it->second.second, m.db_raw);
    }
    for (const auto& [group, ok] : has_finite) {
        require(ok, ErrorCode::Degenerate, "group " + group + " has no row with finite CH and DB");
    }

    std::vector<AggregatedRecord> out;
    for (const auto& r : results) {
        if (!r.ok()) continue;
        const auto& m = *r.metrics;
        const auto [ch_max, db_max] = maxima.at(group_key(r.config));
        AggregatedRecord a;
        a.record = r;
        a.beta_ch = std::isfinite(m.ch_raw) ? (ch_max > 0.0 ? m.ch_raw / ch_max : 0.0) : 1.0;
        a.beta_db = std::isfinite(m.db_raw) ? (db_max > 0.0 ? m.db_raw / db_max : 0.0) : 1.0;
        a.alpha = aggregate_alpha(m.trust, m.cont, m.shepard, m.nh);
        a.beta = aggregate_beta(a.beta_db, a.beta_ch, m.silhouette, m.dsc);
        out.push_back(std::move(a));
    }
    return out;
}

std::string_view to_string(Score s) { return s == Score::Alpha ? "alpha" : "beta"; }

double score_of(const AggregatedRecord& r, Score s) { return s == Score::Alpha ? r.alpha : r.beta; }

std::string_view to_string(CorrelationType t) { return t == CorrelationType::Pearson ? "pearson" : "spearman"; }

std::string_view to_string(ToggleColumn t) { return t == ToggleColumn::Tfidf ? "tfidf" : "lincomb"; }

CorrelationReport metric_correlations(const Eigen::MatrixXd& columns, double threshold, CorrelationType type) {
    require(columns.cols() == 8, ErrorCode::DimensionMismatch, "expected 8 metric columns");
    require(columns.rows() >= 3, ErrorCode::InvalidArgument, "correlations need at least 3 rows");
    CorrelationReport rep;
    rep.type = type;
    rep.threshold = threshold;
    std::vector<std::vector<double>> cols(8);
    std::array<bool, 8> constant{};
    for (int c = 0; c < 8; ++c) {
        cols[static_cast<std::size_t>(c)].assign(columns.col(c).data(), columns.col(c).data() + columns.rows());
        constant[static_cast<std::size_t>(c)] = columns.col(c).maxCoeff() == columns.col(c).minCoeff();
    }
    for (int a = 0; a < 8; ++a) {
        for (int b = 0; b < 8; ++b) {
            if (constant[static_cast<std::size_t>(a)] || constant[static_cast<std::size_t>(b)]) {
                rep.matrix(a, b) = std::numeric_limits<double>::quiet_NaN();
            } else if (a == b) {
                rep.matrix(a, b) = 1.0;
            } else if (b < a) {
                rep.matrix(a, b) = rep.matrix(b, a);
            } else {
                const auto& x = cols[static_cast<std::size_t>(a)];
                const auto& y = cols[static_cast<std::size_t>(b)];
                rep.matrix(a, b) = type == CorrelationType::Pearson ? pearson(x, y) : spearman(x, y);
            }
        }
    }

    std::array<int, 8> parent{};
    std::iota(parent.begin(), parent.end(), 0);
    for (int a = 0; a < 8; ++a) {
        for (int b = a + 1; b < 8; ++b) {
            if (rep.matrix(a, b) >= threshold) {
                const int ra = find_root(parent, a), rb = find_root(parent, b);
                parent[static_cast<std::size_t>(std::max(ra, rb))] = std::min(ra, rb);
            }
        }
    }
    std::map<int, int> ids;
    for (int c = 0; c < 8; ++c) {
        if (constant[static_cast<std::size_t>(c)]) {
            rep.group[static_cast<std::size_t>(c)] = -1;
            continue;
        }
        const int root = find_root(parent, c);
        auto [it, _] = ids.try_emplace(root, static_cast<int>(ids.size()));
        rep.group[static_cast<std::size_t>(c)] = it->second;
    }
    return rep;
}

CorrelationReport metric_correlations(const std::vector<AggregatedRecord>& rows, double threshold,
                                      CorrelationType type) {
    Eigen::MatrixXd columns(static_cast<Eigen::Index>(rows.size()), 8);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& m = *rows[i].record.metrics;
        columns.row(static_cast<Eigen::Index>(i)) << m.trust, m.cont, m.shepard, m.nh, m.dsc, m.silhouette,
            rows[i].beta_ch, 1.0 - rows[i].beta_db;
    }
    return metric_correlations(columns, threshold, type);
}

std::vector<SignTestRow> paired_sign_test(const std::vector<AggregatedRecord>& rows, ToggleColumn toggle,
                                          Score score) {
    // pair identity -> (score with +, score with -)
    std::map<std::string, std::pair<std::optional<double>, std::optional<double>>> pairs;
    std::map<std::string, std::string> dataset_of;
    for (const auto& r : rows) {
        LayoutConfig c = r.record.config;
        Toggle& t = toggle == ToggleColumn::Tfidf ? c.tfidf : c.lincomb;
        if (t == Toggle::NotApplicable) continue;
        const bool on = t == Toggle::On;
        t = Toggle::On;
        const auto key = identity_key(c);
        auto& slot = pairs[key];
        (on ? slot.first : slot.second) = score_of(r, score);
        dataset_of[key] = c.dataset;
    }
    std::map<std::string, std::pair<std::int64_t, std::int64_t>> counts;
    std::int64_t total_n = 0, total_k = 0;
    for (const auto& [key, p] : pairs) {
        if (!p.first || !p.second) continue;
        auto& [n, k] = counts[dataset_of.at(key)];
        const bool improved = *p.first > *p.second;
        ++n;
        ++total_n;
        if (improved) {
            ++k;
            ++total_k;
        }
    }
    require(total_n > 0, ErrorCode::NoPairs, "no matched pairs for the " + std::string(to_string(toggle)) + " toggle");
    std::vector<SignTestRow> out;
    for (const auto& [dataset, nk] : counts) {
        out.push_back({dataset, nk.first, nk.second, binomial_sign_test(nk.first, nk.second)});
    }
    out.push_back({"Total", total_n, total_k, binomial_sign_test(total_n, total_k)});
    return out;
}

std::vector<BestResult> best_results(const std::vector<AggregatedRecord>& rows, Score score) {
    std::map<std::string, BestResult> best;
    for (const auto& r : rows) {
        const double v = round2(score_of(r, score));
        auto [it, fresh] = best.try_emplace(r.record.config.dataset);
        auto& b = it->second;
        if (fresh || v > b.value) {
            b.dataset = r.record.config.dataset;
            b.value = v;
            b.config_ids.clear();
        }
        if (v == b.value) b.config_ids.push_back(encode_config_id(r.record.config));
    }
    std::vector<BestResult> out;
    for (auto& [_, b] : best) {
        std::sort(b.config_ids.begin(), b.config_ids.end());
        b.config_ids.erase(std::unique(b.config_ids.begin(), b.config_ids.end()), b.config_ids.end());
        out.push_back(std::move(b));
    }
    return out;
}

FiveNumber five_number_summary(std::vector<double> values) {
    require(!values.empty(), ErrorCode::InvalidArgument, "five-number summary of an empty set");
    std::sort(values.begin(), values.end());
    auto quantile = [&](double p) {
        const double pos = p * static_cast<double>(values.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, values.size() - 1);
        return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
    };
    return {values.front(), quantile(0.25), quantile(0.5), quantile(0.75), values.back()};
}

std::vector<SummaryRow> five_number_summaries(const std::vector<AggregatedRecord>& rows, Score score) {
    std::map<std::tuple<int, int, int, int>, std::pair<std::string, std::vector<double>>> groups;
    for (const auto& r : rows) {
        const auto& c = r.record.config;
        auto& g = groups[{static_cast<int>(c.tm), static_cast<int>(c.tfidf), static_cast<int>(c.dr.method),
                          static_cast<int>(c.lincomb)}];
        g.first = encode_config_id(c);
        g.second.push_back(score_of(r, score));
    }
    std::vector<SummaryRow> out;
    for (auto& [_, g] : groups) out.push_back({g.first, g.second.size(), five_number_summary(g.second)});
    return out;
}

bool DefaultHyperparameters::matches(const DRParams& dr) const {
    switch (dr.method) {
        case Reduction::TSNE:
            return dr.tsne.perplexity == tsne.perplexity && dr.tsne.n_iter == tsne.n_iter &&
                   dr.tsne.learning_rate == tsne.learning_rate;
        case Reduction::UMAP:
            return dr.umap.n_neighbors == umap_n_neighbors && std::abs(dr.umap.min_dist - umap_min_dist) < 1e-12;
        case Reduction::MDS:
            return dr.mds.max_iter == mds_max_iter;
        case Reduction::SOM:
            return false;
    }
    return false;
}

std::vector<DefaultPercentile> default_percentiles(const std::vector<AggregatedRecord>& rows, Score score,
                                                   const DefaultHyperparameters& defaults,
                                                   std::vector<std::string>* missing) {
    struct Group {
        TopicModel tm;
        Reduction dr;
        std::vector<double> values;
        std::optional<double> reference;
    };
    std::map<std::string, Group> groups;
    for (const auto& r : rows) {
        const auto& c = r.record.config;
        if (c.dr.method == Reduction::SOM) continue;
        auto [it, _] = groups.try_emplace(cell_key(c), Group{c.tm, c.dr.method, {}, std::nullopt});
        const double v = score_of(r, score);
        it->second.values.push_back(v);
        if (defaults.matches(c.dr)) it->second.reference = v;
    }
    std::map<std::pair<int, int>, std::pair<double, std::size_t>> sums;
    for (const auto& [key, g] : groups) {
        if (!g.reference) {
            if (missing) missing->push_back(key);
            continue;
        }
        const auto better = std::count_if(g.values.begin(), g.values.end(), [&](double v) { return v > *g.reference; });
        auto& s = sums[{static_cast<int>(g.tm), static_cast<int>(g.dr)}];
        s.first += static_cast<double>(better) / static_cast<double>(g.values.size());
        ++s.second;
    }
    std::vector<DefaultPercentile> out;
    for (const auto& [key, s] : sums) {
        out.push_back({static_cast<TopicModel>(key.first), static_cast<Reduction>(key.second),
                       s.first / static_cast<double>(s.second), s.second});
    }
    return out;
}

std::vector<std::string> write_analysis_report(const std::vector<QualityRecord>& results,
                                               const std::filesystem::path& dir, const ReportOptions& options) {
    std::filesystem::create_directories(dir);
    std::vector<std::string> notes;
    const auto rows = normalize_group_metrics(results);
    const std::array<Score, 2> scores{Score::Alpha, Score::Beta};

    std::string aggregated = std::string(kResultsHeader) + ",beta_ch,beta_db,alpha,beta\n";
    for (const auto& r : rows) {
        aggregated += format_record(r.record) + "," + text::format_double(r.beta_ch) + "," +
                      text::format_double(r.beta_db) + "," + text::format_double(r.alpha) + "," +
                      text::format_double(r.beta) + "\n";
    }
    text::write_file(dir / "aggregated.csv", aggregated);

    std::string corr = "# correlation=" + std::string(to_string(options.correlation)) +
                       " threshold=" + text::format_double(options.correlation_threshold) + "\nmetric";
    for (auto name : kCorrelationColumns) corr += "," + std::string(name);
    corr += ",group\n";
    try {
        const auto rep = metric_correlations(rows, options.correlation_threshold, options.correlation);
        for (int a = 0; a < 8; ++a) {
            corr += std::string(kCorrelationColumns[static_cast<std::size_t>(a)]);
            for (int b = 0; b < 8; ++b) corr += "," + cell(rep.matrix(a, b));
            corr += "," + std::to_string(rep.group[static_cast<std::size_t>(a)]) + "\n";
        }
    } catch (const Error& e) {
        notes.push_back(std::string("correlations skipped: ") + e.what());
    }
    text::write_file(dir / "correlations.csv", corr);

    std::string signs = "toggle,dataset,n,k_alpha,p_value_alpha,conf_lower_alpha,k_beta,p_value_beta,conf_lower_beta\n";
    for (ToggleColumn toggle : {ToggleColumn::Tfidf, ToggleColumn::Lincomb}) {
        try {
            const auto a = paired_sign_test(rows, toggle, Score::Alpha);
            const auto b = paired_sign_test(rows, toggle, Score::Beta);
            for (std::size_t i = 0; i < a.size(); ++i) {
                signs += std::string(to_string(toggle)) + "," + a[i].dataset + "," + std::to_string(a[i].n) + "," +
                         std::to_string(a[i].k) + "," + text::format_double(a[i].test.p_value) + "," +
                         text::format_double(a[i].test.conf_lower) + "," + std::to_string(b[i].k) + "," +
                         text::format_double(b[i].test.p_value) + "," + text::format_double(b[i].test.conf_lower) +
                         "\n";
            }
        } catch (const Error& e) {
            notes.push_back(std::string("sign test skipped: ") + e.what());
        }
    }
    text::write_file(dir / "sign_tests.csv", signs);

    std::string best = "score,dataset,value,config_id\n";
    std::string summaries = "score,config_id,count,min,q1,median,q3,max\n";
    std::string defaults = "score,tm,dr,fraction,groups\n";
    for (Score s : scores) {
        const std::string name(to_string(s));
        for (const auto& b : best_results(rows, s)) {
            for (const auto& id : b.config_ids) {
                best += name + "," + b.dataset + "," + text::format_double(b.value) + ",\"" + id + "\"\n";
            }
        }
        for (const auto& r : five_number_summaries(rows, s)) {
            const auto& f = r.summary;
            summaries += name + ",\"" + r.config_id + "\"," + std::to_string(r.count) + "," + text::format_double(f.min) +
                         "," + text::format_double(f.q1) + "," + text::format_double(f.median) + "," +
                         text::format_double(f.q3) + "," + text::format_double(f.max) + "\n";
        }
        std::vector<std::string> missing;
        for (const auto& d : default_percentiles(rows, s, options.defaults, &missing)) {
            defaults += name + "," + std::string(to_string(d.tm)) + "," + std::string(to_string(d.dr)) + "," +
                        text::format_double(d.fraction) + "," + std::to_string(d.groups) + "\n";
        }
        if (s == Score::Alpha && !missing.empty()) {
            notes.push_back("default percentiles: " + std::to_string(missing.size()) + " groups lack a default row");
        }
    }
    text::write_file(dir / "best.csv", best);
    text::write_file(dir / "summaries.csv", summaries);
    text::write_file(dir / "default_percentiles.csv", defaults);
    return notes;
}

}  // namespace docspace
