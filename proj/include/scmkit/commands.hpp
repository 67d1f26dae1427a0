#ifndef SCMKIT_COMMANDS_HPP
#define SCMKIT_COMMANDS_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "scmkit/clustering.hpp"
#include "scmkit/corpus.hpp"
#include "scmkit/disambiguation.hpp"
#include "scmkit/error.hpp"
#include "scmkit/geometry.hpp"
#include "scmkit/metrics.hpp"
#include "scmkit/nsd.hpp"
#include "scmkit/prediction.hpp"
#include "scmkit/scm.hpp"
#include "scmkit/target_position.hpp"

// File-level commands behind the scmkit CLI.
namespace scmkit::commands
{

namespace fs = std::filesystem;

enum class Method { wsd, wsi, agglom, cluster2sense, outlier2cluster };

inline std::optional<Method> parse_method(std::string_view s)
{
    if (s == "wsd") return Method::wsd;
    if (s == "wsi") return Method::wsi;
    if (s == "agglom") return Method::agglom;
    if (s == "cluster2sense") return Method::cluster2sense;
    if (s == "outlier2cluster") return Method::outlier2cluster;
    return std::nullopt;
}

struct RunConfig {
    fs::path dataset;
    std::optional<fs::path> emb_a; // fine-tuned encoder space
    std::optional<fs::path> emb_b; // base encoder space
    Method method = Method::wsd;
    RelabelMode mode = RelabelMode::with_wsi;
    std::optional<fs::path> nsd_model;
    std::size_t k_extra = 0;
    std::optional<double> threshold;
    std::optional<fs::path> forms;
    std::optional<fs::path> predictions;
    std::optional<fs::path> pr_dir;
    fs::path out;
    std::size_t jobs = 1;
    SpaceRouting routing;
};

inline std::ifstream open_input(const fs::path &p)
{
    std::ifstream in(p);
    if (!in) {
        throw Error("cannot open " + p.string());
    }
    return in;
}

// Writes through a temporary sibling and renames, so `path` only ever holds a full file.
inline void write_file(const fs::path &path, const std::function<void(std::ostream &)> &body)
{
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) {
            throw Error("cannot write " + path.string());
        }
        body(out);
        out.flush();
        if (!out) {
            throw Error("failed writing " + path.string());
        }
    }
    fs::rename(tmp, path);
}

inline Dataset load_dataset(const fs::path &p)
{
    auto in = open_input(p);
    try {
        return parse_dataset(in);
    } catch (const ParseError &e) {
        throw Error(p.string() + ": " + e.what());
    }
}

inline EmbeddingTable load_table(const fs::path &p)
{
    auto in = open_input(p);
    try {
        return load_embeddings(in);
    } catch (const ParseError &e) {
        throw Error(p.string() + ": " + e.what());
    }
}

inline const fs::path &require(const std::optional<fs::path> &p, const char *flag, std::string_view why)
{
    if (!p) {
        throw Error(std::string(flag) + " is required " + std::string(why));
    }
    return *p;
}

// Runs fn(i) for i in [0, n) on `jobs` threads and returns results in index order.
template <typename T>
std::vector<T> parallel_map(std::size_t n, std::size_t jobs, const std::function<T(std::size_t)> &fn)
{
    std::vector<T> out(n);
    jobs = std::max<std::size_t>(1, std::min(jobs, n));
    if (jobs == 1) {
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = fn(i);
        }
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < jobs; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    out[i] = fn(i);
                } catch (...) {
                    std::lock_guard lock(failure_mu);
                    if (!failure) {
                        failure = std::current_exception();
                    }
                }
            }
        });
    }
    for (auto &th : pool) {
        th.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    return out;
}

// Loaded inputs for prediction; tables and model are optional depending on the method.
struct PredictInputs {
    Dataset dataset;
    std::optional<EmbeddingTable> space_a, space_b;
    std::optional<nsd::NsdModel> model;
};

inline const EmbeddingTable &routed(const PredictInputs &in, Space s, const char *what)
{
    const auto &t = s == Space::a ? in.space_a : in.space_b;
    if (!t) {
        throw Error(std::string(s == Space::a ? "--emb-a" : "--emb-b") + " is required for " + what);
    }
    return *t;
}

inline std::vector<Prediction> predict_word(const TargetWordRecord &word, const PredictInputs &in,
                                            const RunConfig &cfg)
{
    if (word.new_usages.empty()) {
        return {};
    }
    switch (cfg.method) {
    case Method::wsd:
        return wsd_predictions(word, assign_senses(word, routed(in, cfg.routing.wsd, "WSD")));
    case Method::wsi:
        return wsi_predictions(word, wsi_cluster(word, routed(in, cfg.routing.wsi, "WSI")));
    case Method::agglom:
        return agglom_predictions(word, routed(in, cfg.routing.wsi, "agglom"), AgglomConfig{cfg.k_extra});
    case Method::cluster2sense: {
        const auto wsd = assign_senses(word, routed(in, cfg.routing.wsd, "WSD"));
        const auto wsi = wsi_cluster(word, routed(in, cfg.routing.wsi, "WSI"));
        const auto ids = word.old_sense_ids();
        return cluster2sense(word.word, wsi, wsd, ids);
    }
    case Method::outlier2cluster:
        return outlier2cluster(word, *in.space_a, *in.space_b, *in.model, cfg.mode, cfg.routing);
    }
    return {};
}

inline PredictInputs load_predict_inputs(const RunConfig &cfg)
{
    PredictInputs in;
    in.dataset = load_dataset(cfg.dataset);
    if (cfg.emb_a) {
        in.space_a = load_table(*cfg.emb_a);
    }
    if (cfg.emb_b) {
        in.space_b = load_table(*cfg.emb_b);
    }
    if (cfg.method == Method::outlier2cluster) {
        require(cfg.emb_a, "--emb-a", "for outlier2cluster");
        require(cfg.emb_b, "--emb-b", "for outlier2cluster");
        in.model = nsd::load_model(require(cfg.nsd_model, "--nsd-model", "for outlier2cluster"));
        if (cfg.threshold) {
            in.model->threshold = *cfg.threshold;
            in.model->validate();
        }
    }
    return in;
}

inline std::vector<Prediction> predict(const PredictInputs &in, const RunConfig &cfg)
{
    const auto &words = in.dataset.words;
    auto per_word = parallel_map<std::vector<Prediction>>(words.size(), cfg.jobs, [&](std::size_t i) {
        try {
            return predict_word(words[i], in, cfg);
        } catch (const Error &e) {
            throw Error("word '" + words[i].word + "': " + e.what());
        }
    });
    std::vector<Prediction> all;
    for (auto &p : per_word) {
        all.insert(all.end(), std::make_move_iterator(p.begin()), std::make_move_iterator(p.end()));
    }
    sort_predictions(all);
    return all;
}

inline void cmd_predict(const RunConfig &cfg)
{
    const auto in = load_predict_inputs(cfg);
    const auto preds = predict(in, cfg);
    write_file(cfg.out, [&](std::ostream &o) { write_predictions(o, preds); });
}

// One NSD training example per new usage with a gold label: the usage and the gloss WSD
// picked for it. Label 1 when the gold sense is not an old sense.
struct NsdRows {
    std::vector<nsd::FeatureVector> features;
    std::vector<int> labels;
    std::vector<std::string> usage_ids;
};

inline NsdRows nsd_rows(const Dataset &ds, const EmbeddingTable &space_a, const EmbeddingTable &space_b,
                        SpaceRouting routing = {}, std::size_t jobs = 1)
{
    auto per_word = parallel_map<NsdRows>(ds.words.size(), jobs, [&](std::size_t i) {
        const auto &w = ds.words[i];
        NsdRows r;
        if (w.new_usages.empty() || w.old_senses.empty()) {
            return r;
        }
        const auto wsd = assign_senses(w, pick(routing.wsd, space_a, space_b));
        const auto counts = w.counts();
        for (std::size_t u = 0; u < wsd.size(); ++u) {
            const auto &usage = w.new_usages[u];
            if (!usage.gold_sense) {
                throw Error("usage '" + usage.usage_id + "' has no gold label; NSD training needs gold senses");
            }
            r.features.push_back(nsd::extract_features(usage.usage_id, wsd[u].chosen_sense_id, space_a, space_b, counts));
            r.labels.push_back(w.is_old_sense(*usage.gold_sense) ? 0 : 1);
            r.usage_ids.push_back(usage.usage_id);
        }
        return r;
    });
    NsdRows all;
    for (auto &r : per_word) {
        all.features.insert(all.features.end(), r.features.begin(), r.features.end());
        all.labels.insert(all.labels.end(), r.labels.begin(), r.labels.end());
        all.usage_ids.insert(all.usage_ids.end(), r.usage_ids.begin(), r.usage_ids.end());
    }
    return all;
}

inline void check_two_classes(const std::vector<int> &labels)
{
    const auto pos = std::count(labels.begin(), labels.end(), 1);
    if (pos == 0 || pos == static_cast<long>(labels.size())) {
        throw DegenerateInput("NSD training data has a single class (" + std::to_string(pos) + " gained-sense usages of " +
                              std::to_string(labels.size()) + ")");
    }
}

inline nsd::NsdModel train_nsd_model(const Dataset &ds, const EmbeddingTable &a, const EmbeddingTable &b,
                                     const RunConfig &cfg)
{
    const auto rows = nsd_rows(ds, a, b, cfg.routing, cfg.jobs);
    check_two_classes(rows.labels);
    return nsd::train_nsd(rows.features, rows.labels, {}, cfg.threshold.value_or(nsd::default_threshold));
}

inline void cmd_train_nsd(const RunConfig &cfg)
{
    const auto ds = load_dataset(cfg.dataset);
    const auto a = load_table(require(cfg.emb_a, "--emb-a", "for train-nsd"));
    const auto b = load_table(require(cfg.emb_b, "--emb-b", "for train-nsd"));
    const auto model = train_nsd_model(ds, a, b, cfg);
    write_file(cfg.out, [&](std::ostream &o) { nsd::save_model(o, model); });
}

inline void cmd_evaluate(const RunConfig &cfg)
{
    const auto ds = load_dataset(cfg.dataset);
    auto in = open_input(require(cfg.predictions, "--predictions", "for evaluate"));
    const auto preds = read_predictions(in);
    const auto report = evaluate(ds, preds);
    write_file(cfg.out, [&](std::ostream &o) { write_report(o, report); });
}

struct AblationRow {
    std::string group;
    std::string space;
    std::string model;
    double ap = 0.0;
    std::vector<PrPoint> curve;
};

namespace detail
{

inline std::string short_name(std::size_t feature)
{
    const auto n = nsd::feature_names[feature];
    return std::string(feature < nsd::first_count_feature ? n.substr(2) : n);
}

// In-sample probabilities of a scaler + logistic regression trained on the given columns.
inline std::vector<double> classifier_scores(const NsdRows &rows, const std::vector<std::size_t> &columns)
{
    std::vector<Vector> x;
    x.reserve(rows.features.size());
    for (const auto &f : rows.features) {
        Vector v;
        for (auto c : columns) {
            v.push_back(f[c]);
        }
        x.push_back(std::move(v));
    }
    const auto scaler = fit_scaler(x);
    for (auto &v : x) {
        v = scaler.transform(v);
    }
    const auto model = train_logreg(x, rows.labels);
    std::vector<double> scores;
    scores.reserve(x.size());
    for (const auto &v : x) {
        scores.push_back(model.probability(v));
    }
    return scores;
}

} // namespace detail

// AP of every single distance feature, every same-space pair (with and without the count
// features), and the full classifiers with and without the counts.
inline std::vector<AblationRow> ablate(const NsdRows &rows)
{
    check_two_classes(rows.labels);
    std::vector<AblationRow> out;
    auto add = [&](std::string group, std::string space, std::string name, const std::vector<double> &scores) {
        out.push_back({std::move(group), std::move(space), std::move(name), average_precision(scores, rows.labels),
                       pr_curve(scores, rows.labels)});
    };
    const std::size_t per = nsd::distance_features_per_space;
    const std::size_t counts = nsd::first_count_feature;
    for (std::size_t s = 0; s < 2; ++s) {
        const std::string space = s == 0 ? "a" : "b";
        for (std::size_t f = 0; f < per; ++f) {
            std::vector<double> scores;
            for (const auto &r : rows.features) {
                scores.push_back(r[s * per + f]);
            }
            add("single", space, detail::short_name(s * per + f), scores);
        }
    }
    for (std::size_t s = 0; s < 2; ++s) {
        const std::string space = s == 0 ? "a" : "b";
        for (std::size_t i = 0; i < per; ++i) {
            for (std::size_t j = i + 1; j < per; ++j) {
                const std::vector<std::size_t> cols{s * per + i, s * per + j};
                add("pair", space, detail::short_name(cols[0]) + "+" + detail::short_name(cols[1]),
                    detail::classifier_scores(rows, cols));
            }
        }
        for (std::size_t i = 0; i < per; ++i) {
            for (std::size_t c = counts; c < nsd::feature_count; ++c) {
                const std::vector<std::size_t> cols{s * per + i, c};
                add("pair_extra", space, detail::short_name(cols[0]) + "+" + detail::short_name(c),
                    detail::classifier_scores(rows, cols));
            }
        }
    }
    for (std::size_t c = counts; c < nsd::feature_count; ++c) {
        for (std::size_t d = c + 1; d < nsd::feature_count; ++d) {
            add("pair_extra", "-", detail::short_name(c) + "+" + detail::short_name(d),
                detail::classifier_scores(rows, {c, d}));
        }
    }
    std::vector<std::size_t> all(nsd::feature_count), distances(counts);
    for (std::size_t i = 0; i < all.size(); ++i) {
        all[i] = i;
    }
    for (std::size_t i = 0; i < distances.size(); ++i) {
        distances[i] = i;
    }
    add("full", "ab", "classifier_w_extra", detail::classifier_scores(rows, all));
    add("full", "ab", "classifier_wo_extra", detail::classifier_scores(rows, distances));
    return out;
}

inline void write_ablation(std::ostream &out, const std::vector<AblationRow> &rows)
{
    out << "group\tspace\tmodel\tap\n";
    for (const auto &r : rows) {
        out << r.group << '\t' << r.space << '\t' << r.model << '\t' << tsv::format_double(r.ap) << '\n';
    }
}

inline void cmd_ablate(const RunConfig &cfg)
{
    const auto ds = load_dataset(cfg.dataset);
    const auto a = load_table(require(cfg.emb_a, "--emb-a", "for ablate"));
    const auto b = load_table(require(cfg.emb_b, "--emb-b", "for ablate"));
    const auto rows = ablate(nsd_rows(ds, a, b, cfg.routing, cfg.jobs));
    if (cfg.pr_dir) {
        fs::create_directories(*cfg.pr_dir);
        for (const auto &r : rows) {
            auto name = r.group + "_" + r.space + "_" + r.model + ".tsv";
            std::replace(name.begin(), name.end(), '+', '-');
            write_file(*cfg.pr_dir / name, [&](std::ostream &o) { write_pr_curve(o, r.curve); });
        }
    }
    write_file(cfg.out, [&](std::ostream &o) { write_ablation(o, rows); });
}

struct PositionSummary {
    std::size_t filled = 0;
    std::size_t unmatched = 0;
};

// Fills missing spans from word-form lists; existing spans are kept. Words without a
// form list fall back to the lemma alone.
inline PositionSummary fill_positions(Dataset &ds, const std::map<std::string, WordFormList> &forms)
{
    PositionSummary summary;
    for (auto &w : ds.words) {
        auto it = forms.find(w.word);
        const WordFormList list = it != forms.end() ? it->second : WordFormList{w.word, {w.word}};
        for (auto *usages : {&w.old_usages, &w.new_usages}) {
            for (auto &u : *usages) {
                if (u.span) {
                    continue;
                }
                u.span = find_target_position(u.text, list);
                ++(u.span ? summary.filled : summary.unmatched);
            }
        }
    }
    return summary;
}

inline PositionSummary cmd_positions(const RunConfig &cfg)
{
    auto ds = load_dataset(cfg.dataset);
    auto in = open_input(require(cfg.forms, "--forms", "for positions"));
    const auto forms = parse_word_forms(in);
    const auto summary = fill_positions(ds, forms);
    write_file(cfg.out, [&](std::ostream &o) { write_dataset(o, ds); });
    return summary;
}

} // namespace scmkit::commands

#endif
