#ifndef SCMKIT_NSD_HPP
#define SCMKIT_NSD_HPP

#include <array>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scmkit/corpus.hpp"
#include "scmkit/error.hpp"
#include "scmkit/geometry.hpp"
#include "scmkit/logreg.hpp"
#include "scmkit/tsv.hpp"

// Novel sense detection: is the gloss picked by WSD too far from the usage to be right?
namespace scmkit::nsd
{

inline constexpr std::size_t feature_count = 13;
inline constexpr std::size_t distance_features_per_space = 5;

using FeatureVector = std::array<double, feature_count>;

struct DistanceFeature {
    Norm norm;
    Distance fn;
};

// Per space, in canonical order.
inline constexpr std::array<DistanceFeature, distance_features_per_space> distance_features{{
    {Norm::none, Distance::cosine},
    {Norm::none, Distance::euclidean},
    {Norm::none, Distance::manhattan},
    {Norm::l1, Distance::manhattan},
    {Norm::l2, Distance::euclidean},
}};

// Space A is the fine-tuned encoder, space B the base one.
inline constexpr std::array<std::string_view, feature_count> feature_names{
    "a.cos", "a.euclid", "a.manh", "a.l1_manh", "a.l2_euclid",
    "b.cos", "b.euclid", "b.manh", "b.l1_manh", "b.l2_euclid",
    "n_old_usages", "n_old_senses", "n_new_usages",
};

inline constexpr std::size_t first_count_feature = 2 * distance_features_per_space;

inline double distance_feature(VectorView usage, VectorView gloss, DistanceFeature f)
{
    if (f.norm == Norm::none) {
        return distance(usage, gloss, f.fn);
    }
    return distance(normalize(usage, f.norm), normalize(gloss, f.norm), f.fn);
}

// Distances between a new usage and the gloss WSD chose for it, in both spaces, plus
// the word's usage/sense counts.
inline FeatureVector extract_features(std::string_view usage_id, std::string_view sense_id, const EmbeddingTable &space_a,
                                      const EmbeddingTable &space_b, UsageCounts counts)
{
    FeatureVector f{};
    std::size_t k = 0;
    for (const auto *table : {&space_a, &space_b}) {
        const auto u = table->usage(usage_id);
        const auto g = table->gloss(sense_id);
        for (const auto &df : distance_features) {
            f[k++] = distance_feature(u, g, df);
        }
    }
    f[k++] = static_cast<double>(counts.n_old_usages);
    f[k++] = static_cast<double>(counts.n_old_senses);
    f[k++] = static_cast<double>(counts.n_new_usages);
    return f;
}

inline Vector to_vector(const FeatureVector &f)
{
    return Vector(f.begin(), f.end());
}

inline std::vector<Vector> to_rows(std::span<const FeatureVector> rows)
{
    std::vector<Vector> out;
    out.reserve(rows.size());
    for (const auto &r : rows) {
        out.push_back(to_vector(r));
    }
    return out;
}

inline ScalerParams fit_scaler(std::span<const FeatureVector> rows)
{
    return scmkit::fit_scaler(to_rows(rows));
}

struct NsdTrainConfig {
    double c = 1.0;
    double tol = 1e-8;
    std::size_t max_iters = 10000;
};

inline constexpr double default_threshold = 0.65;

struct NsdModel {
    ScalerParams scaler;
    std::array<double, feature_count> weights{};
    double bias = 0.0;
    double threshold = default_threshold;
    std::array<std::string, feature_count> names = [] {
        std::array<std::string, feature_count> n;
        for (std::size_t i = 0; i < feature_count; ++i) {
            n[i] = feature_names[i];
        }
        return n;
    }();

    void validate() const
    {
        if (scaler.mean.size() != feature_count || scaler.std.size() != feature_count) {
            throw Error("NSD model scaler must have " + std::to_string(feature_count) + " columns");
        }
        for (std::size_t i = 0; i < feature_count; ++i) {
            if (!(scaler.std[i] > 0.0)) {
                throw Error("NSD model scaler std must be positive for '" + names[i] + "'");
            }
            if (names[i] != feature_names[i]) {
                throw Error("NSD model feature " + std::to_string(i) + " is '" + names[i] + "', expected '" +
                            std::string(feature_names[i]) + "'");
            }
        }
        if (!(threshold >= 0.0 && threshold <= 1.0)) {
            throw Error("NSD threshold must lie in [0, 1]");
        }
    }

    bool operator==(const NsdModel &) const = default;
};

struct OutlierDecision {
    double probability = 0.0;
    bool is_outlier = false;
};

inline double outlier_probability(const NsdModel &model, const FeatureVector &f)
{
    const auto x = model.scaler.transform(f);
    return sigmoid(dot(model.weights, x) + model.bias);
}

// Outlier iff the probability is strictly above the threshold.
inline OutlierDecision predict_outlier(const NsdModel &model, const FeatureVector &f)
{
    const double p = outlier_probability(model, f);
    return {p, p > model.threshold};
}

// Scaler + logistic regression on all 13 features. Label 1 marks an outlier.
inline NsdModel train_nsd(std::span<const FeatureVector> rows, std::span<const int> labels, const NsdTrainConfig &cfg = {},
                          double threshold = default_threshold)
{
    NsdModel m;
    m.scaler = fit_scaler(rows);
    std::vector<Vector> scaled;
    scaled.reserve(rows.size());
    for (const auto &r : rows) {
        scaled.push_back(m.scaler.transform(r));
    }
    const auto lr = train_logreg(scaled, labels, {cfg.c, cfg.tol, cfg.max_iters});
    std::copy(lr.weights.begin(), lr.weights.end(), m.weights.begin());
    m.bias = lr.bias;
    m.threshold = threshold;
    m.validate();
    return m;
}

// `feature <name> mean <m> std <s> weight <w>` x13, `bias <b>`, `threshold <t>`.
inline void save_model(std::ostream &out, const NsdModel &m)
{
    m.validate();
    for (std::size_t i = 0; i < feature_count; ++i) {
        out << "feature " << m.names[i] << " mean " << tsv::format_double(m.scaler.mean[i]) << " std "
            << tsv::format_double(m.scaler.std[i]) << " weight " << tsv::format_double(m.weights[i]) << '\n';
    }
    out << "bias " << tsv::format_double(m.bias) << '\n';
    out << "threshold " << tsv::format_double(m.threshold) << '\n';
}

inline NsdModel load_model(std::istream &in)
{
    NsdModel m;
    m.scaler.mean.clear();
    m.scaler.std.clear();
    std::size_t n_features = 0;
    bool has_bias = false, has_threshold = false;
    std::string line;
    std::size_t lineno = 0;
    auto number = [&](std::string_view tok) {
        auto v = tsv::parse_double(tok);
        if (!v) {
            throw ParseError(lineno, "malformed number '" + std::string(tok) + "'");
        }
        return *v;
    };
    while (tsv::read_line(in, line)) {
        ++lineno;
        const auto t = tsv::split_ws(line);
        if (t.empty()) {
            continue;
        }
        if (t[0] == "feature") {
            if (t.size() != 8 || t[2] != "mean" || t[4] != "std" || t[6] != "weight") {
                throw ParseError(lineno, "expected 'feature <name> mean <m> std <s> weight <w>'");
            }
            if (n_features == feature_count) {
                throw ParseError(lineno, "more than " + std::to_string(feature_count) + " features");
            }
            if (t[1] != feature_names[n_features]) {
                throw ParseError(lineno, "feature " + std::to_string(n_features) + " is '" + std::string(t[1]) +
                                             "', expected '" + std::string(feature_names[n_features]) + "'");
            }
            m.scaler.mean.push_back(number(t[3]));
            m.scaler.std.push_back(number(t[5]));
            m.weights[n_features] = number(t[7]);
            ++n_features;
        } else if (t[0] == "bias" && t.size() == 2) {
            m.bias = number(t[1]);
            has_bias = true;
        } else if (t[0] == "threshold" && t.size() == 2) {
            m.threshold = number(t[1]);
            has_threshold = true;
        } else {
            throw ParseError(lineno, "unrecognized model line");
        }
    }
    if (n_features != feature_count) {
        throw ParseError(0, "model has " + std::to_string(n_features) + " features, expected " +
                                std::to_string(feature_count));
    }
    if (!has_bias || !has_threshold) {
        throw ParseError(0, "model is missing its bias or threshold line");
    }
    try {
        m.validate();
    } catch (const Error &e) {
        throw ParseError(0, e.what());
    }
    return m;
}

inline void save_model(const std::filesystem::path &path, const NsdModel &m)
{
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write model file " + path.string());
    }
    save_model(out, m);
    if (!out.flush()) {
        throw Error("failed writing model file " + path.string());
    }
}

inline NsdModel load_model(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open model file " + path.string());
    }
    return load_model(in);
}

} // namespace scmkit::nsd

#endif
