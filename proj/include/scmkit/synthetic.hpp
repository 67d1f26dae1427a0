#ifndef SCMKIT_SYNTHETIC_HPP
#define SCMKIT_SYNTHETIC_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "scmkit/corpus.hpp"
#include "scmkit/error.hpp"
#include "scmkit/geometry.hpp"
#include "scmkit/unicode.hpp"

// Synthetic diachronic datasets with known sense structure, for tests and demos.
namespace scmkit::synthetic
{

struct Config {
    std::size_t n_words = 50;
    std::size_t senses_per_word = 4;
    std::size_t gained_per_word = 2; // the last senses only occur among new usages
    std::size_t old_usages_per_sense = 5;
    std::size_t new_usages_per_sense = 10;
    std::size_t dim = 32;
    double usage_noise = 0.2; // norm of the off-centroid component of a usage vector
    double gloss_noise = 0.1;
    std::uint64_t seed = 1;
    std::string word_prefix = "w";
};

struct Data {
    Dataset dataset;
    EmbeddingTable space_a{"synthetic_a", 1};
    EmbeddingTable space_b{"synthetic_b", 1};
};

namespace detail
{

inline Vector gaussian(std::mt19937_64 &rng, std::size_t dim)
{
    std::normal_distribution<double> nd(0.0, 1.0);
    Vector v(dim);
    for (auto &x : v) {
        x = nd(rng);
    }
    return v;
}

inline void scale_to(Vector &v, double norm)
{
    const double n = l2_norm(v);
    for (auto &x : v) {
        x *= norm / n;
    }
}

// k mutually orthogonal unit vectors (Gram-Schmidt on Gaussian draws).
inline std::vector<Vector> orthonormal(std::mt19937_64 &rng, std::size_t k, std::size_t dim)
{
    std::vector<Vector> out;
    while (out.size() < k) {
        auto v = gaussian(rng, dim);
        for (const auto &u : out) {
            const double p = dot(v, u);
            for (std::size_t i = 0; i < dim; ++i) {
                v[i] -= p * u[i];
            }
        }
        if (l2_norm(v) > 1e-6) {
            scale_to(v, 1.0);
            out.push_back(std::move(v));
        }
    }
    return out;
}

// centroid + a random component orthogonal to it with the given norm.
inline Vector around(std::mt19937_64 &rng, const Vector &centroid, double noise)
{
    auto n = gaussian(rng, centroid.size());
    const double p = dot(n, centroid);
    for (std::size_t i = 0; i < n.size(); ++i) {
        n[i] -= p * centroid[i];
    }
    scale_to(n, noise);
    Vector v = centroid;
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] += n[i];
    }
    return v;
}

} // namespace detail

inline Data generate(const Config &cfg)
{
    if (cfg.senses_per_word == 0 || cfg.gained_per_word >= cfg.senses_per_word) {
        throw Error("synthetic: need at least one old sense per word");
    }
    if (cfg.dim < cfg.senses_per_word) {
        throw Error("synthetic: dimension must be at least the number of senses");
    }
    std::mt19937_64 rng(cfg.seed);
    Data data;
    data.space_a = EmbeddingTable("synthetic_a", cfg.dim);
    data.space_b = EmbeddingTable("synthetic_b", cfg.dim);
    const std::size_t n_old = cfg.senses_per_word - cfg.gained_per_word;

    for (std::size_t w = 0; w < cfg.n_words; ++w) {
        TargetWordRecord rec;
        rec.word = cfg.word_prefix + std::to_string(w);
        const auto centroids_a = detail::orthonormal(rng, cfg.senses_per_word, cfg.dim);
        const auto centroids_b = detail::orthonormal(rng, cfg.senses_per_word, cfg.dim);
        std::vector<std::string> sense_ids;
        for (std::size_t s = 0; s < cfg.senses_per_word; ++s) {
            const bool old = s < n_old;
            SenseEntry e{rec.word + "_s" + std::to_string(s), rec.word,
                         "gloss " + std::to_string(s) + " of " + rec.word, old ? Period::old_period : Period::new_period};
            sense_ids.push_back(e.sense_id);
            data.space_a.insert(EntryKind::gloss, e.sense_id, detail::around(rng, centroids_a[s], cfg.gloss_noise));
            data.space_b.insert(EntryKind::gloss, e.sense_id, detail::around(rng, centroids_b[s], cfg.gloss_noise));
            (old ? rec.old_senses : rec.new_senses).push_back(std::move(e));
        }
        auto add_usage = [&](Period period, std::size_t sense, std::size_t idx) {
            Usage u;
            u.word = rec.word;
            u.period = period;
            u.usage_id = rec.word + (period == Period::old_period ? "_old" : "_new") + std::to_string(idx);
            const std::string left = "context " + std::to_string(idx) + " before ";
            u.text = left + rec.word + " and after";
            const auto start = unicode::length(left);
            u.span = Span{start, start + unicode::length(rec.word)};
            u.gold_sense = sense_ids[sense];
            data.space_a.insert(EntryKind::usage, u.usage_id, detail::around(rng, centroids_a[sense], cfg.usage_noise));
            data.space_b.insert(EntryKind::usage, u.usage_id, detail::around(rng, centroids_b[sense], cfg.usage_noise));
            (period == Period::old_period ? rec.old_usages : rec.new_usages).push_back(std::move(u));
        };
        std::size_t idx = 0;
        for (std::size_t s = 0; s < n_old; ++s) {
            for (std::size_t i = 0; i < cfg.old_usages_per_sense; ++i) {
                add_usage(Period::old_period, s, idx++);
            }
        }
        // Interleave senses so that usage order carries no sense information.
        idx = 0;
        for (std::size_t i = 0; i < cfg.new_usages_per_sense; ++i) {
            for (std::size_t s = 0; s < cfg.senses_per_word; ++s) {
                add_usage(Period::new_period, s, idx++);
            }
        }
        data.dataset.words.push_back(std::move(rec));
    }
    return data;
}

} // namespace scmkit::synthetic

#endif
