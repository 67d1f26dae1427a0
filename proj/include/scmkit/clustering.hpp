#ifndef SCMKIT_CLUSTERING_HPP
#define SCMKIT_CLUSTERING_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "scmkit/corpus.hpp"
#include "scmkit/error.hpp"
#include "scmkit/geometry.hpp"
#include "scmkit/prediction.hpp"

namespace scmkit
{

// Dense square matrix of pairwise distances.
class DistanceMatrix
{
public:
    explicit DistanceMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

    // Pairwise distances between points; the diagonal is exactly zero.
    static DistanceMatrix from_points(std::span<const VectorView> points, Distance fn)
    {
        DistanceMatrix m(points.size());
        for (std::size_t i = 0; i < points.size(); ++i) {
            for (std::size_t j = i + 1; j < points.size(); ++j) {
                const double d = distance(points[i], points[j], fn);
                m(i, j) = d;
                m(j, i) = d;
            }
        }
        return m;
    }

    std::size_t size() const noexcept { return n_; }
    double &operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

    // Throws unless the matrix is symmetric with a zero diagonal and no NaNs.
    void validate() const
    {
        for (std::size_t i = 0; i < n_; ++i) {
            if ((*this)(i, i) != 0.0) {
                throw Error("distance matrix has a non-zero diagonal entry at " + std::to_string(i));
            }
            for (std::size_t j = i + 1; j < n_; ++j) {
                if (std::isnan((*this)(i, j)) || (*this)(i, j) != (*this)(j, i)) {
                    throw Error("distance matrix is not symmetric at (" + std::to_string(i) + ", " +
                                std::to_string(j) + ")");
                }
            }
        }
    }

private:
    std::size_t n_;
    std::vector<double> data_;
};

// Cluster index per point, 0-based and contiguous.
using Partition = std::vector<std::size_t>;

namespace detail
{

// Relabels so that clusters are numbered by their first point.
inline Partition canonical_labels(std::span<const std::size_t> raw)
{
    std::map<std::size_t, std::size_t> rename;
    Partition out;
    out.reserve(raw.size());
    for (auto r : raw) {
        auto [it, fresh] = rename.try_emplace(r, rename.size());
        out.push_back(it->second);
    }
    return out;
}

inline std::size_t count_clusters(std::span<const std::size_t> labels)
{
    if (labels.empty()) {
        return 0;
    }
    return *std::max_element(labels.begin(), labels.end()) + 1;
}

} // namespace detail

// Bottom-up clustering with average linkage, stopped at k clusters. Ties between
// candidate pairs go to the pair with the smallest (first point, first point) indices.
inline Partition average_linkage(const DistanceMatrix &dist, std::size_t k)
{
    const std::size_t n = dist.size();
    dist.validate();
    if (k < 1 || k > n) {
        throw Error("cluster count " + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
    }
    // Slot i holds the cluster whose smallest point is i. cross(i, j) is the sum of
    // distances between the members of slots i and j.
    DistanceMatrix cross = dist;
    std::vector<std::size_t> size(n, 1);
    std::vector<std::size_t> owner(n);
    std::vector<bool> active(n, true);
    for (std::size_t i = 0; i < n; ++i) {
        owner[i] = i;
    }

    for (std::size_t clusters = n; clusters > k; --clusters) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t ba = n, bb = n;
        for (std::size_t a = 0; a < n; ++a) {
            if (!active[a]) {
                continue;
            }
            for (std::size_t b = a + 1; b < n; ++b) {
                if (!active[b]) {
                    continue;
                }
                const double avg = cross(a, b) / static_cast<double>(size[a] * size[b]);
                if (avg < best || ba == n) {
                    best = avg;
                    ba = a;
                    bb = b;
                }
            }
        }
        for (std::size_t c = 0; c < n; ++c) {
            if (active[c] && c != ba && c != bb) {
                cross(ba, c) += cross(bb, c);
                cross(c, ba) = cross(ba, c);
            }
        }
        size[ba] += size[bb];
        active[bb] = false;
        for (auto &o : owner) {
            if (o == bb) {
                o = ba;
            }
        }
    }
    return detail::canonical_labels(owner);
}

// Between-cluster over within-cluster dispersion, each divided by its degrees of freedom.
// Returns +infinity when every cluster is a single repeated point.
inline double calinski_harabasz(std::span<const VectorView> points, std::span<const std::size_t> labels)
{
    const std::size_t n = points.size();
    if (labels.size() != n) {
        throw Error("calinski_harabasz: label count does not match point count");
    }
    if (n < 3) {
        throw Error("calinski_harabasz: needs at least 3 points");
    }
    const std::size_t k = detail::count_clusters(labels);
    if (k < 2 || k > n - 1) {
        throw Error("calinski_harabasz: cluster count " + std::to_string(k) + " outside [2, n-1]");
    }
    const std::size_t dim = points[0].size();
    Vector mean(dim, 0.0);
    std::vector<Vector> centroid(k, Vector(dim, 0.0));
    std::vector<std::size_t> count(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (points[i].size() != dim) {
            throw Error("calinski_harabasz: inconsistent dimensions");
        }
        ++count[labels[i]];
        for (std::size_t d = 0; d < dim; ++d) {
            mean[d] += points[i][d];
            centroid[labels[i]][d] += points[i][d];
        }
    }
    for (std::size_t c = 0; c < k; ++c) {
        if (count[c] == 0) {
            throw Error("calinski_harabasz: cluster " + std::to_string(c) + " is empty");
        }
        for (auto &x : centroid[c]) {
            x /= static_cast<double>(count[c]);
        }
    }
    for (auto &x : mean) {
        x /= static_cast<double>(n);
    }
    double between = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        double s = 0.0;
        for (std::size_t d = 0; d < dim; ++d) {
            const double t = centroid[c][d] - mean[d];
            s += t * t;
        }
        between += static_cast<double>(count[c]) * s;
    }
    double within = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t d = 0; d < dim; ++d) {
            const double t = points[i][d] - centroid[labels[i]][d];
            within += t * t;
        }
    }
    if (within == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return (between / static_cast<double>(k - 1)) / (within / static_cast<double>(n - k));
}

// Usage-level clustering result.
struct Clustering {
    std::map<std::string, std::size_t> labels;
    std::size_t k = 0;
};

struct WsiOptions {
    std::size_t min_k = 2;
    std::size_t max_k = 9;
};

// Agglomerative WSI: cosine distances, average linkage, cluster count chosen by the
// Calinski-Harabasz score (ties go to the smaller count). One or two usages form a
// single cluster. Input order does not matter; usages are sorted by id first.
inline Clustering wsi_cluster(std::vector<std::pair<std::string, VectorView>> usages, WsiOptions opts = {})
{
    if (usages.empty()) {
        throw Error("wsi_cluster: no usages");
    }
    std::sort(usages.begin(), usages.end(), [](const auto &a, const auto &b) { return a.first < b.first; });
    for (std::size_t i = 1; i < usages.size(); ++i) {
        if (usages[i].first == usages[i - 1].first) {
            throw Error("wsi_cluster: duplicate usage id '" + usages[i].first + "'");
        }
    }
    const std::size_t n = usages.size();
    Clustering out;
    if (n <= 2) {
        for (const auto &u : usages) {
            out.labels.emplace(u.first, 0);
        }
        out.k = 1;
        return out;
    }
    std::vector<VectorView> points;
    points.reserve(n);
    for (const auto &u : usages) {
        points.push_back(u.second);
    }
    const auto dist = DistanceMatrix::from_points(points, Distance::cosine);

    const std::size_t hi = std::min(opts.max_k, n - 1);
    Partition best;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t k = std::max<std::size_t>(opts.min_k, 2); k <= hi; ++k) {
        auto labels = average_linkage(dist, k);
        const double score = calinski_harabasz(points, labels);
        if (best.empty() || score > best_score) {
            best_score = score;
            best = std::move(labels);
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        out.labels.emplace(usages[i].first, best[i]);
    }
    out.k = detail::count_clusters(best);
    return out;
}

// WSI over the new usages of one word.
inline Clustering wsi_cluster(const TargetWordRecord &word, const EmbeddingTable &table, WsiOptions opts = {})
{
    std::vector<std::pair<std::string, VectorView>> usages;
    usages.reserve(word.new_usages.size());
    for (const auto &u : word.new_usages) {
        usages.emplace_back(u.usage_id, table.usage(u.usage_id));
    }
    return wsi_cluster(std::move(usages), opts);
}

struct AgglomConfig {
    // Number of clusters without a sense seed to keep, i.e. novel senses returned.
    std::size_t k_extra = 0;
};

// Sense-aware single-linkage clustering of old and new usages. Old usages start grouped
// by their annotated sense, new usages as singletons; only merges involving a cluster of
// new usages alone are allowed. Returns usage_id -> sense_id or `novel:<i>` for every
// new usage.
inline std::map<std::string, std::string> agglom_scm(const TargetWordRecord &word, const EmbeddingTable &table,
                                                     AgglomConfig cfg = {})
{
    std::vector<VectorView> points;
    std::vector<std::vector<std::size_t>> members;
    for (const auto &sense : word.old_senses) {
        std::vector<std::size_t> seed;
        for (const auto &u : word.old_usages) {
            if (u.gold_sense == sense.sense_id) {
                if (auto v = table.find(EntryKind::usage, u.usage_id)) {
                    seed.push_back(points.size());
                    points.push_back(*v);
                }
            }
        }
        if (seed.empty()) {
            throw Error("agglom: old sense '" + sense.sense_id + "' of '" + word.word + "' has no embedded old usages");
        }
        members.push_back(std::move(seed));
    }
    const std::size_t seeds = members.size();

    std::vector<std::string> new_ids;
    for (const auto &u : word.new_usages) {
        new_ids.push_back(u.usage_id);
    }
    std::sort(new_ids.begin(), new_ids.end());
    for (const auto &id : new_ids) {
        members.push_back({points.size()});
        points.push_back(table.usage(id));
    }

    const auto pdist = DistanceMatrix::from_points(points, Distance::cosine);
    const std::size_t m = members.size();
    // Single linkage: cluster distance is the closest pair, and min() merges exactly.
    DistanceMatrix cd(m);
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = a + 1; b < m; ++b) {
            double d = std::numeric_limits<double>::infinity();
            for (auto i : members[a]) {
                for (auto j : members[b]) {
                    d = std::min(d, pdist(i, j));
                }
            }
            cd(a, b) = cd(b, a) = d;
        }
    }
    std::vector<bool> active(m, true);
    std::vector<bool> new_only(m, false);
    for (std::size_t c = seeds; c < m; ++c) {
        new_only[c] = true;
    }

    const std::size_t target = seeds + cfg.k_extra;
    std::size_t clusters = m;
    while (clusters > target) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t ba = m, bb = m;
        for (std::size_t a = 0; a < m; ++a) {
            if (!active[a]) {
                continue;
            }
            for (std::size_t b = a + 1; b < m; ++b) {
                if (!active[b] || !(new_only[a] || new_only[b])) {
                    continue;
                }
                if (cd(a, b) < best || ba == m) {
                    best = cd(a, b);
                    ba = a;
                    bb = b;
                }
            }
        }
        if (ba == m) {
            break;
        }
        for (std::size_t c = 0; c < m; ++c) {
            if (active[c] && c != ba && c != bb) {
                cd(ba, c) = cd(c, ba) = std::min(cd(ba, c), cd(bb, c));
            }
        }
        members[ba].insert(members[ba].end(), members[bb].begin(), members[bb].end());
        new_only[ba] = new_only[ba] && new_only[bb];
        active[bb] = false;
        --clusters;
    }

    std::map<std::string, std::string> out;
    std::size_t next_novel = 0;
    for (std::size_t c = 0; c < m; ++c) {
        if (!active[c]) {
            continue;
        }
        const std::string label = c < seeds ? word.old_senses[c].sense_id : novel_label(next_novel++);
        for (auto p : members[c]) {
            const std::size_t first_new = points.size() - new_ids.size();
            if (p >= first_new) {
                out.emplace(new_ids[p - first_new], label);
            }
        }
    }
    return out;
}

} // namespace scmkit

#endif
