#ifndef SCMKIT_SCM_HPP
#define SCMKIT_SCM_HPP

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scmkit/clustering.hpp"
#include "scmkit/corpus.hpp"
#include "scmkit/disambiguation.hpp"
#include "scmkit/error.hpp"
#include "scmkit/geometry.hpp"
#include "scmkit/nsd.hpp"
#include "scmkit/prediction.hpp"

namespace scmkit
{

// |a & b| / |a | b|, and 0 for two empty sets.
template <typename T, typename Cmp>
double jaccard(const std::set<T, Cmp> &a, const std::set<T, Cmp> &b)
{
    std::size_t common = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    const Cmp less = a.key_comp();
    while (ia != a.end() && ib != b.end()) {
        if (less(*ia, *ib)) {
            ++ia;
        } else if (less(*ib, *ia)) {
            ++ib;
        } else {
            ++common;
            ++ia;
            ++ib;
        }
    }
    const std::size_t uni = a.size() + b.size() - common;
    return uni == 0 ? 0.0 : static_cast<double>(common) / static_cast<double>(uni);
}

// Keeps the WSI partition and names a cluster after a sense when the two are each
// other's best Jaccard match (and overlap at all). Other clusters become `novel:<i>`
// in cluster order. `sense_order` is the inventory, which decides ties.
inline std::vector<Prediction> cluster2sense(std::string_view word, const Clustering &wsi,
                                             std::span<const WsdAssignment> wsd,
                                             std::span<const std::string> sense_order)
{
    std::map<std::string, std::size_t> sense_index;
    for (std::size_t i = 0; i < sense_order.size(); ++i) {
        sense_index.emplace(sense_order[i], i);
    }
    std::vector<std::set<std::string>> groups(sense_order.size());
    for (const auto &a : wsd) {
        auto it = sense_index.find(a.chosen_sense_id);
        if (it == sense_index.end()) {
            throw Error("cluster2sense: sense '" + a.chosen_sense_id + "' is not in the inventory");
        }
        if (!wsi.labels.contains(a.usage_id)) {
            throw Error("cluster2sense: usage '" + a.usage_id + "' has a WSD label but no WSI cluster");
        }
        groups[it->second].insert(a.usage_id);
    }
    if (wsd.size() != wsi.labels.size()) {
        throw Error("cluster2sense: WSI and WSD cover different usage sets");
    }
    std::vector<std::set<std::string>> clusters(wsi.k);
    for (const auto &[id, c] : wsi.labels) {
        if (c >= wsi.k) {
            throw Error("cluster2sense: cluster index out of range");
        }
        clusters[c].insert(id);
    }

    const std::size_t nc = clusters.size();
    const std::size_t ns = groups.size();
    std::vector<std::vector<double>> sim(nc, std::vector<double>(ns, 0.0));
    for (std::size_t c = 0; c < nc; ++c) {
        for (std::size_t s = 0; s < ns; ++s) {
            sim[c][s] = jaccard(clusters[c], groups[s]);
        }
    }
    std::vector<std::optional<std::size_t>> best_sense(nc);
    for (std::size_t c = 0; c < nc; ++c) {
        for (std::size_t s = 0; s < ns; ++s) {
            if (!best_sense[c] || sim[c][s] > sim[c][*best_sense[c]]) {
                best_sense[c] = s;
            }
        }
    }
    std::vector<std::optional<std::size_t>> best_cluster(ns);
    for (std::size_t s = 0; s < ns; ++s) {
        for (std::size_t c = 0; c < nc; ++c) {
            if (!best_cluster[s] || sim[c][s] > sim[*best_cluster[s]][s]) {
                best_cluster[s] = c;
            }
        }
    }

    std::vector<std::string> cluster_label(nc);
    std::size_t next_novel = 0;
    for (std::size_t c = 0; c < nc; ++c) {
        const auto s = best_sense[c];
        if (s && best_cluster[*s] == c && sim[c][*s] > 0.0) {
            cluster_label[c] = sense_order[*s];
        } else {
            cluster_label[c] = novel_label(next_novel++);
        }
    }
    std::vector<Prediction> out;
    out.reserve(wsi.labels.size());
    for (const auto &[id, c] : wsi.labels) {
        out.push_back({std::string(word), id, cluster_label[c], Provenance::cluster2sense});
    }
    return out;
}

enum class RelabelMode { with_wsi, without_wsi };

enum class Space { a, b };

// Which embedding space feeds which component. Defaults: WSD on the fine-tuned space (A),
// WSI on the base space (B).
struct SpaceRouting {
    Space wsd = Space::a;
    Space wsi = Space::b;
};

inline const EmbeddingTable &pick(Space s, const EmbeddingTable &a, const EmbeddingTable &b)
{
    return s == Space::a ? a : b;
}

inline std::vector<Prediction> wsd_predictions(const TargetWordRecord &word, std::span<const WsdAssignment> wsd)
{
    std::vector<Prediction> out;
    out.reserve(wsd.size());
    for (const auto &a : wsd) {
        out.push_back({word.word, a.usage_id, a.chosen_sense_id, Provenance::wsd});
    }
    return out;
}

inline std::vector<Prediction> wsi_predictions(const TargetWordRecord &word, const Clustering &wsi)
{
    std::vector<Prediction> out;
    out.reserve(wsi.labels.size());
    for (const auto &[id, c] : wsi.labels) {
        out.push_back({word.word, id, novel_label(c), Provenance::wsi});
    }
    return out;
}

// NSD decision for each WSD assignment, in the same order.
inline std::vector<nsd::OutlierDecision> score_outliers(const TargetWordRecord &word, std::span<const WsdAssignment> wsd,
                                                        const EmbeddingTable &space_a, const EmbeddingTable &space_b,
                                                        const nsd::NsdModel &model)
{
    std::vector<nsd::OutlierDecision> out;
    out.reserve(wsd.size());
    const auto counts = word.counts();
    for (const auto &a : wsd) {
        const auto f = nsd::extract_features(a.usage_id, a.chosen_sense_id, space_a, space_b, counts);
        out.push_back(nsd::predict_outlier(model, f));
    }
    return out;
}

// WSD labels for usages the NSD model accepts; outliers get a novel cluster, either one
// shared cluster or their WSI cluster (renumbered contiguously by WSI index).
inline std::vector<Prediction> outlier2cluster(const TargetWordRecord &word, const EmbeddingTable &space_a,
                                               const EmbeddingTable &space_b, const nsd::NsdModel &model,
                                               RelabelMode mode, SpaceRouting routing = {})
{
    model.validate();
    if (word.new_usages.empty()) {
        return {};
    }
    const auto wsd = assign_senses(word, pick(routing.wsd, space_a, space_b));
    const auto wsi = wsi_cluster(word, pick(routing.wsi, space_a, space_b));
    const auto decisions = score_outliers(word, wsd, space_a, space_b, model);

    std::set<std::size_t> outlier_clusters;
    for (std::size_t i = 0; i < wsd.size(); ++i) {
        if (decisions[i].is_outlier) {
            outlier_clusters.insert(wsi.labels.at(wsd[i].usage_id));
        }
    }
    std::map<std::size_t, std::size_t> compact;
    for (auto c : outlier_clusters) {
        compact.emplace(c, compact.size());
    }

    std::vector<Prediction> out;
    out.reserve(wsd.size());
    for (std::size_t i = 0; i < wsd.size(); ++i) {
        const auto &a = wsd[i];
        if (!decisions[i].is_outlier) {
            out.push_back({word.word, a.usage_id, a.chosen_sense_id, Provenance::wsd});
        } else if (mode == RelabelMode::without_wsi) {
            out.push_back({word.word, a.usage_id, novel_label(0), Provenance::wsi});
        } else {
            out.push_back({word.word, a.usage_id, novel_label(compact.at(wsi.labels.at(a.usage_id))), Provenance::wsi});
        }
    }
    return out;
}

inline std::vector<Prediction> agglom_predictions(const TargetWordRecord &word, const EmbeddingTable &table,
                                                  AgglomConfig cfg)
{
    std::vector<Prediction> out;
    for (auto &[id, label] : agglom_scm(word, table, cfg)) {
        out.push_back({word.word, id, label, Provenance::agglom});
    }
    return out;
}

} // namespace scmkit

#endif
