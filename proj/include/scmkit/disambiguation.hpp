#ifndef SCMKIT_DISAMBIGUATION_HPP
#define SCMKIT_DISAMBIGUATION_HPP

#include <string>
#include <utility>
#include <vector>

#include "scmkit/corpus.hpp"
#include "scmkit/error.hpp"
#include "scmkit/geometry.hpp"

namespace scmkit
{

struct WsdAssignment {
    std::string usage_id;
    std::string chosen_sense_id;
    double score = 0.0;
    // Dot product per old sense, in inventory order.
    std::vector<std::pair<std::string, double>> per_sense_scores;
};

// Gloss-based WSD: every new usage takes the old sense whose gloss vector has the
// largest dot product with the usage vector. Ties go to the earlier inventory entry.
inline std::vector<WsdAssignment> assign_senses(const TargetWordRecord &word, const EmbeddingTable &table)
{
    if (word.old_senses.empty()) {
        throw Error("word '" + word.word + "' has no old senses to disambiguate against");
    }
    std::vector<VectorView> glosses;
    glosses.reserve(word.old_senses.size());
    for (const auto &s : word.old_senses) {
        glosses.push_back(table.gloss(s.sense_id));
    }

    std::vector<WsdAssignment> out;
    out.reserve(word.new_usages.size());
    for (const auto &u : word.new_usages) {
        const auto r = table.usage(u.usage_id);
        WsdAssignment a;
        a.usage_id = u.usage_id;
        a.per_sense_scores.reserve(glosses.size());
        std::size_t best = 0;
        for (std::size_t i = 0; i < glosses.size(); ++i) {
            const double s = dot(r, glosses[i]);
            a.per_sense_scores.emplace_back(word.old_senses[i].sense_id, s);
            if (s > a.per_sense_scores[best].second) {
                best = i;
            }
        }
        a.chosen_sense_id = word.old_senses[best].sense_id;
        a.score = a.per_sense_scores[best].second;
        out.push_back(std::move(a));
    }
    return out;
}

} // namespace scmkit

#endif
