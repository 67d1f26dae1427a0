#ifndef SCMKIT_PREDICTION_HPP
#define SCMKIT_PREDICTION_HPP

#include <algorithm>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scmkit/error.hpp"
#include "scmkit/tsv.hpp"

namespace scmkit
{

enum class Provenance { wsd, wsi, agglom, cluster2sense };

inline std::string_view to_string(Provenance p)
{
    switch (p) {
    case Provenance::wsd: return "wsd";
    case Provenance::wsi: return "wsi";
    case Provenance::agglom: return "agglom";
    default: return "cluster2sense";
    }
}

inline std::optional<Provenance> parse_provenance(std::string_view s)
{
    for (auto p : {Provenance::wsd, Provenance::wsi, Provenance::agglom, Provenance::cluster2sense}) {
        if (to_string(p) == s) {
            return p;
        }
    }
    return std::nullopt;
}

inline constexpr std::string_view novel_prefix = "novel:";

inline std::string novel_label(std::size_t index)
{
    return std::string(novel_prefix) + std::to_string(index);
}

inline bool is_novel_label(std::string_view label)
{
    return label.substr(0, novel_prefix.size()) == novel_prefix;
}

// Final label of one new usage: an old sense id or a per-word `novel:<i>` cluster id.
struct Prediction {
    std::string word;
    std::string usage_id;
    std::string label;
    Provenance provenance = Provenance::wsd;

    bool operator==(const Prediction &) const = default;
};

inline void sort_predictions(std::vector<Prediction> &preds)
{
    std::sort(preds.begin(), preds.end(), [](const Prediction &a, const Prediction &b) {
        return a.word != b.word ? a.word < b.word : a.usage_id < b.usage_id;
    });
}

// `word<TAB>usage_id<TAB>label<TAB>provenance`, no header.
inline void write_predictions(std::ostream &out, std::span<const Prediction> preds)
{
    for (const auto &p : preds) {
        out << tsv::escape(p.word) << '\t' << tsv::escape(p.usage_id) << '\t' << tsv::escape(p.label) << '\t'
            << to_string(p.provenance) << '\n';
    }
}

inline std::vector<Prediction> read_predictions(std::istream &in)
{
    std::vector<Prediction> out;
    std::string line;
    std::size_t lineno = 0;
    while (tsv::read_line(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        const auto f = tsv::split(line);
        if (f.size() != 4) {
            throw ParseError(lineno, "expected 'word<TAB>usage_id<TAB>label<TAB>provenance'");
        }
        auto word = tsv::try_unescape(f[0]);
        auto id = tsv::try_unescape(f[1]);
        auto label = tsv::try_unescape(f[2]);
        auto prov = parse_provenance(f[3]);
        if (!word || !id || !label || label->empty() || !prov) {
            throw ParseError(lineno, "malformed prediction row");
        }
        out.push_back({std::move(*word), std::move(*id), std::move(*label), *prov});
    }
    return out;
}

} // namespace scmkit

#endif
