#ifndef SCMKIT_METRICS_HPP
#define SCMKIT_METRICS_HPP

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "scmkit/corpus.hpp"
#include "scmkit/error.hpp"
#include "scmkit/prediction.hpp"
#include "scmkit/tsv.hpp"

namespace scmkit
{

namespace detail
{

inline double pairs(std::size_t x)
{
    return static_cast<double>(x) * static_cast<double>(x - (x > 0)) / 2.0;
}

template <typename L>
std::vector<std::size_t> index_labels(std::span<const L> labels, std::size_t &distinct)
{
    std::map<L, std::size_t> ids;
    std::vector<std::size_t> out;
    out.reserve(labels.size());
    for (const auto &l : labels) {
        out.push_back(ids.try_emplace(l, ids.size()).first->second);
    }
    distinct = ids.size();
    return out;
}

} // namespace detail

// Hubert-Arabie adjusted Rand index from the contingency table. Two identical trivial
// partitions (all singletons or all one cluster) score 1.
template <typename L>
double adjusted_rand_index(std::span<const L> gold, std::span<const L> pred)
{
    if (gold.size() != pred.size()) {
        throw Error("ARI: gold and predicted label counts differ");
    }
    if (gold.empty()) {
        throw Error("ARI: no labels");
    }
    std::size_t ng = 0, np = 0;
    const auto g = detail::index_labels(gold, ng);
    const auto p = detail::index_labels(pred, np);
    std::vector<std::size_t> table(ng * np, 0), rows(ng, 0), cols(np, 0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        ++table[g[i] * np + p[i]];
        ++rows[g[i]];
        ++cols[p[i]];
    }
    double index = 0.0, a = 0.0, b = 0.0;
    for (auto c : table) {
        index += detail::pairs(c);
    }
    for (auto r : rows) {
        a += detail::pairs(r);
    }
    for (auto c : cols) {
        b += detail::pairs(c);
    }
    const double total = detail::pairs(gold.size());
    if (total == 0.0) {
        return 1.0;
    }
    const double expected = a * b / total;
    const double max_index = (a + b) / 2.0;
    if (max_index == expected) {
        return 1.0;
    }
    return (index - expected) / (max_index - expected);
}

template <typename L>
double adjusted_rand_index(const std::vector<L> &gold, const std::vector<L> &pred)
{
    return adjusted_rand_index(std::span<const L>(gold), std::span<const L>(pred));
}

// True when no new usage of the word carries an old sense as its gold label.
inline bool has_disjoint_senses(const TargetWordRecord &word)
{
    return std::none_of(word.new_usages.begin(), word.new_usages.end(),
                        [&](const Usage &u) { return u.gold_sense && word.is_old_sense(*u.gold_sense); });
}

namespace detail
{

inline std::map<std::string, std::string> labels_by_usage(const TargetWordRecord &word,
                                                          std::span<const Prediction> preds)
{
    std::map<std::string, std::string> out;
    for (const auto &p : preds) {
        if (p.word == word.word) {
            out[p.usage_id] = p.label;
        }
    }
    for (const auto &u : word.new_usages) {
        if (!out.contains(u.usage_id)) {
            throw Error("no prediction for usage '" + u.usage_id + "' of '" + word.word + "'");
        }
        if (!u.gold_sense) {
            throw Error("usage '" + u.usage_id + "' of '" + word.word + "' has no gold label");
        }
    }
    return out;
}

} // namespace detail

// Shared-task F1 of one word: macro F1 over its old senses, computed on new usages whose
// gold label is an old sense. Such usages predicted as anything but an old sense form one
// extra "novel" class that scores 0 and joins the average. Words without any new usage of
// an old sense score 1 if no usage is predicted as an old sense, else 0.
inline double axolotl_f1(const TargetWordRecord &word, std::span<const Prediction> preds)
{
    const auto pred = detail::labels_by_usage(word, preds);
    if (has_disjoint_senses(word)) {
        for (const auto &u : word.new_usages) {
            if (word.is_old_sense(pred.at(u.usage_id))) {
                return 0.0;
            }
        }
        return 1.0;
    }
    const std::size_t k = word.old_senses.size();
    std::vector<std::size_t> tp(k, 0), gold_n(k, 0), pred_n(k, 0);
    bool any_novel = false;
    for (const auto &u : word.new_usages) {
        const auto gi = word.old_sense_index(*u.gold_sense);
        if (!gi) {
            continue;
        }
        ++gold_n[*gi];
        const auto pi = word.old_sense_index(pred.at(u.usage_id));
        if (!pi) {
            any_novel = true;
            continue;
        }
        ++pred_n[*pi];
        if (*pi == *gi) {
            ++tp[*gi];
        }
    }
    double sum = 0.0;
    for (std::size_t s = 0; s < k; ++s) {
        if (tp[s] == 0) {
            continue;
        }
        const double precision = static_cast<double>(tp[s]) / static_cast<double>(pred_n[s]);
        const double recall = static_cast<double>(tp[s]) / static_cast<double>(gold_n[s]);
        sum += 2.0 * precision * recall / (precision + recall);
    }
    return sum / static_cast<double>(k + (any_novel ? 1 : 0));
}

namespace detail
{

inline void check_binary(std::span<const double> scores, std::span<const int> labels)
{
    if (scores.size() != labels.size()) {
        throw Error("score and label counts differ");
    }
    std::size_t pos = 0;
    for (int l : labels) {
        if (l != 0 && l != 1) {
            throw Error("labels must be 0 or 1");
        }
        pos += static_cast<std::size_t>(l);
    }
    if (pos == 0 || pos == labels.size()) {
        throw DegenerateInput("need at least one positive and one negative example");
    }
}

// (recall, precision) after each block of equal scores, highest scores first.
inline std::vector<std::pair<double, double>> ranked_points(std::span<const double> scores, std::span<const int> labels)
{
    check_binary(scores, labels);
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    const auto positives = static_cast<double>(std::count(labels.begin(), labels.end(), 1));
    std::vector<std::pair<double, double>> pts;
    std::size_t seen = 0, hits = 0;
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            hits += static_cast<std::size_t>(labels[order[j]]);
            ++j;
        }
        seen = j;
        pts.emplace_back(static_cast<double>(hits) / positives, static_cast<double>(hits) / static_cast<double>(seen));
        i = j;
    }
    return pts;
}

} // namespace detail

// Sum over score thresholds of (recall gain) x precision; equal scores form one threshold.
inline double average_precision(std::span<const double> scores, std::span<const int> labels)
{
    double ap = 0.0, prev_recall = 0.0;
    for (const auto &[recall, precision] : detail::ranked_points(scores, labels)) {
        ap += (recall - prev_recall) * precision;
        prev_recall = recall;
    }
    return ap;
}

struct PrPoint {
    double recall = 0.0;
    double precision = 0.0;
};

// One point per distinct score threshold, in order of non-decreasing recall.
inline std::vector<PrPoint> pr_curve(std::span<const double> scores, std::span<const int> labels)
{
    std::vector<PrPoint> out;
    for (const auto &[r, p] : detail::ranked_points(scores, labels)) {
        out.push_back({r, p});
    }
    return out;
}

inline void write_pr_curve(std::ostream &out, std::span<const PrPoint> curve)
{
    out << "recall\tprecision\n";
    for (const auto &p : curve) {
        out << tsv::format_double(p.recall) << '\t' << tsv::format_double(p.precision) << '\n';
    }
}

struct WordScore {
    std::string word;
    double ari = 0.0;
    double f1 = 0.0;
    std::size_t n_new_usages = 0;
    bool disjoint = false;
};

struct EvalReport {
    std::vector<WordScore> per_word;
    double mean_ari = 0.0;
    double mean_f1 = 0.0;
    std::size_t n_disjoint = 0;
};

// Per-word ARI and F1 over new usages; aggregates are unweighted means over words.
// Words without new usages are skipped.
inline EvalReport evaluate(const Dataset &gold, std::span<const Prediction> preds)
{
    std::map<std::string, std::vector<Prediction>> by_word;
    for (const auto &p : preds) {
        by_word[p.word].push_back(p);
    }
    EvalReport report;
    for (const auto &w : gold.words) {
        if (w.new_usages.empty()) {
            continue;
        }
        const auto &wp = by_word[w.word];
        const auto labels = detail::labels_by_usage(w, wp);
        std::vector<std::string> g, p;
        for (const auto &u : w.new_usages) {
            g.push_back(*u.gold_sense);
            p.push_back(labels.at(u.usage_id));
        }
        WordScore s;
        s.word = w.word;
        s.ari = adjusted_rand_index(g, p);
        s.f1 = axolotl_f1(w, wp);
        s.n_new_usages = w.new_usages.size();
        s.disjoint = has_disjoint_senses(w);
        report.n_disjoint += s.disjoint ? 1 : 0;
        report.per_word.push_back(std::move(s));
    }
    std::sort(report.per_word.begin(), report.per_word.end(),
              [](const WordScore &a, const WordScore &b) { return a.word < b.word; });
    if (!report.per_word.empty()) {
        for (const auto &s : report.per_word) {
            report.mean_ari += s.ari;
            report.mean_f1 += s.f1;
        }
        report.mean_ari /= static_cast<double>(report.per_word.size());
        report.mean_f1 /= static_cast<double>(report.per_word.size());
    }
    return report;
}

inline void write_report(std::ostream &out, const EvalReport &r)
{
    out << "word\tari\tf1\tn_new_usages\tdisjoint\n";
    std::size_t total = 0;
    for (const auto &s : r.per_word) {
        out << tsv::escape(s.word) << '\t' << tsv::format_double(s.ari) << '\t' << tsv::format_double(s.f1) << '\t'
            << s.n_new_usages << '\t' << (s.disjoint ? 1 : 0) << '\n';
        total += s.n_new_usages;
    }
    out << "#aggregate\t" << tsv::format_double(r.mean_ari) << '\t' << tsv::format_double(r.mean_f1) << '\t' << total
        << '\t' << r.n_disjoint << '\n';
}

} // namespace scmkit

#endif
