#ifndef SCMKIT_CORPUS_HPP
#define SCMKIT_CORPUS_HPP

#include <algorithm>
#include <array>
#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "scmkit/error.hpp"
#include "scmkit/tsv.hpp"
#include "scmkit/unicode.hpp"

namespace scmkit
{

enum class Period { old_period, new_period };

inline std::string_view to_string(Period p)
{
    return p == Period::old_period ? "old" : "new";
}

inline std::optional<Period> parse_period(std::string_view s)
{
    if (s == "old") {
        return Period::old_period;
    }
    if (s == "new") {
        return Period::new_period;
    }
    return std::nullopt;
}

// Half-open range of code-point offsets of the target word inside a usage text.
struct Span {
    std::size_t start = 0;
    std::size_t end = 0;

    bool operator==(const Span &) const = default;
};

struct Usage {
    std::string usage_id;
    std::string word;
    Period period = Period::new_period;
    std::string text;
    std::optional<Span> span;
    std::optional<std::string> gold_sense;

    bool operator==(const Usage &) const = default;
};

struct SenseEntry {
    std::string sense_id;
    std::string word;
    std::string gloss;
    Period period_of_record = Period::old_period;

    bool operator==(const SenseEntry &) const = default;
};

struct UsageCounts {
    std::size_t n_old_usages = 0;
    std::size_t n_old_senses = 0;
    std::size_t n_new_usages = 0;

    bool operator==(const UsageCounts &) const = default;
};

// All data for one target lemma. Sense vectors keep inventory order (order of first
// declaration in the input), which is what tie-breaking rules refer to.
struct TargetWordRecord {
    std::string word;
    std::vector<Usage> old_usages;
    std::vector<Usage> new_usages;
    std::vector<SenseEntry> old_senses;
    // Senses only recorded for the new period (gained senses with glosses). Not used by
    // any method; kept so that gold annotations survive a write/parse cycle.
    std::vector<SenseEntry> new_senses;

    UsageCounts counts() const { return {old_usages.size(), old_senses.size(), new_usages.size()}; }

    std::optional<std::size_t> old_sense_index(std::string_view sense_id) const
    {
        for (std::size_t i = 0; i < old_senses.size(); ++i) {
            if (old_senses[i].sense_id == sense_id) {
                return i;
            }
        }
        return std::nullopt;
    }

    bool is_old_sense(std::string_view sense_id) const { return old_sense_index(sense_id).has_value(); }

    std::vector<std::string> old_sense_ids() const
    {
        std::vector<std::string> ids;
        ids.reserve(old_senses.size());
        for (const auto &s : old_senses) {
            ids.push_back(s.sense_id);
        }
        return ids;
    }

    bool operator==(const TargetWordRecord &) const = default;
};

struct Dataset {
    std::vector<TargetWordRecord> words;

    const TargetWordRecord *find(std::string_view word) const
    {
        for (const auto &w : words) {
            if (w.word == word) {
                return &w;
            }
        }
        return nullptr;
    }

    bool operator==(const Dataset &) const = default;
};

inline constexpr std::array<std::string_view, 8> dataset_columns{"word", "usage_id", "period", "text",
                                                                 "start", "end", "sense_id", "gloss"};

namespace detail
{

struct word_builder {
    TargetWordRecord record;
    // sense_id -> (gloss, period, declaration order)
    struct sense_info {
        std::string gloss;
        bool old = false;
        std::size_t order = 0;
    };
    std::map<std::string, sense_info> senses;
    std::vector<std::pair<std::string, std::size_t>> old_refs; // (sense_id, line)
};

} // namespace detail

// Reads the dataset TSV. Rows with an empty usage_id declare a sense (sense_id + gloss)
// without a usage; usage rows may also carry the gloss of their sense.
inline Dataset parse_dataset(std::istream &in)
{
    std::string line;
    std::size_t lineno = 0;
    if (!tsv::read_line(in, line)) {
        throw ParseError(0, "empty dataset: missing header row");
    }
    ++lineno;
    const auto header = tsv::split(line);
    std::array<std::size_t, dataset_columns.size()> col{};
    for (std::size_t c = 0; c < dataset_columns.size(); ++c) {
        auto it = std::find(header.begin(), header.end(), dataset_columns[c]);
        if (it == header.end()) {
            throw ParseError(lineno, "header is missing column '" + std::string(dataset_columns[c]) + "'");
        }
        col[c] = static_cast<std::size_t>(it - header.begin());
    }
    enum { WORD, USAGE_ID, PERIOD, TEXT, START, END, SENSE_ID, GLOSS };

    std::vector<detail::word_builder> builders;
    std::unordered_map<std::string, std::size_t> word_index;
    std::set<std::string> usage_ids;
    std::map<std::string, std::string> sense_owner; // sense_id -> word
    std::size_t sense_counter = 0;

    while (tsv::read_line(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        const auto raw = tsv::split(line);
        if (raw.size() != header.size()) {
            throw ParseError(lineno, "expected " + std::to_string(header.size()) + " fields, got " +
                                         std::to_string(raw.size()));
        }
        std::array<std::string, dataset_columns.size()> f;
        for (std::size_t c = 0; c < f.size(); ++c) {
            auto v = tsv::try_unescape(raw[col[c]]);
            if (!v) {
                throw ParseError(lineno, "bad escape sequence in column '" + std::string(dataset_columns[c]) + "'");
            }
            f[c] = std::move(*v);
        }
        if (f[WORD].empty()) {
            throw ParseError(lineno, "empty word");
        }
        const auto period = parse_period(f[PERIOD]);
        if (!period) {
            throw ParseError(lineno, "period must be 'old' or 'new', got '" + f[PERIOD] + "'");
        }
        auto [wit, inserted] = word_index.try_emplace(f[WORD], builders.size());
        if (inserted) {
            builders.emplace_back();
            builders.back().record.word = f[WORD];
        }
        auto &b = builders[wit->second];

        if (!f[GLOSS].empty()) {
            if (f[SENSE_ID].empty()) {
                throw ParseError(lineno, "gloss given without sense_id");
            }
            auto [owner, fresh] = sense_owner.try_emplace(f[SENSE_ID], f[WORD]);
            if (!fresh && owner->second != f[WORD]) {
                throw ParseError(lineno, "sense_id '" + f[SENSE_ID] + "' already declared for word '" +
                                             owner->second + "'");
            }
            auto [sit, sfresh] = b.senses.try_emplace(f[SENSE_ID]);
            if (sfresh) {
                sit->second.gloss = f[GLOSS];
                sit->second.order = sense_counter++;
            } else if (sit->second.gloss != f[GLOSS]) {
                throw ParseError(lineno, "conflicting glosses for sense '" + f[SENSE_ID] + "'");
            }
            sit->second.old = sit->second.old || *period == Period::old_period;
        }

        if (f[USAGE_ID].empty()) {
            if (f[GLOSS].empty() || !f[TEXT].empty() || !f[START].empty() || !f[END].empty()) {
                throw ParseError(lineno, "row without usage_id must declare only a sense_id and gloss");
            }
            continue;
        }
        if (!usage_ids.insert(f[USAGE_ID]).second) {
            throw ParseError(lineno, "duplicate usage_id '" + f[USAGE_ID] + "'");
        }

        Usage u;
        u.usage_id = f[USAGE_ID];
        u.word = f[WORD];
        u.period = *period;
        u.text = f[TEXT];
        const auto text_len = unicode::try_decode(u.text);
        if (!text_len) {
            throw ParseError(lineno, "text is not valid UTF-8");
        }
        if (f[START].empty() != f[END].empty()) {
            throw ParseError(lineno, "start and end must both be given or both be empty");
        }
        if (!f[START].empty()) {
            const auto s = tsv::parse_int(f[START]);
            const auto e = tsv::parse_int(f[END]);
            if (!s || !e) {
                throw ParseError(lineno, "malformed span '" + f[START] + "', '" + f[END] + "'");
            }
            if (*s < 0 || *s >= *e || static_cast<std::size_t>(*e) > text_len->size()) {
                throw ParseError(lineno, "span (" + f[START] + ", " + f[END] + ") out of bounds for text of length " +
                                             std::to_string(text_len->size()));
            }
            u.span = Span{static_cast<std::size_t>(*s), static_cast<std::size_t>(*e)};
        }
        if (!f[SENSE_ID].empty()) {
            u.gold_sense = f[SENSE_ID];
        }
        if (u.period == Period::old_period) {
            if (!u.gold_sense) {
                throw ParseError(lineno, "old usage '" + u.usage_id + "' has empty sense_id");
            }
            b.old_refs.emplace_back(*u.gold_sense, lineno);
            b.record.old_usages.push_back(std::move(u));
        } else {
            b.record.new_usages.push_back(std::move(u));
        }
    }

    Dataset ds;
    ds.words.reserve(builders.size());
    for (auto &b : builders) {
        for (const auto &[sense, ref_line] : b.old_refs) {
            auto it = b.senses.find(sense);
            if (it == b.senses.end()) {
                throw ParseError(ref_line, "old usage references sense '" + sense + "' which has no gloss");
            }
            it->second.old = true;
        }
        std::vector<std::pair<std::size_t, SenseEntry>> ordered;
        for (auto &[id, info] : b.senses) {
            ordered.emplace_back(info.order, SenseEntry{id, b.record.word, info.gloss,
                                                        info.old ? Period::old_period : Period::new_period});
        }
        std::sort(ordered.begin(), ordered.end(), [](const auto &x, const auto &y) { return x.first < y.first; });
        for (auto &[order, entry] : ordered) {
            (entry.period_of_record == Period::old_period ? b.record.old_senses : b.record.new_senses)
                .push_back(std::move(entry));
        }
        ds.words.push_back(std::move(b.record));
    }
    return ds;
}

// Canonical writer: sense declaration rows first, then usage rows with an empty gloss.
inline void write_dataset(std::ostream &out, const Dataset &ds)
{
    for (std::size_t c = 0; c < dataset_columns.size(); ++c) {
        out << (c ? "\t" : "") << dataset_columns[c];
    }
    out << '\n';
    for (const auto &w : ds.words) {
        const auto word = tsv::escape(w.word);
        for (const auto *senses : {&w.old_senses, &w.new_senses}) {
            for (const auto &s : *senses) {
                out << word << "\t\t" << to_string(s.period_of_record) << "\t\t\t\t" << tsv::escape(s.sense_id)
                    << '\t' << tsv::escape(s.gloss) << '\n';
            }
        }
        for (const auto *usages : {&w.old_usages, &w.new_usages}) {
            for (const auto &u : *usages) {
                out << word << '\t' << tsv::escape(u.usage_id) << '\t' << to_string(u.period) << '\t'
                    << tsv::escape(u.text) << '\t';
                if (u.span) {
                    out << u.span->start << '\t' << u.span->end;
                } else {
                    out << '\t';
                }
                out << '\t' << (u.gold_sense ? tsv::escape(*u.gold_sense) : "") << "\t\n";
            }
        }
    }
}

struct WordFormList {
    std::string word;
    std::vector<std::string> forms;

    bool operator==(const WordFormList &) const = default;
};

// `lemma<TAB>form1,form2,...`; the lemma is added to its own form list when absent.
inline std::map<std::string, WordFormList> parse_word_forms(std::istream &in)
{
    std::map<std::string, WordFormList> out;
    std::string line;
    std::size_t lineno = 0;
    while (tsv::read_line(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        const auto fields = tsv::split(line);
        if (fields.size() != 2 || fields[0].empty()) {
            throw ParseError(lineno, "expected 'lemma<TAB>form1,form2,...'");
        }
        auto &entry = out[std::string(fields[0])];
        entry.word = fields[0];
        for (auto form : tsv::split(fields[1], ',')) {
            if (!form.empty() && std::find(entry.forms.begin(), entry.forms.end(), form) == entry.forms.end()) {
                entry.forms.emplace_back(form);
            }
        }
        const auto lemma_lower = unicode::to_lower(std::string_view(entry.word));
        const bool has_lemma = std::any_of(entry.forms.begin(), entry.forms.end(), [&](const std::string &f) {
            return unicode::to_lower(std::string_view(f)) == lemma_lower;
        });
        if (!has_lemma) {
            entry.forms.insert(entry.forms.begin(), entry.word);
        }
    }
    return out;
}

inline void write_word_forms(std::ostream &out, const std::map<std::string, WordFormList> &forms)
{
    for (const auto &[lemma, list] : forms) {
        out << lemma << '\t';
        for (std::size_t i = 0; i < list.forms.size(); ++i) {
            out << (i ? "," : "") << list.forms[i];
        }
        out << '\n';
    }
}

} // namespace scmkit

#endif
