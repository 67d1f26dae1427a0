#ifndef SCMKIT_GEOMETRY_HPP
#define SCMKIT_GEOMETRY_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <istream>
#include <map>
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

using Vector = std::vector<double>;
using VectorView = std::span<const double>;

enum class EntryKind { usage, gloss };

inline std::string_view to_string(EntryKind k)
{
    return k == EntryKind::usage ? "usage" : "gloss";
}

// Precomputed vectors of one encoder ("space"): context vectors keyed by usage_id and
// gloss vectors keyed by sense_id. Immutable once loaded.
class EmbeddingTable
{
public:
    EmbeddingTable(std::string space_name, std::size_t dim) : space_name_(std::move(space_name)), dim_(dim)
    {
        if (dim_ == 0) {
            throw Error("embedding dimension must be positive");
        }
    }

    const std::string &space_name() const noexcept { return space_name_; }
    std::size_t dim() const noexcept { return dim_; }

    void insert(EntryKind kind, std::string id, Vector v)
    {
        if (v.size() != dim_) {
            throw Error(std::string(to_string(kind)) + " '" + id + "' has " + std::to_string(v.size()) +
                        " components, expected " + std::to_string(dim_));
        }
        for (double x : v) {
            if (!std::isfinite(x)) {
                throw Error(std::string(to_string(kind)) + " '" + id + "' has a non-finite component");
            }
        }
        auto [it, fresh] = storage(kind).try_emplace(std::move(id), std::move(v));
        if (!fresh) {
            throw Error("duplicate " + std::string(to_string(kind)) + " id '" + it->first + "'");
        }
    }

    std::optional<VectorView> find(EntryKind kind, std::string_view id) const
    {
        const auto &m = entries(kind);
        auto it = m.find(id);
        if (it == m.end()) {
            return std::nullopt;
        }
        return VectorView(it->second);
    }

    VectorView at(EntryKind kind, std::string_view id) const
    {
        auto v = find(kind, id);
        if (!v) {
            throw MissingEmbedding(std::string(to_string(kind)) + " (space '" + space_name_ + "')", std::string(id));
        }
        return *v;
    }

    VectorView usage(std::string_view id) const { return at(EntryKind::usage, id); }
    VectorView gloss(std::string_view id) const { return at(EntryKind::gloss, id); }

    bool contains(EntryKind kind, std::string_view id) const { return find(kind, id).has_value(); }

    std::size_t size(EntryKind kind) const { return entries(kind).size(); }

    const std::map<std::string, Vector, std::less<>> &entries(EntryKind kind) const
    {
        return kind == EntryKind::usage ? usages_ : glosses_;
    }

private:
    std::map<std::string, Vector, std::less<>> &storage(EntryKind kind)
    {
        return kind == EntryKind::usage ? usages_ : glosses_;
    }

    std::string space_name_;
    std::size_t dim_;
    std::map<std::string, Vector, std::less<>> usages_;
    std::map<std::string, Vector, std::less<>> glosses_;
};

// Header `#space <name> dim <d>`, then `<kind>\t<id>\t<f1> ... <fd>` rows.
inline EmbeddingTable load_embeddings(std::istream &in)
{
    std::string line;
    std::size_t lineno = 0;
    if (!tsv::read_line(in, line)) {
        throw ParseError(0, "empty embedding file: missing '#space <name> dim <d>' header");
    }
    ++lineno;
    const auto head = tsv::split_ws(line);
    const auto dim = head.size() == 4 ? tsv::parse_int(head[3]) : std::nullopt;
    if (head.size() != 4 || head[0] != "#space" || head[2] != "dim" || !dim || *dim <= 0) {
        throw ParseError(lineno, "expected header '#space <name> dim <d>'");
    }
    EmbeddingTable table(std::string(head[1]), static_cast<std::size_t>(*dim));

    while (tsv::read_line(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        auto fields = tsv::split(line);
        std::string_view kind_s, id;
        std::vector<std::string_view> values;
        if (fields.size() >= 3) {
            kind_s = fields[0];
            id = fields[1];
            for (std::size_t i = 2; i < fields.size(); ++i) {
                for (auto tok : tsv::split_ws(fields[i])) {
                    values.push_back(tok);
                }
            }
        } else {
            const auto toks = tsv::split_ws(line);
            if (toks.size() < 2) {
                throw ParseError(lineno, "expected '<kind>\\t<id>\\t<values>'");
            }
            kind_s = toks[0];
            id = toks[1];
            values.assign(toks.begin() + 2, toks.end());
        }
        EntryKind kind;
        if (kind_s == "usage") {
            kind = EntryKind::usage;
        } else if (kind_s == "gloss") {
            kind = EntryKind::gloss;
        } else {
            throw ParseError(lineno, "unknown kind '" + std::string(kind_s) + "' (expected usage or gloss)");
        }
        if (values.size() != table.dim()) {
            throw ParseError(lineno, std::string(kind_s) + " '" + std::string(id) + "' has " +
                                         std::to_string(values.size()) + " values, expected " +
                                         std::to_string(table.dim()));
        }
        Vector v;
        v.reserve(values.size());
        for (auto tok : values) {
            auto x = tsv::parse_double(tok);
            if (!x) {
                throw ParseError(lineno, "non-finite or malformed value '" + std::string(tok) + "' for '" +
                                             std::string(id) + "'");
            }
            v.push_back(*x);
        }
        try {
            table.insert(kind, std::string(id), std::move(v));
        } catch (const Error &e) {
            throw ParseError(lineno, e.what());
        }
    }
    return table;
}

inline void write_embeddings(std::ostream &out, const EmbeddingTable &table)
{
    out << "#space " << table.space_name() << " dim " << table.dim() << '\n';
    for (auto kind : {EntryKind::usage, EntryKind::gloss}) {
        for (const auto &[id, v] : table.entries(kind)) {
            out << to_string(kind) << '\t' << id << '\t';
            for (std::size_t i = 0; i < v.size(); ++i) {
                out << (i ? " " : "") << tsv::format_double(v[i]);
            }
            out << '\n';
        }
    }
}

enum class Norm { none, l1, l2 };
enum class Distance { cosine, euclidean, manhattan };

inline std::string_view to_string(Norm n)
{
    switch (n) {
    case Norm::l1: return "l1";
    case Norm::l2: return "l2";
    default: return "none";
    }
}

inline std::string_view to_string(Distance d)
{
    switch (d) {
    case Distance::cosine: return "cos";
    case Distance::euclidean: return "euclid";
    default: return "manh";
    }
}

namespace detail
{

inline void check_dims(VectorView a, VectorView b)
{
    if (a.size() != b.size()) {
        throw Error("dimension mismatch: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
    }
}

} // namespace detail

inline double dot(VectorView a, VectorView b)
{
    detail::check_dims(a, b);
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

inline double l1_norm(VectorView v)
{
    double s = 0.0;
    for (double x : v) {
        s += std::abs(x);
    }
    return s;
}

inline double l2_norm(VectorView v)
{
    double s = 0.0;
    for (double x : v) {
        s += x * x;
    }
    return std::sqrt(s);
}

inline Vector normalize(VectorView v, Norm mode)
{
    Vector out(v.begin(), v.end());
    if (mode == Norm::none) {
        return out;
    }
    const double n = mode == Norm::l1 ? l1_norm(v) : l2_norm(v);
    if (n == 0.0) {
        throw DegenerateInput("cannot " + std::string(to_string(mode)) + "-normalize a zero vector");
    }
    for (auto &x : out) {
        x /= n;
    }
    return out;
}

inline double distance(VectorView a, VectorView b, Distance fn)
{
    detail::check_dims(a, b);
    switch (fn) {
    case Distance::cosine: {
        const double na = l2_norm(a);
        const double nb = l2_norm(b);
        if (na == 0.0 || nb == 0.0) {
            throw DegenerateInput("cosine distance is undefined for a zero vector");
        }
        const double d = 1.0 - dot(a, b) / (na * nb);
        return std::clamp(d, 0.0, 2.0);
    }
    case Distance::euclidean: {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double t = a[i] - b[i];
            s += t * t;
        }
        return std::sqrt(s);
    }
    case Distance::manhattan: {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            s += std::abs(a[i] - b[i]);
        }
        return s;
    }
    }
    return 0.0;
}

} // namespace scmkit

#endif
