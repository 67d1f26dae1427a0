// Slow, direct reference implementations used to check the library.
#ifndef SCMKIT_TESTS_ORACLES_HPP
#define SCMKIT_TESTS_ORACLES_HPP

#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include "scmkit/clustering.hpp"
#include "scmkit/geometry.hpp"

namespace oracle
{

using scmkit::DistanceMatrix;
using scmkit::Partition;
using scmkit::Vector;

// Average linkage recomputing every cluster-pair average from the raw matrix at each
// step. Clusters stay sorted by smallest member, so the first strict minimum is the pair
// with the smallest (first point, first point) indices. Averages are compared by
// cross-multiplication, which is exact for small-integer matrices.
inline Partition average_linkage(const DistanceMatrix &d, std::size_t k)
{
    const std::size_t n = d.size();
    std::vector<std::vector<std::size_t>> clusters;
    for (std::size_t i = 0; i < n; ++i) {
        clusters.push_back({i});
    }
    while (clusters.size() > k) {
        std::size_t ba = 0, bb = 1;
        double best_sum = 0, best_pairs = 0;
        bool have = false;
        for (std::size_t a = 0; a < clusters.size(); ++a) {
            for (std::size_t b = a + 1; b < clusters.size(); ++b) {
                double sum = 0;
                for (auto i : clusters[a]) {
                    for (auto j : clusters[b]) {
                        sum += d(i, j);
                    }
                }
                const double pairs = static_cast<double>(clusters[a].size() * clusters[b].size());
                if (!have || sum * best_pairs < best_sum * pairs) {
                    have = true;
                    best_sum = sum;
                    best_pairs = pairs;
                    ba = a;
                    bb = b;
                }
            }
        }
        clusters[ba].insert(clusters[ba].end(), clusters[bb].begin(), clusters[bb].end());
        clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bb));
    }
    Partition out(n);
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        for (auto i : clusters[c]) {
            out[i] = c;
        }
    }
    return out;
}

// Symmetric matrix with a zero diagonal; integer entries in 1..4 make ties common.
inline DistanceMatrix random_matrix(std::mt19937_64 &rng, std::size_t n, bool integer)
{
    std::uniform_int_distribution<int> small(1, 4);
    std::uniform_real_distribution<double> real(0.0, 2.0);
    DistanceMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            m(i, j) = m(j, i) = integer ? small(rng) : real(rng);
        }
    }
    return m;
}

// ARI from counts over all point pairs: together in both, apart in both, or split.
template <typename L>
double pair_counting_ari(const std::vector<L> &gold, const std::vector<L> &pred)
{
    double both = 0, neither = 0, gold_only = 0, pred_only = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        for (std::size_t j = i + 1; j < gold.size(); ++j) {
            const bool g = gold[i] == gold[j];
            const bool p = pred[i] == pred[j];
            both += g && p;
            neither += !g && !p;
            gold_only += g && !p;
            pred_only += !g && p;
        }
    }
    const double den = (both + pred_only) * (pred_only + neither) + (both + gold_only) * (gold_only + neither);
    if (den == 0.0) {
        return 1.0;
    }
    return 2.0 * (both * neither - gold_only * pred_only) / den;
}

struct LogRegProblem {
    std::vector<Vector> rows;
    std::vector<int> labels;
};

// Labels drawn from a logistic model, so the classes overlap and the optimum is finite.
inline LogRegProblem random_logreg_problem(std::mt19937_64 &rng, std::size_t n, std::size_t d)
{
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Vector truth(d);
    for (auto &w : truth) {
        w = nd(rng);
    }
    LogRegProblem p;
    while (true) {
        p.rows.clear();
        p.labels.clear();
        std::size_t pos = 0;
        for (std::size_t i = 0; i < n; ++i) {
            Vector x(d);
            double z = 0.3;
            for (std::size_t j = 0; j < d; ++j) {
                x[j] = nd(rng);
                z += truth[j] * x[j];
            }
            p.rows.push_back(x);
            p.labels.push_back(unit(rng) < 1.0 / (1.0 + std::exp(-z)) ? 1 : 0);
            pos += static_cast<std::size_t>(p.labels.back());
        }
        if (pos > 0 && pos < n) {
            return p;
        }
    }
}

// Penalized logistic loss and its gradient written out from the definition;
// theta = (w, b) with the bias unpenalized.
inline double logreg_value(const LogRegProblem &p, const Vector &theta, double c)
{
    const std::size_t d = theta.size() - 1;
    double f = 0.0;
    for (std::size_t i = 0; i < p.rows.size(); ++i) {
        double z = theta[d];
        for (std::size_t j = 0; j < d; ++j) {
            z += theta[j] * p.rows[i][j];
        }
        const double y = p.labels[i] == 1 ? 1.0 : -1.0;
        f += std::log1p(std::exp(-y * z));
    }
    for (std::size_t j = 0; j < d; ++j) {
        f += theta[j] * theta[j] / (2.0 * c);
    }
    return f;
}

inline Vector logreg_gradient(const LogRegProblem &p, const Vector &theta, double c)
{
    const std::size_t d = theta.size() - 1;
    Vector g(d + 1, 0.0);
    for (std::size_t i = 0; i < p.rows.size(); ++i) {
        double z = theta[d];
        for (std::size_t j = 0; j < d; ++j) {
            z += theta[j] * p.rows[i][j];
        }
        const double r = 1.0 / (1.0 + std::exp(-z)) - p.labels[i];
        for (std::size_t j = 0; j < d; ++j) {
            g[j] += r * p.rows[i][j];
        }
        g[d] += r;
    }
    for (std::size_t j = 0; j < d; ++j) {
        g[j] += theta[j] / c;
    }
    return g;
}

// Plain gradient descent with the fixed step 1/L, where |[X 1]|_F^2 / 4 + 1/c bounds the
// Hessian norm. Runs until the gradient is at rounding level.
inline Vector logreg_gd(const LogRegProblem &p, double c)
{
    const std::size_t d = p.rows[0].size();
    double fro = 0.0;
    for (const auto &x : p.rows) {
        fro += 1.0;
        for (double v : x) {
            fro += v * v;
        }
    }
    const double step = 1.0 / (fro / 4.0 + 1.0 / c);
    Vector theta(d + 1, 0.0);
    for (int it = 0; it < 2000000; ++it) {
        const auto g = logreg_gradient(p, theta, c);
        double m = 0.0;
        for (double v : g) {
            m = std::max(m, std::abs(v));
        }
        if (m < 1e-11) {
            break;
        }
        for (std::size_t j = 0; j <= d; ++j) {
            theta[j] -= step * g[j];
        }
    }
    return theta;
}

} // namespace oracle

#endif
