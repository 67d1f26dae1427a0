#ifndef SCMKIT_LOGREG_HPP
#define SCMKIT_LOGREG_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "scmkit/error.hpp"
#include "scmkit/geometry.hpp"

namespace scmkit
{

inline double sigmoid(double z)
{
    if (z >= 0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 + exp(x)) without overflow.
inline double softplus(double x)
{
    return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

// Standardization parameters; zero-variance columns keep std = 1.
struct ScalerParams {
    Vector mean;
    Vector std;

    Vector transform(VectorView x) const
    {
        if (x.size() != mean.size()) {
            throw Error("scaler expects " + std::to_string(mean.size()) + " features, got " + std::to_string(x.size()));
        }
        Vector out(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            out[i] = (x[i] - mean[i]) / std[i];
        }
        return out;
    }

    bool operator==(const ScalerParams &) const = default;
};

// Column means and population standard deviations.
inline ScalerParams fit_scaler(std::span<const Vector> rows)
{
    if (rows.size() < 2) {
        throw DegenerateInput("fit_scaler needs at least 2 rows, got " + std::to_string(rows.size()));
    }
    const std::size_t d = rows[0].size();
    ScalerParams p{Vector(d, 0.0), Vector(d, 0.0)};
    for (const auto &r : rows) {
        if (r.size() != d) {
            throw Error("fit_scaler: rows have different lengths");
        }
        for (std::size_t j = 0; j < d; ++j) {
            p.mean[j] += r[j];
        }
    }
    const auto n = static_cast<double>(rows.size());
    for (auto &m : p.mean) {
        m /= n;
    }
    for (const auto &r : rows) {
        for (std::size_t j = 0; j < d; ++j) {
            const double t = r[j] - p.mean[j];
            p.std[j] += t * t;
        }
    }
    for (auto &s : p.std) {
        s = std::sqrt(s / n);
        if (s == 0.0) {
            s = 1.0;
        }
    }
    return p;
}

struct LogRegConfig {
    double c = 1.0;       // inverse L2 strength
    double tol = 1e-8;    // stop when the gradient infinity-norm drops below this
    std::size_t max_iters = 10000;
};

struct LogRegModel {
    Vector weights;
    double bias = 0.0;

    double decision(VectorView x) const { return dot(weights, x) + bias; }
    double probability(VectorView x) const { return sigmoid(decision(x)); }
};

// Penalized negative log-likelihood
//   sum_i log(1 + exp(-y_i (w.x_i + b))) + |w|^2 / (2c),  y_i in {-1, +1},
// with an unpenalized bias. Labels are given as {0, 1}.
class LogisticObjective
{
public:
    LogisticObjective(std::span<const Vector> rows, std::span<const int> labels, double c)
        : rows_(rows), labels_(labels), c_(c)
    {
        if (rows.size() != labels.size()) {
            throw Error("logistic regression: " + std::to_string(rows.size()) + " rows but " +
                        std::to_string(labels.size()) + " labels");
        }
        if (c <= 0.0) {
            throw Error("logistic regression: c must be positive");
        }
        dim_ = rows.empty() ? 0 : rows[0].size();
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != dim_) {
                throw Error("logistic regression: rows have different lengths");
            }
            if (labels[i] != 0 && labels[i] != 1) {
                throw Error("logistic regression: labels must be 0 or 1");
            }
        }
    }

    std::size_t dim() const noexcept { return dim_; }

    // theta = (w_1 .. w_d, b)
    double value(VectorView theta) const
    {
        double f = 0.0;
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            f += softplus(-sign(i) * margin(i, theta));
        }
        double ww = 0.0;
        for (std::size_t j = 0; j < dim_; ++j) {
            ww += theta[j] * theta[j];
        }
        return f + ww / (2.0 * c_);
    }

    Vector gradient(VectorView theta) const
    {
        Vector g(dim_ + 1, 0.0);
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            const double y = sign(i);
            const double coef = -y * sigmoid(-y * margin(i, theta));
            for (std::size_t j = 0; j < dim_; ++j) {
                g[j] += coef * rows_[i][j];
            }
            g[dim_] += coef;
        }
        for (std::size_t j = 0; j < dim_; ++j) {
            g[j] += theta[j] / c_;
        }
        return g;
    }

    // value(cand) - value(theta), accurate even when far below the rounding of value().
    // Uses softplus(u + e) - softplus(u) = log1p(sigmoid(u) * expm1(e)).
    double difference(VectorView theta, VectorView cand) const
    {
        Vector step(theta.size());
        for (std::size_t j = 0; j < theta.size(); ++j) {
            step[j] = cand[j] - theta[j];
        }
        double diff = 0.0;
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            const double y = sign(i);
            const double u = -y * margin(i, theta);
            const double e = -y * margin(i, step);
            diff += std::log1p(sigmoid(u) * std::expm1(e));
        }
        for (std::size_t j = 0; j < dim_; ++j) {
            diff += step[j] * (2.0 * theta[j] + step[j]) / (2.0 * c_);
        }
        return diff;
    }

private:
    double sign(std::size_t i) const { return labels_[i] == 1 ? 1.0 : -1.0; }

    double margin(std::size_t i, VectorView theta) const
    {
        double z = theta[dim_];
        for (std::size_t j = 0; j < dim_; ++j) {
            z += theta[j] * rows_[i][j];
        }
        return z;
    }

    std::span<const Vector> rows_;
    std::span<const int> labels_;
    double c_;
    std::size_t dim_ = 0;
};

namespace detail
{

inline double inf_norm(VectorView v)
{
    double m = 0.0;
    for (double x : v) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

} // namespace detail

// Full-batch gradient descent from zero, Barzilai-Borwein trial steps, Armijo
// backtracking on accurately computed objective differences, so every accepted step
// lowers the objective. When `trace` is given it receives the objective after each
// iteration, starting at theta = 0 and tracked through those differences.
inline LogRegModel train_logreg(std::span<const Vector> rows, std::span<const int> labels, const LogRegConfig &cfg = {},
                                std::vector<double> *trace = nullptr)
{
    if (cfg.tol <= 0.0) {
        throw Error("logistic regression: tol must be positive");
    }
    const LogisticObjective obj(rows, labels, cfg.c);
    const bool has_pos = std::find(labels.begin(), labels.end(), 1) != labels.end();
    const bool has_neg = std::find(labels.begin(), labels.end(), 0) != labels.end();
    if (!has_pos || !has_neg) {
        throw DegenerateInput("logistic regression needs examples of both classes");
    }
    const std::size_t p = obj.dim() + 1;
    Vector theta(p, 0.0);
    double f = obj.value(theta);
    Vector g = obj.gradient(theta);
    if (trace) {
        trace->assign(1, f);
    }
    Vector prev_theta, prev_g;
    double step = 1.0 / (1.0 + static_cast<double>(rows.size()));

    for (std::size_t it = 0; it < cfg.max_iters && detail::inf_norm(g) >= cfg.tol; ++it) {
        if (!prev_theta.empty()) {
            double ss = 0.0, sy = 0.0;
            for (std::size_t j = 0; j < p; ++j) {
                const double s = theta[j] - prev_theta[j];
                const double y = g[j] - prev_g[j];
                ss += s * s;
                sy += s * y;
            }
            if (sy > 0.0 && std::isfinite(ss / sy)) {
                step = ss / sy;
            }
        }
        double gg = 0.0;
        for (double x : g) {
            gg += x * x;
        }
        Vector cand(p);
        double df = 0.0;
        bool accepted = false;
        for (int halvings = 0; halvings < 80; ++halvings) {
            for (std::size_t j = 0; j < p; ++j) {
                cand[j] = theta[j] - step * g[j];
            }
            df = obj.difference(theta, cand);
            if (df <= -1e-4 * step * gg) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            break;
        }
        prev_theta = std::move(theta);
        prev_g = std::move(g);
        theta = cand;
        f += df;
        g = obj.gradient(theta);
        if (trace) {
            trace->push_back(f);
        }
    }
    LogRegModel m;
    m.weights.assign(theta.begin(), theta.end() - 1);
    m.bias = theta.back();
    return m;
}

} // namespace scmkit

#endif
