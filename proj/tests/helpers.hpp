// Test-only utilities: independent oracles (brute-force refits, plug-in
// g-formula enumerations, dense solves) and data builders. Nothing here may
// call the code path it is used to check.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "kcf/kernels.hpp"
#include "kcf/rng.hpp"
#include "kcf/types.hpp"

namespace testutil {

using kcf::Dataset;
using kcf::Index;
using kcf::Mat;
using kcf::Rng;
using kcf::Vec;

inline Mat random_matrix(Rng& rng, Index rows, Index cols, double scale = 1.0) {
    Mat m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) m(i, j) = scale * rng.normal();
    return m;
}

inline Vec random_vector(Rng& rng, Index size, double scale = 1.0) {
    Vec v(size);
    for (Index i = 0; i < size; ++i) v[i] = scale * rng.normal();
    return v;
}

inline Dataset random_continuous_dataset(Rng& rng, Index n, Index dim_x, bool with_v = false) {
    Dataset data;
    data.d = random_vector(rng, n);
    data.x = random_matrix(rng, n, dim_x);
    if (with_v) data.v = random_vector(rng, n);
    data.y = random_vector(rng, n);
    return data;
}

// --- dense one-line oracle -------------------------------------------------

// y^T (K + n*lambda*I)^{-1} col evaluated with an LU factorization, fully
// independent of the library's Cholesky path.
inline double one_line_solve(const Mat& gram, const Vec& targets, double lambda,
                             const Vec& column) {
    Mat system = gram;
    system.diagonal().array() += static_cast<double>(gram.rows()) * lambda;
    return targets.dot(Eigen::PartialPivLU<Mat>(system).solve(column));
}

inline Vec dense_dual(const Mat& gram, const Vec& targets, double lambda) {
    Mat system = gram;
    system.diagonal().array() += static_cast<double>(gram.rows()) * lambda;
    return Eigen::PartialPivLU<Mat>(system).solve(targets);
}

// --- brute-force leave-one-out oracle ---------------------------------------

// Refits the ridge regression without observation i, keeping the original
// n*lambda ridge, and accumulates the squared holdout residuals.
inline double brute_force_loocv(const Mat& gram, const Vec& y, double lambda) {
    const Index n = gram.rows();
    const double ridge = static_cast<double>(n) * lambda;
    double loss = 0.0;
    for (Index i = 0; i < n; ++i) {
        Mat sub(n - 1, n - 1);
        Vec sub_y(n - 1);
        Vec cross(n - 1);
        Index r = 0;
        for (Index a = 0; a < n; ++a) {
            if (a == i) continue;
            Index c = 0;
            for (Index b = 0; b < n; ++b) {
                if (b == i) continue;
                sub(r, c) = gram(a, b);
                ++c;
            }
            sub_y[r] = y[a];
            cross[r] = gram(a, i);
            ++r;
        }
        sub.diagonal().array() += ridge;
        const double prediction = cross.dot(Eigen::PartialPivLU<Mat>(sub).solve(sub_y));
        const double residual = y[i] - prediction;
        loss += residual * residual;
    }
    return loss / static_cast<double>(n);
}

// --- discrete designs and plug-in oracles -----------------------------------

// Discrete instance with every treatment/covariate cell populated; supports
// |D|, |X| (and optionally |V|) small enough to enumerate. With discrete_y
// the outcomes land in {0, 1, 2} so conditional probabilities can be
// enumerated as well.
inline Dataset discrete_instance(Rng& rng, Index n, int n_d, int n_x, int n_v = 0,
                                 bool discrete_y = false) {
    Dataset data;
    data.d.resize(n);
    data.x.resize(n, 1);
    data.y.resize(n);
    if (n_v > 0) data.v = Vec(n);
    const int cells = n_d * n_x * std::max(1, n_v);
    for (Index i = 0; i < n; ++i) {
        int cell;
        if (i < cells)
            cell = static_cast<int>(i);  // guarantee full support
        else
            cell = static_cast<int>(rng.uniform01() * cells) % cells;
        const int d = cell % n_d;
        const int x = (cell / n_d) % n_x;
        const int v = (cell / (n_d * n_x)) % std::max(1, n_v);
        data.d[i] = d;
        data.x(i, 0) = x;
        if (n_v > 0) (*data.v)[i] = v;
        if (discrete_y)
            data.y[i] = std::floor(rng.uniform01() * 2.0) + (d == x ? 1.0 : 0.0);
        else
            data.y[i] = 0.5 * d + 1.5 * x - 0.7 * d * x + (n_v > 0 ? 0.9 * v : 0.0) + rng.normal();
    }
    return data;
}

inline std::vector<double> unique_values(const Vec& column) {
    std::vector<double> vals(column.data(), column.data() + column.size());
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    return vals;
}

// Empirical mean of y over rows with given discrete (d [, v], x).
inline double cell_mean(const Dataset& data, double d, double x, const double* v = nullptr) {
    double sum = 0.0;
    int count = 0;
    for (Index i = 0; i < data.n(); ++i) {
        if (data.d[i] != d || data.x(i, 0) != x) continue;
        if (v && (*data.v)[i] != *v) continue;
        sum += data.y[i];
        ++count;
    }
    return count > 0 ? sum / count : 0.0;
}

// g-formula: (1/n) sum_i mean(Y | D=d, X=X_i).
inline double plugin_ate(const Dataset& data, double d) {
    double sum = 0.0;
    for (Index i = 0; i < data.n(); ++i) sum += cell_mean(data, d, data.x(i, 0));
    return sum / static_cast<double>(data.n());
}

// sum_x P(x | D=d) mean(Y | D=d', X=x).
inline double plugin_att(const Dataset& data, double d, double d_prime) {
    double sum = 0.0;
    int count = 0;
    for (Index i = 0; i < data.n(); ++i) {
        if (data.d[i] != d) continue;
        sum += cell_mean(data, d_prime, data.x(i, 0));
        ++count;
    }
    return count > 0 ? sum / count : 0.0;
}

// sum_x P(x | V=v) mean(Y | D=d, V=v, X=x).
inline double plugin_cate(const Dataset& data, double d, double v) {
    double sum = 0.0;
    int count = 0;
    for (Index i = 0; i < data.n(); ++i) {
        if ((*data.v)[i] != v) continue;
        sum += cell_mean(data, d, data.x(i, 0), &v);
        ++count;
    }
    return count > 0 ? sum / count : 0.0;
}

// sum_d' P(d') sum_x P(x | D=d) mean(Y | D=d', X=x).
inline double plugin_frontdoor(const Dataset& data, double d) {
    double sum = 0.0;
    for (Index j = 0; j < data.n(); ++j) sum += plugin_att(data, d, data.d[j]);
    return sum / static_cast<double>(data.n());
}

// P(y | D=d, X=x) averaged over the covariate sample, the distributional
// analogue of plugin_ate.
inline double plugin_dist_ate(const Dataset& data, double d, double y) {
    double total = 0.0;
    for (Index i = 0; i < data.n(); ++i) {
        const double x = data.x(i, 0);
        double hits = 0.0;
        int count = 0;
        for (Index j = 0; j < data.n(); ++j) {
            if (data.d[j] != d || data.x(j, 0) != x) continue;
            if (data.y[j] == y) hits += 1.0;
            ++count;
        }
        total += count > 0 ? hits / count : 0.0;
    }
    return total / static_cast<double>(data.n());
}

inline double sup_error(const Vec& a, const Vec& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace testutil
