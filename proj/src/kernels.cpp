#include "kcf/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

namespace kcf::kernels {

KernelConfig KernelConfig::exp_quadratic(Vec lengthscales) {
    KernelConfig cfg{Family::ExpQuadratic, std::move(lengthscales)};
    cfg.validate();
    return cfg;
}

KernelConfig KernelConfig::exp_quadratic(double lengthscale) {
    return exp_quadratic(Vec::Constant(1, lengthscale));
}

KernelConfig KernelConfig::exact_match() { return KernelConfig{Family::ExactMatch, Vec()}; }

void KernelConfig::validate() const {
    if (family == Family::ExactMatch) {
        if (lengthscales.size() != 0)
            throw ConfigError("kernel: exact-match kernel carries no lengthscales");
        return;
    }
    if (lengthscales.size() == 0)
        throw ConfigError("kernel: exponentiated-quadratic kernel needs lengthscales");
    for (Index i = 0; i < lengthscales.size(); ++i) {
        const double l = lengthscales[i];
        if (!(l > 0.0) || !std::isfinite(l))
            throw ConfigError("kernel: lengthscale " + std::to_string(i) +
                              " must be strictly positive and finite");
    }
}

GramMatrix gram(const Mat& points_a, const Mat& points_b, const KernelConfig& config,
                std::string row_block, std::string col_block) {
    config.validate();
    const Index n = points_a.rows();
    const Index m = points_b.rows();

    if (config.family == Family::ExpQuadratic) {
        const Index dim = config.lengthscales.size();
        if (points_a.cols() != dim || points_b.cols() != dim)
            throw ConfigError("kernel: point dimension does not match lengthscale count");
        // Accumulate scaled squared distances dimension-wise, exponentiate once.
        Mat s = Mat::Zero(n, m);
        for (Index k = 0; k < dim; ++k) {
            const double inv2 = 1.0 / (2.0 * config.lengthscales[k] * config.lengthscales[k]);
            for (Index j = 0; j < m; ++j) {
                const double bj = points_b(j, k);
                for (Index i = 0; i < n; ++i) {
                    const double diff = points_a(i, k) - bj;
                    s(i, j) += diff * diff * inv2;
                }
            }
        }
        return GramMatrix{(-s.array()).exp().matrix(), std::move(row_block), std::move(col_block)};
    }

    if (points_a.cols() != points_b.cols())
        throw ConfigError("kernel: point dimension mismatch between the two sets");
    Mat g(n, m);
    for (Index j = 0; j < m; ++j)
        for (Index i = 0; i < n; ++i)
            g(i, j) = (points_a.row(i).array() == points_b.row(j).array()).all() ? 1.0 : 0.0;
    return GramMatrix{std::move(g), std::move(row_block), std::move(col_block)};
}

Vec kernel_column(const Vec& points, double at, const KernelConfig& config) {
    return gram(Mat(points), Mat(Vec::Constant(1, at)), config).entries.col(0);
}

Vec kernel_column(const Mat& points, const Vec& at, const KernelConfig& config) {
    return gram(points, Mat(at.transpose()), config).entries.col(0);
}

Vec grad_kernel_column(const Vec& points, double at, const KernelConfig& config) {
    config.validate();
    if (config.family != Family::ExpQuadratic)
        throw ConfigError("kernel: derivative undefined for the exact-match kernel");
    if (config.lengthscales.size() != 1)
        throw ConfigError("kernel: derivative column requires a scalar input block");
    const double inv_sq = 1.0 / (config.lengthscales[0] * config.lengthscales[0]);
    Vec out(points.size());
    for (Index i = 0; i < points.size(); ++i) {
        const double diff = points[i] - at;
        out[i] = std::exp(-0.5 * diff * diff * inv_sq) * diff * inv_sq;
    }
    return out;
}

namespace {

double lower_median_distance(std::vector<double>& dists) {
    const std::size_t mid = (dists.size() - 1) / 2;
    std::nth_element(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(mid), dists.end());
    const double med = dists[mid];
    if (med > 0.0) return med;
    double sum = 0.0;
    std::size_t count = 0;
    for (double d : dists)
        if (d > 0.0) {
            sum += d;
            ++count;
        }
    return count > 0 ? sum / static_cast<double>(count) : 1.0;
}

}  // namespace

Vec median_heuristic(const Mat& points) {
    const Index n = points.rows();
    if (n < 2) throw ConfigError("median heuristic: need at least 2 points");
    Vec scales(points.cols());
    std::vector<double> dists;
    dists.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2);
    for (Index k = 0; k < points.cols(); ++k) {
        dists.clear();
        for (Index i = 0; i < n; ++i)
            for (Index j = i + 1; j < n; ++j)
                dists.push_back(std::abs(points(i, k) - points(j, k)));
        scales[k] = lower_median_distance(dists);
    }
    return scales;
}

double median_heuristic_shared(const Mat& points) {
    const Index n = points.rows();
    if (n < 2) throw ConfigError("median heuristic: need at least 2 points");
    std::vector<double> dists;
    dists.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2);
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j)
            dists.push_back((points.row(i) - points.row(j)).norm());
    return lower_median_distance(dists);
}

KernelConfig default_block_kernel(const Mat& points) {
    if (points.cols() == 1) return KernelConfig::exp_quadratic(median_heuristic(points));
    return KernelConfig::exp_quadratic(
        Vec::Constant(points.cols(), median_heuristic_shared(points)));
}

}  // namespace kcf::kernels
