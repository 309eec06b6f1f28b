#include "kcf/ridge.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <sstream>

namespace kcf::ridge {

namespace {

void check_square(const Mat& gram) {
    if (gram.rows() != gram.cols()) throw ConfigError("ridge: gram matrix must be square");
    if (gram.rows() == 0) throw ConfigError("ridge: empty gram matrix");
}

void check_lambda(double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw ConfigError("ridge: lambda must be strictly positive and finite");
}

}  // namespace

RidgeFactor::RidgeFactor(const Mat& gram, double lambda) : lambda_(lambda), n_(gram.rows()) {
    check_square(gram);
    check_lambda(lambda);
    const double ridge = static_cast<double>(n_) * lambda;
    const double base_jitter = 1e-12 * gram.trace() / static_cast<double>(n_);
    double jitter = 0.0;
    for (int attempt = 0; attempt <= 6; ++attempt) {
        Mat system = gram;
        system.diagonal().array() += ridge + jitter;
        llt_.compute(system);
        if (llt_.info() == Eigen::Success) {
            jitter_ = jitter;
            return;
        }
        jitter = (attempt == 0) ? base_jitter : jitter * 10.0;
    }
    std::ostringstream msg;
    msg << "ridge: Cholesky failed for n=" << n_ << ", lambda=" << lambda
        << " after jitter escalation up to " << jitter / 10.0;
    throw NumericError(msg.str());
}

Vec RidgeFactor::solve(const Vec& rhs) const {
    if (rhs.size() != n_) throw ConfigError("ridge: right-hand side length mismatch");
    return llt_.solve(rhs);
}

Mat RidgeFactor::solve(const Mat& rhs) const {
    if (rhs.rows() != n_) throw ConfigError("ridge: right-hand side row count mismatch");
    return llt_.solve(rhs);
}

RidgeSolution fit(const Mat& gram, const Mat& targets, double lambda) {
    check_square(gram);
    if (targets.rows() != gram.rows())
        throw ConfigError("ridge: target row count does not match gram size");
    RidgeFactor factor(gram, lambda);
    Mat dual = factor.solve(targets);
    return RidgeSolution{std::move(factor), std::move(dual)};
}

RidgeSolution fit(const kernels::GramMatrix& gram, const Mat& targets, double lambda) {
    return fit(gram.entries, targets, lambda);
}

double predict(const RidgeSolution& sol, const Vec& k_column) {
    if (sol.dual_weights.cols() != 1)
        throw ConfigError("ridge: scalar predict requires a single-target solution");
    if (k_column.size() != sol.n()) throw ConfigError("ridge: kernel column length mismatch");
    return sol.dual_weights.col(0).dot(k_column);
}

namespace {

// Hat-system pieces shared by the closed-form validation losses:
// A = (K + n*lambda*I)^{-1} K, so H = I - A^T has H_ii = 1 - A_ii and
// H y = y - A^T y. Never forms an explicit inverse.
struct HatSystem {
    Mat a_transposed;
    Vec h_diag;
    double h_trace = 0.0;
};

HatSystem hat_system(const Mat& gram, double lambda) {
    RidgeFactor factor(gram, lambda);
    Mat a = factor.solve(gram);
    HatSystem hs;
    hs.h_diag = (1.0 - a.diagonal().array()).matrix();
    hs.h_trace = hs.h_diag.sum();
    hs.a_transposed = a.transpose();
    return hs;
}

double loocv_from_hat(const HatSystem& hs, const Mat& targets) {
    for (Index i = 0; i < hs.h_diag.size(); ++i)
        if (hs.h_diag[i] == 0.0)
            throw NumericError(
                "ridge: degenerate hat matrix (zero leverage diagonal); lambda too "
                "small or duplicate rows");
    const double n = static_cast<double>(hs.h_diag.size());
    double loss = 0.0;
    for (Index t = 0; t < targets.cols(); ++t) {
        Vec residual = targets.col(t) - hs.a_transposed * targets.col(t);
        loss += (residual.array() / hs.h_diag.array()).square().sum() / n;
    }
    return loss;
}

double gcv_from_hat(const HatSystem& hs, const Mat& targets) {
    if (hs.h_trace == 0.0) throw NumericError("ridge: degenerate hat matrix (zero trace)");
    const double n = static_cast<double>(hs.h_diag.size());
    double loss = 0.0;
    for (Index t = 0; t < targets.cols(); ++t) {
        Vec residual = targets.col(t) - hs.a_transposed * targets.col(t);
        loss += residual.squaredNorm() / (hs.h_trace * hs.h_trace) / n;
    }
    return loss;
}

}  // namespace

double loocv_loss(const Mat& gram, const Mat& targets, double lambda) {
    check_square(gram);
    if (targets.rows() != gram.rows()) throw ConfigError("ridge: target row count mismatch");
    return loocv_from_hat(hat_system(gram, lambda), targets);
}

double gcv_loss(const Mat& gram, const Mat& targets, double lambda) {
    check_square(gram);
    if (targets.rows() != gram.rows()) throw ConfigError("ridge: target row count mismatch");
    return gcv_from_hat(hat_system(gram, lambda), targets);
}

namespace {

void check_grid(const Vec& grid) {
    if (grid.size() == 0) throw ConfigError("ridge: empty penalty grid");
    for (Index i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0.0) || !std::isfinite(grid[i]))
            throw ConfigError("ridge: penalty grid entries must be positive and finite");
        if (i > 0 && grid[i] <= grid[i - 1])
            throw ConfigError("ridge: penalty grid must be strictly increasing");
    }
}

Vec sweep_factorize(const Mat& gram, const Mat& targets, const Vec& grid, Criterion criterion) {
    Vec losses = Vec::Constant(grid.size(), std::numeric_limits<double>::quiet_NaN());
    for (Index i = 0; i < grid.size(); ++i) {
        try {
            losses[i] = criterion == Criterion::Loocv ? loocv_loss(gram, targets, grid[i])
                                                      : gcv_loss(gram, targets, grid[i]);
        } catch (const NumericError&) {
            // degenerate candidate stays NaN
        }
    }
    return losses;
}

// Diagonalize K once; each candidate costs O(n^2) for one target column and
// one n^3 product for the multi-target leverage diagonal.
Vec sweep_eigendecomposition(const Mat& gram, const Mat& targets, const Vec& grid,
                             Criterion criterion) {
    const Index n = gram.rows();
    const double dn = static_cast<double>(n);
    Eigen::SelfAdjointEigenSolver<Mat> es(gram);
    if (es.info() != Eigen::Success)
        throw NumericError("ridge: eigendecomposition failed during penalty sweep");
    const Mat& q = es.eigenvectors();
    const Vec& eta = es.eigenvalues();
    const Mat q_squared = q.array().square().matrix();
    const Mat qt_targets = q.transpose() * targets;
    const bool multi = targets.cols() > 1;
    Mat g_rotated;  // Q^T (T T^T) Q, needed only for multi-target leverage sums
    if (multi) g_rotated = qt_targets * qt_targets.transpose();

    Vec losses = Vec::Constant(grid.size(), std::numeric_limits<double>::quiet_NaN());
    for (Index g = 0; g < grid.size(); ++g) {
        const double ridge = dn * grid[g];
        const Vec w = (ridge / (eta.array() + ridge)).matrix();
        const Vec h_diag = q_squared * w;
        const double h_trace = w.sum();

        if (criterion == Criterion::Gcv) {
            if (h_trace == 0.0) continue;
            double sq = 0.0;
            if (multi) {
                const Mat b = q * w.asDiagonal();
                sq = (b * g_rotated).cwiseProduct(b).sum();
            } else {
                sq = (q * (w.array() * qt_targets.col(0).array()).matrix()).squaredNorm();
            }
            losses[g] = sq / (h_trace * h_trace) / dn;
            continue;
        }

        if ((h_diag.array() == 0.0).any()) continue;
        if (multi) {
            const Mat b = q * w.asDiagonal();
            const Vec hgh_diag = (b * g_rotated).cwiseProduct(b).rowwise().sum();
            losses[g] = (hgh_diag.array() / h_diag.array().square()).sum() / dn;
        } else {
            const Vec hy = q * (w.array() * qt_targets.col(0).array()).matrix();
            losses[g] = (hy.array() / h_diag.array()).square().sum() / dn;
        }
    }
    return losses;
}

}  // namespace

TuneResult tune_lambda(const Mat& gram, const Mat& targets, const Vec& grid, Criterion criterion,
                       SweepMethod method) {
    check_square(gram);
    check_grid(grid);
    if (targets.rows() != gram.rows()) throw ConfigError("ridge: target row count mismatch");

    if (method == SweepMethod::Auto)
        method = (gram.rows() >= 256 && grid.size() >= 8) ? SweepMethod::Eigendecomposition
                                                          : SweepMethod::Factorize;
    TuneResult result;
    result.losses = method == SweepMethod::Factorize
                        ? sweep_factorize(gram, targets, grid, criterion)
                        : sweep_eigendecomposition(gram, targets, grid, criterion);

    bool found = false;
    double best_loss = 0.0;
    for (Index i = 0; i < grid.size(); ++i) {
        const double loss = result.losses[i];
        if (std::isnan(loss)) continue;
        if (!found || loss <= best_loss) {  // ties break toward the larger lambda
            found = true;
            best_loss = loss;
            result.best_lambda = grid[i];
        }
    }
    if (!found) throw NumericError("ridge: penalty tuning failed; every candidate degenerate");
    return result;
}

double theoretical_lambda(Index n, double b, double c) {
    if (n < 1) throw ConfigError("ridge: sample count must be at least 1");
    if (!(b >= 1.0)) throw ConfigError("ridge: spectral decay b must satisfy b >= 1");
    if (!(c > 1.0) || !(c <= 2.0))
        throw ConfigError("ridge: smoothness c must lie in (1, 2]");
    return std::pow(static_cast<double>(n), -1.0 / (c + 1.0 / b));
}

Vec log_spaced_grid(double lo, double hi, int count) {
    if (!(lo > 0.0) || !(hi > lo)) throw ConfigError("ridge: invalid log grid bounds");
    if (count < 1) throw ConfigError("ridge: grid count must be at least 1");
    Vec grid(count);
    if (count == 1) {
        grid[0] = lo;
        return grid;
    }
    const double step = (std::log(hi) - std::log(lo)) / (count - 1);
    for (int i = 0; i < count; ++i) grid[i] = std::exp(std::log(lo) + step * i);
    return grid;
}

Vec default_penalty_grid() { return log_spaced_grid(1e-8, 1e2, 50); }

}  // namespace kcf::ridge
