#pragma once

#include <Eigen/Cholesky>

#include "kcf/kernels.hpp"
#include "kcf/types.hpp"

namespace kcf::ridge {

enum class Criterion { Loocv, Gcv };

/// Backend for the penalty-grid sweep. Factorize refactors (K + n*lambda*I)
/// per candidate; Eigendecomposition diagonalizes K once and reuses it
/// across the grid (same losses to 1e-8). Auto picks by problem size.
enum class SweepMethod { Factorize, Eigendecomposition, Auto };

/// Cholesky factorization of (K + n*lambda*I) with escalating diagonal
/// jitter on breakdown: 1e-12*tr(K)/n, x10 per retry, at most 6 retries.
class RidgeFactor {
public:
    RidgeFactor(const Mat& gram, double lambda);

    [[nodiscard]] Vec solve(const Vec& rhs) const;
    [[nodiscard]] Mat solve(const Mat& rhs) const;
    [[nodiscard]] double lambda() const { return lambda_; }
    [[nodiscard]] Index n() const { return n_; }
    [[nodiscard]] double jitter() const { return jitter_; }

private:
    Eigen::LLT<Mat> llt_;
    double lambda_ = 0.0;
    Index n_ = 0;
    double jitter_ = 0.0;
};

/// Regularized Gram system (K + n*lambda*I) alpha = targets, kept with its
/// factorization so new kernel columns can be predicted or solved against.
struct RidgeSolution {
    RidgeFactor factor;
    Mat dual_weights;  // n x t

    [[nodiscard]] double lambda() const { return factor.lambda(); }
    [[nodiscard]] Index n() const { return factor.n(); }
};

[[nodiscard]] RidgeSolution fit(const Mat& gram, const Mat& targets, double lambda);
[[nodiscard]] RidgeSolution fit(const kernels::GramMatrix& gram, const Mat& targets, double lambda);

/// dual_weights^T k_column for a single-target solution.
[[nodiscard]] double predict(const RidgeSolution& sol, const Vec& k_column);

/// Closed-form leave-one-out loss (1/n) ||diag(H)^{-1} H y||^2 with
/// H = I - K (K + n*lambda*I)^{-1}. Multi-column targets sum the
/// per-column losses.
[[nodiscard]] double loocv_loss(const Mat& gram, const Mat& targets, double lambda);

/// Closed-form generalized cross validation loss (1/n) ||H y / tr(H)||^2.
[[nodiscard]] double gcv_loss(const Mat& gram, const Mat& targets, double lambda);

struct TuneResult {
    double best_lambda = 0.0;
    Vec losses;  // one per grid candidate; NaN marks a degenerate candidate
};

/// Grid minimizer of the chosen validation loss; ties break toward the
/// larger penalty. Throws when every candidate is degenerate.
[[nodiscard]] TuneResult tune_lambda(const Mat& gram, const Mat& targets, const Vec& grid,
                                     Criterion criterion,
                                     SweepMethod method = SweepMethod::Auto);

/// Rate-optimal penalty n^{-1/(c + 1/b)} for smoothness c in (1,2] and
/// spectral decay b >= 1.
[[nodiscard]] double theoretical_lambda(Index n, double b, double c);

[[nodiscard]] Vec log_spaced_grid(double lo, double hi, int count);
/// 50 log-spaced candidates in [1e-8, 1e2].
[[nodiscard]] Vec default_penalty_grid();

}  // namespace kcf::ridge
