#pragma once

#include <optional>

#include "kcf/kernels.hpp"
#include "kcf/ridge.hpp"
#include "kcf/types.hpp"

namespace kcf::causal {

/// Kernel choice per variable block of the outcome regression.
struct BlockKernels {
    kernels::KernelConfig d;
    kernels::KernelConfig x;
    std::optional<kernels::KernelConfig> v;
};

/// Dose response theta(d): mean over the covariate sample of the tensor
/// ridge prediction at (d, x_i), via one averaged kernel column per d.
[[nodiscard]] CurveEstimate estimate_ate(const Dataset& data, double lambda,
                                         const kernels::KernelConfig& kernel_d,
                                         const kernels::KernelConfig& kernel_x,
                                         const Vec& d_grid);

/// Dose response under distribution shift: covariate average taken over an
/// alternative covariate sample instead of the training one.
[[nodiscard]] CurveEstimate estimate_ds(const Dataset& data, const Mat& alt_covariates,
                                        double lambda, const kernels::KernelConfig& kernel_d,
                                        const kernels::KernelConfig& kernel_x, const Vec& d_grid);

/// Conditional response theta(d, d'): counterfactual mean at treatment d'
/// for the subpopulation observed at treatment d. Grid rows are (d, d').
[[nodiscard]] CurveEstimate estimate_att(const Dataset& data, double lambda, double lambda1,
                                         const kernels::KernelConfig& kernel_d,
                                         const kernels::KernelConfig& kernel_x,
                                         const Mat& dd_grid);

/// Heterogeneous response theta(d, v). Grid rows are (d, v).
[[nodiscard]] CurveEstimate estimate_cate(const Dataset& data, double lambda, double lambda2,
                                          const kernels::KernelConfig& kernel_d,
                                          const kernels::KernelConfig& kernel_v,
                                          const kernels::KernelConfig& kernel_x,
                                          const Mat& dv_grid);

/// Incremental (derivative) response curves; the treatment kernel column is
/// replaced by its derivative, so the treatment kernel must be
/// differentiable.
[[nodiscard]] CurveEstimate estimate_inc_ate(const Dataset& data, double lambda,
                                             const kernels::KernelConfig& kernel_d,
                                             const kernels::KernelConfig& kernel_x,
                                             const Vec& d_grid);
[[nodiscard]] CurveEstimate estimate_inc_att(const Dataset& data, double lambda, double lambda1,
                                             const kernels::KernelConfig& kernel_d,
                                             const kernels::KernelConfig& kernel_x,
                                             const Mat& dd_grid);

struct CausalRequest {
    Estimand estimand = Estimand::Ate;
    Dataset data;
    std::optional<Mat> alt_covariates;  // required exactly for Ds
    Mat eval_grid;                      // one row per point, grid_arity(estimand) columns
    Penalties penalties;
    BlockKernels kernels;

    void validate() const;
};

[[nodiscard]] CurveEstimate estimate(const CausalRequest& request);

/// How ridge penalties are chosen for each stage of an estimator.
struct PenaltyPolicy {
    enum class Kind { Fixed, Loocv, Gcv, Theoretical };
    Kind kind = Kind::Loocv;
    Penalties fixed;                 // Fixed only
    double b = 1.0;                  // Theoretical only
    double c = 2.0;
    Vec grid;                        // cross-validation grid; empty -> default
    ridge::SweepMethod sweep = ridge::SweepMethod::Auto;
};

/// Resolve the penalties an estimand needs. Cross-validated stages tune
/// separately: lambda on the outcome regression, lambda1/lambda2 on the
/// embedding regression with the covariate Gram columns as targets, and
/// lambda3 (when an outcome kernel is supplied) on the outcome Gram
/// columns.
[[nodiscard]] Penalties resolve_penalties(
    const Dataset& data, Estimand estimand, const BlockKernels& blocks,
    const PenaltyPolicy& policy,
    const std::optional<kernels::KernelConfig>& kernel_y = std::nullopt);

}  // namespace kcf::causal
