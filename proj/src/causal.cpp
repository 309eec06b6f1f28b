#include "kcf/causal.hpp"

#include <cmath>
#include <map>
#include <utility>

namespace kcf::causal {

using kernels::KernelConfig;

namespace {

void check_penalty(double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value))
        throw ConfigError(std::string("causal: penalty ") + name + " must be positive");
}

void check_values_finite(const Vec& values) {
    if (!values.allFinite()) throw NumericError("causal: estimate produced non-finite values");
}

// Shared ATE/DS/incremental path: fit the tensor ridge once, then predict
// against K_Dd (or its derivative) times the covariate-averaged column.
CurveEstimate dose_curve(const Dataset& data, const Mat& average_x, double lambda,
                         const KernelConfig& kernel_d, const KernelConfig& kernel_x,
                         const Vec& d_grid, Estimand tag, bool derivative) {
    data.validate();
    check_penalty(lambda, "lambda");
    if (average_x.cols() != data.x.cols())
        throw ConfigError("causal: alternative covariates must match the x block dimension");
    if (average_x.rows() == 0) throw ConfigError("causal: empty covariate sample");
    if (d_grid.size() == 0) throw ConfigError("causal: empty evaluation grid");

    const Mat k_dd = kernels::gram(data.d, data.d, kernel_d).entries;
    const Mat k_xx = kernels::gram(data.x, data.x, kernel_x).entries;
    const Vec x_average = kernels::gram(data.x, average_x, kernel_x).entries.rowwise().mean();

    const ridge::RidgeSolution sol = ridge::fit(k_dd.cwiseProduct(k_xx), Mat(data.y), lambda);

    CurveEstimate est;
    est.grid = Mat(d_grid);
    est.values.resize(d_grid.size());
    for (Index g = 0; g < d_grid.size(); ++g) {
        const Vec k_col = derivative ? kernels::grad_kernel_column(data.d, d_grid[g], kernel_d)
                                     : kernels::kernel_column(data.d, d_grid[g], kernel_d);
        est.values[g] = ridge::predict(sol, Vec(k_col.cwiseProduct(x_average)));
    }
    check_values_finite(est.values);
    est.estimand = tag;
    est.penalties.lambda = lambda;
    est.dual_weights = sol.dual_weights.col(0);
    return est;
}

// Shared ATT/incremental-ATT path: the bracket column pairs K_Dd' with the
// conditional-mean-embedding column K_XX (K_DD + n lambda1 I)^{-1} K_Dd.
CurveEstimate conditional_curve(const Dataset& data, double lambda, double lambda1,
                                const KernelConfig& kernel_d, const KernelConfig& kernel_x,
                                const Mat& dd_grid, Estimand tag, bool derivative) {
    data.validate();
    check_penalty(lambda, "lambda");
    check_penalty(lambda1, "lambda1");
    if (dd_grid.cols() != 2) throw ConfigError("causal: grid rows must be (d, d') pairs");
    if (dd_grid.rows() == 0) throw ConfigError("causal: empty evaluation grid");

    const Mat k_dd = kernels::gram(data.d, data.d, kernel_d).entries;
    const Mat k_xx = kernels::gram(data.x, data.x, kernel_x).entries;

    const ridge::RidgeSolution sol = ridge::fit(k_dd.cwiseProduct(k_xx), Mat(data.y), lambda);
    const ridge::RidgeFactor embedding(k_dd, lambda1);

    CurveEstimate est;
    est.grid = dd_grid;
    est.values.resize(dd_grid.rows());
    std::map<double, Vec> embedded_x;  // d -> K_XX mu-hat column, one solve per unique d
    for (Index g = 0; g < dd_grid.rows(); ++g) {
        const double d = dd_grid(g, 0);
        const double d_prime = dd_grid(g, 1);
        auto it = embedded_x.find(d);
        if (it == embedded_x.end()) {
            Vec col = k_xx * embedding.solve(kernels::kernel_column(data.d, d, kernel_d));
            it = embedded_x.emplace(d, std::move(col)).first;
        }
        const Vec k_col = derivative
                              ? kernels::grad_kernel_column(data.d, d_prime, kernel_d)
                              : kernels::kernel_column(data.d, d_prime, kernel_d);
        est.values[g] = ridge::predict(sol, Vec(k_col.cwiseProduct(it->second)));
    }
    check_values_finite(est.values);
    est.estimand = tag;
    est.penalties.lambda = lambda;
    est.penalties.lambda1 = lambda1;
    est.dual_weights = sol.dual_weights.col(0);
    return est;
}

}  // namespace

CurveEstimate estimate_ate(const Dataset& data, double lambda, const KernelConfig& kernel_d,
                           const KernelConfig& kernel_x, const Vec& d_grid) {
    return dose_curve(data, data.x, lambda, kernel_d, kernel_x, d_grid, Estimand::Ate, false);
}

CurveEstimate estimate_ds(const Dataset& data, const Mat& alt_covariates, double lambda,
                          const KernelConfig& kernel_d, const KernelConfig& kernel_x,
                          const Vec& d_grid) {
    return dose_curve(data, alt_covariates, lambda, kernel_d, kernel_x, d_grid, Estimand::Ds,
                      false);
}

CurveEstimate estimate_att(const Dataset& data, double lambda, double lambda1,
                           const KernelConfig& kernel_d, const KernelConfig& kernel_x,
                           const Mat& dd_grid) {
    return conditional_curve(data, lambda, lambda1, kernel_d, kernel_x, dd_grid, Estimand::Att,
                             false);
}

CurveEstimate estimate_cate(const Dataset& data, double lambda, double lambda2,
                            const KernelConfig& kernel_d, const KernelConfig& kernel_v,
                            const KernelConfig& kernel_x, const Mat& dv_grid) {
    data.validate();
    if (!data.v) throw ConfigError("causal: heterogeneous response requires a v column");
    check_penalty(lambda, "lambda");
    check_penalty(lambda2, "lambda2");
    if (dv_grid.cols() != 2) throw ConfigError("causal: grid rows must be (d, v) pairs");
    if (dv_grid.rows() == 0) throw ConfigError("causal: empty evaluation grid");

    const Mat k_dd = kernels::gram(data.d, data.d, kernel_d).entries;
    const Mat k_vv = kernels::gram(*data.v, *data.v, kernel_v).entries;
    const Mat k_xx = kernels::gram(data.x, data.x, kernel_x).entries;

    const ridge::RidgeSolution sol =
        ridge::fit(k_dd.cwiseProduct(k_vv).cwiseProduct(k_xx), Mat(data.y), lambda);
    const ridge::RidgeFactor embedding(k_vv, lambda2);

    CurveEstimate est;
    est.grid = dv_grid;
    est.values.resize(dv_grid.rows());
    std::map<double, Vec> d_columns;
    std::map<double, std::pair<Vec, Vec>> v_columns;  // v -> (K_Vv, embedded K_XX column)
    for (Index g = 0; g < dv_grid.rows(); ++g) {
        const double d = dv_grid(g, 0);
        const double v = dv_grid(g, 1);
        auto dit = d_columns.find(d);
        if (dit == d_columns.end())
            dit = d_columns.emplace(d, kernels::kernel_column(data.d, d, kernel_d)).first;
        auto vit = v_columns.find(v);
        if (vit == v_columns.end()) {
            Vec k_v_col = kernels::kernel_column(*data.v, v, kernel_v);
            Vec embedded = k_xx * embedding.solve(k_v_col);
            vit = v_columns.emplace(v, std::make_pair(std::move(k_v_col), std::move(embedded)))
                      .first;
        }
        est.values[g] = ridge::predict(
            sol,
            Vec(dit->second.cwiseProduct(vit->second.first).cwiseProduct(vit->second.second)));
    }
    check_values_finite(est.values);
    est.estimand = Estimand::Cate;
    est.penalties.lambda = lambda;
    est.penalties.lambda2 = lambda2;
    est.dual_weights = sol.dual_weights.col(0);
    return est;
}

CurveEstimate estimate_inc_ate(const Dataset& data, double lambda, const KernelConfig& kernel_d,
                               const KernelConfig& kernel_x, const Vec& d_grid) {
    return dose_curve(data, data.x, lambda, kernel_d, kernel_x, d_grid, Estimand::IncAte, true);
}

CurveEstimate estimate_inc_att(const Dataset& data, double lambda, double lambda1,
                               const KernelConfig& kernel_d, const KernelConfig& kernel_x,
                               const Mat& dd_grid) {
    return conditional_curve(data, lambda, lambda1, kernel_d, kernel_x, dd_grid, Estimand::IncAtt,
                             true);
}

void CausalRequest::validate() const {
    data.validate();
    if (estimand == Estimand::FrontDoor)
        throw ConfigError("causal: front-door estimation lives in the graphical module");
    if ((estimand == Estimand::Ds) != alt_covariates.has_value())
        throw ConfigError("causal: alternative covariates required exactly for the ds estimand");
    if (estimand == Estimand::Cate && !data.v)
        throw ConfigError("causal: cate requires a v column");
    if (eval_grid.rows() == 0) throw ConfigError("causal: empty evaluation grid");
    if (eval_grid.cols() != grid_arity(estimand))
        throw ConfigError("causal: evaluation grid arity does not match the estimand");
    if (estimand == Estimand::Cate && !kernels.v)
        throw ConfigError("causal: cate requires a v-block kernel");
}

CurveEstimate estimate(const CausalRequest& request) {
    request.validate();
    const Penalties& p = request.penalties;
    switch (request.estimand) {
        case Estimand::Ate:
            return estimate_ate(request.data, p.lambda, request.kernels.d, request.kernels.x,
                                request.eval_grid.col(0));
        case Estimand::Ds:
            return estimate_ds(request.data, *request.alt_covariates, p.lambda, request.kernels.d,
                               request.kernels.x, request.eval_grid.col(0));
        case Estimand::Att:
            return estimate_att(request.data, p.lambda, p.lambda1, request.kernels.d,
                                request.kernels.x, request.eval_grid);
        case Estimand::Cate:
            return estimate_cate(request.data, p.lambda, p.lambda2, request.kernels.d,
                                 *request.kernels.v, request.kernels.x, request.eval_grid);
        case Estimand::IncAte:
            return estimate_inc_ate(request.data, p.lambda, request.kernels.d, request.kernels.x,
                                    request.eval_grid.col(0));
        case Estimand::IncAtt:
            return estimate_inc_att(request.data, p.lambda, p.lambda1, request.kernels.d,
                                    request.kernels.x, request.eval_grid);
        default: throw ConfigError("causal: unsupported estimand");
    }
}

Penalties resolve_penalties(const Dataset& data, Estimand estimand, const BlockKernels& blocks,
                            const PenaltyPolicy& policy,
                            const std::optional<KernelConfig>& kernel_y) {
    data.validate();
    const Index n = data.n();
    Penalties out;

    if (policy.kind == PenaltyPolicy::Kind::Fixed) {
        out = policy.fixed;
        return out;
    }
    if (policy.kind == PenaltyPolicy::Kind::Theoretical) {
        const double lambda = ridge::theoretical_lambda(n, policy.b, policy.c);
        out.lambda = out.lambda1 = out.lambda2 = out.lambda3 = lambda;
        return out;
    }

    const ridge::Criterion criterion =
        policy.kind == PenaltyPolicy::Kind::Loocv ? ridge::Criterion::Loocv
                                                  : ridge::Criterion::Gcv;
    const Vec grid = policy.grid.size() > 0 ? policy.grid : ridge::default_penalty_grid();

    const Mat k_dd = kernels::gram(data.d, data.d, blocks.d).entries;
    const Mat k_xx = kernels::gram(data.x, data.x, blocks.x).entries;
    Mat joint = k_dd.cwiseProduct(k_xx);
    if (estimand == Estimand::Cate) {
        if (!data.v || !blocks.v) throw ConfigError("causal: cate tuning requires the v block");
        const Mat k_vv = kernels::gram(*data.v, *data.v, *blocks.v).entries;
        joint = joint.cwiseProduct(k_vv);
        out.lambda2 = ridge::tune_lambda(k_vv, k_xx, grid, criterion, policy.sweep).best_lambda;
    }
    if (estimand == Estimand::Att || estimand == Estimand::IncAtt ||
        estimand == Estimand::FrontDoor) {
        out.lambda1 = ridge::tune_lambda(k_dd, k_xx, grid, criterion, policy.sweep).best_lambda;
    }
    out.lambda = ridge::tune_lambda(joint, Mat(data.y), grid, criterion, policy.sweep).best_lambda;
    if (kernel_y) {
        const Mat k_yy = kernels::gram(data.y, data.y, *kernel_y).entries;
        out.lambda3 = ridge::tune_lambda(joint, k_yy, grid, criterion, policy.sweep).best_lambda;
    }
    return out;
}

}  // namespace kcf::causal
