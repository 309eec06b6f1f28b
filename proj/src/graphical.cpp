#include "kcf/graphical.hpp"

#include <cmath>

#include "kcf/ridge.hpp"

namespace kcf::graphical {

void FrontDoorRequest::validate(bool embedding) const {
    data.validate();
    if (!(lambda1 > 0.0) || !std::isfinite(lambda1))
        throw ConfigError("frontdoor: lambda1 must be positive");
    if (embedding) {
        if (!(lambda3 > 0.0) || !std::isfinite(lambda3))
            throw ConfigError("frontdoor: lambda3 must be positive");
        if (!kernel_y) throw ConfigError("frontdoor: embedding requires an outcome kernel");
    } else {
        if (!(lambda > 0.0) || !std::isfinite(lambda))
            throw ConfigError("frontdoor: lambda must be positive");
        if (d_grid.size() == 0) throw ConfigError("frontdoor: empty evaluation grid");
    }
}

namespace {

// Pieces shared by both front-door estimators. The bracket column of
// Algorithm B.4 at treatment level d averages K_Dd_i over the training
// treatments (the row mean of K_DD) elementwise with the mediator embedding
// column K_XX (K_DD + n lambda1 I)^{-1} K_Dd.
class FrontDoorColumns {
public:
    FrontDoorColumns(const Dataset& data, const kernels::KernelConfig& kernel_d,
                     const kernels::KernelConfig& kernel_x, double lambda1)
        : treatments_(data.d),
          kernel_d_(kernel_d),
          k_dd_(kernels::gram(data.d, data.d, kernel_d).entries),
          k_xx_(kernels::gram(data.x, data.x, kernel_x).entries),
          d_average_(k_dd_.rowwise().mean()),
          embedding_(k_dd_, lambda1) {}

    [[nodiscard]] Mat joint() const { return k_dd_.cwiseProduct(k_xx_); }

    [[nodiscard]] Vec bracket(double d) const {
        const Vec mu_coef = embedding_.solve(kernels::kernel_column(treatments_, d, kernel_d_));
        return d_average_.cwiseProduct(k_xx_ * mu_coef);
    }

private:
    Vec treatments_;
    kernels::KernelConfig kernel_d_;
    Mat k_dd_;
    Mat k_xx_;
    Vec d_average_;
    ridge::RidgeFactor embedding_;
};

}  // namespace

CurveEstimate estimate_frontdoor(const FrontDoorRequest& request) {
    request.validate(false);
    const FrontDoorColumns cols(request.data, request.kernel_d, request.kernel_x,
                                request.lambda1);
    const ridge::RidgeSolution sol = ridge::fit(cols.joint(), Mat(request.data.y), request.lambda);

    CurveEstimate est;
    est.grid = Mat(request.d_grid);
    est.values.resize(request.d_grid.size());
    for (Index g = 0; g < request.d_grid.size(); ++g)
        est.values[g] = ridge::predict(sol, cols.bracket(request.d_grid[g]));
    if (!est.values.allFinite())
        throw NumericError("frontdoor: estimate produced non-finite values");
    est.estimand = Estimand::FrontDoor;
    est.penalties.lambda = request.lambda;
    est.penalties.lambda1 = request.lambda1;
    est.dual_weights = sol.dual_weights.col(0);
    return est;
}

distributions::EmbeddingEstimate embed_frontdoor(const FrontDoorRequest& request, double d) {
    request.validate(true);
    const FrontDoorColumns cols(request.data, request.kernel_d, request.kernel_x,
                                request.lambda1);
    const ridge::RidgeFactor outer(cols.joint(), request.lambda3);

    distributions::EmbeddingEstimate est;
    est.coefficients = outer.solve(cols.bracket(d));
    if (!est.coefficients.allFinite())
        throw NumericError("frontdoor: embedding coefficients are not finite");
    est.outcome_points = request.data.y;
    est.outcome_kernel = *request.kernel_y;
    est.estimand = distributions::DistEstimand::DFrontDoor;
    est.eval_point = Vec::Constant(1, d);
    return est;
}

}  // namespace kcf::graphical
