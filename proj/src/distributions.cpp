#include "kcf/distributions.hpp"

#include <cmath>
#include <utility>

#include "kcf/ridge.hpp"

namespace kcf::distributions {

std::string to_string(DistEstimand e) {
    switch (e) {
        case DistEstimand::DAte: return "d-ate";
        case DistEstimand::DDs: return "d-ds";
        case DistEstimand::DAtt: return "d-att";
        case DistEstimand::DCate: return "d-cate";
        case DistEstimand::DFrontDoor: return "d-frontdoor";
    }
    return "unknown";
}

double EmbeddingEstimate::evaluate(double y) const {
    return coefficients.dot(kernels::kernel_column(outcome_points, y, outcome_kernel));
}

Vec EmbeddingEstimate::evaluate(const Vec& ys) const {
    return kernels::gram(outcome_points, ys, outcome_kernel).entries.transpose() * coefficients;
}

void EmbeddingRequest::validate(const Dataset& data) const {
    data.validate();
    if (!(penalties.lambda3 > 0.0))
        throw ConfigError("distributions: lambda3 must be positive");
    if ((estimand == DistEstimand::DDs) != alt_covariates.has_value())
        throw ConfigError(
            "distributions: alternative covariates required exactly for the d-ds estimand");
    if (estimand == DistEstimand::DAtt && !(penalties.lambda1 > 0.0))
        throw ConfigError("distributions: d-att requires a positive lambda1");
    if (estimand == DistEstimand::DCate) {
        if (!(penalties.lambda2 > 0.0))
            throw ConfigError("distributions: d-cate requires a positive lambda2");
        if (!data.v || !kernel_v)
            throw ConfigError("distributions: d-cate requires a v column and v kernel");
    }
    if (estimand == DistEstimand::DFrontDoor)
        throw ConfigError("distributions: front-door embedding lives in the graphical module");
}

EmbeddingEstimate embed_counterfactual(const Dataset& data, const EmbeddingRequest& request) {
    request.validate(data);
    const Mat k_dd = kernels::gram(data.d, data.d, request.kernel_d).entries;
    const Mat k_xx = kernels::gram(data.x, data.x, request.kernel_x).entries;

    Mat joint = k_dd.cwiseProduct(k_xx);
    Vec column;
    Vec eval_point;
    switch (request.estimand) {
        case DistEstimand::DAte:
        case DistEstimand::DDs: {
            const Mat& source =
                request.estimand == DistEstimand::DAte ? data.x : *request.alt_covariates;
            if (source.cols() != data.x.cols())
                throw ConfigError("distributions: alternative covariate dimension mismatch");
            const Vec x_average =
                kernels::gram(data.x, source, request.kernel_x).entries.rowwise().mean();
            column = kernels::kernel_column(data.d, request.d, request.kernel_d)
                         .cwiseProduct(x_average);
            eval_point = Vec::Constant(1, request.d);
            break;
        }
        case DistEstimand::DAtt: {
            const ridge::RidgeFactor embedding(k_dd, request.penalties.lambda1);
            const Vec embedded_x =
                k_xx * embedding.solve(kernels::kernel_column(data.d, request.d, request.kernel_d));
            column = kernels::kernel_column(data.d, request.d_prime, request.kernel_d)
                         .cwiseProduct(embedded_x);
            eval_point = Vec(2);
            eval_point << request.d, request.d_prime;
            break;
        }
        case DistEstimand::DCate: {
            const Mat k_vv = kernels::gram(*data.v, *data.v, *request.kernel_v).entries;
            joint = joint.cwiseProduct(k_vv);
            const ridge::RidgeFactor embedding(k_vv, request.penalties.lambda2);
            const Vec k_v_col = kernels::kernel_column(*data.v, request.v, *request.kernel_v);
            const Vec embedded_x = k_xx * embedding.solve(k_v_col);
            column = kernels::kernel_column(data.d, request.d, request.kernel_d)
                         .cwiseProduct(k_v_col)
                         .cwiseProduct(embedded_x);
            eval_point = Vec(2);
            eval_point << request.d, request.v;
            break;
        }
        default: throw ConfigError("distributions: unsupported estimand");
    }

    const ridge::RidgeFactor outer(joint, request.penalties.lambda3);
    EmbeddingEstimate est;
    est.coefficients = outer.solve(column);
    if (!est.coefficients.allFinite())
        throw NumericError("distributions: embedding coefficients are not finite");
    est.outcome_points = data.y;
    est.outcome_kernel = request.kernel_y;
    est.estimand = request.estimand;
    est.eval_point = std::move(eval_point);
    return est;
}

HerdedSample herd(const EmbeddingEstimate& embedding, int m, const Vec& candidate_grid) {
    if (candidate_grid.size() == 0) throw ConfigError("herd: empty candidate grid");
    if (m < 1) throw ConfigError("herd: sample count must be at least 1");

    const Vec embedding_values = embedding.evaluate(candidate_grid);
    Vec kernel_sum = Vec::Zero(candidate_grid.size());  // sum_{l<j} k(Y_l, grid)

    HerdedSample out;
    out.points.resize(m);
    out.candidate_grid = candidate_grid;
    for (int j = 1; j <= m; ++j) {
        const double shrink = 1.0 / static_cast<double>(j + 1);
        Index best = 0;
        double best_value = embedding_values[0] - shrink * kernel_sum[0];
        for (Index g = 1; g < candidate_grid.size(); ++g) {
            const double value = embedding_values[g] - shrink * kernel_sum[g];
            if (value > best_value) {
                best_value = value;
                best = g;
            }
        }
        const double picked = candidate_grid[best];
        out.points[j - 1] = picked;
        kernel_sum += kernels::kernel_column(candidate_grid, picked, embedding.outcome_kernel);
    }
    return out;
}

Vec default_candidate_grid(const Vec& outcomes, int count) {
    if (outcomes.size() == 0) throw ConfigError("herd: no outcomes to span a grid over");
    if (count < 2) throw ConfigError("herd: candidate grid needs at least 2 points");
    const double lo = outcomes.minCoeff();
    const double hi = outcomes.maxCoeff();
    const double range = hi > lo ? hi - lo : 1.0;
    Vec grid(count);
    const double start = lo - 0.5 * range;
    const double step = (hi - lo + range) / (count - 1);
    for (int i = 0; i < count; ++i) grid[i] = start + step * i;
    return grid;
}

double herding_distance(const EmbeddingEstimate& embedding, const Vec& herded_points) {
    if (herded_points.size() == 0) throw ConfigError("herd: empty sample");
    const double m = static_cast<double>(herded_points.size());
    const kernels::KernelConfig& ky = embedding.outcome_kernel;
    const Vec& c = embedding.coefficients;
    const double aa =
        c.dot(kernels::gram(embedding.outcome_points, embedding.outcome_points, ky).entries * c);
    const double ab =
        c.dot(kernels::gram(embedding.outcome_points, herded_points, ky).entries.rowwise().sum()) /
        m;
    const double bb =
        kernels::gram(herded_points, herded_points, ky).entries.sum() / (m * m);
    return std::sqrt(std::max(0.0, aa - 2.0 * ab + bb));
}

}  // namespace kcf::distributions
