#include "kcf/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include "kcf/causal.hpp"
#include "kcf/rng.hpp"

namespace kcf::simulate {

namespace {

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double logistic(double t) { return 1.0 / (1.0 + std::exp(-t)); }

}  // namespace

Vec dose_beta() {
    Vec beta(kDoseCovariateDim);
    for (int j = 0; j < kDoseCovariateDim; ++j)
        beta[j] = 1.0 / (static_cast<double>(j + 1) * static_cast<double>(j + 1));
    return beta;
}

Mat dose_sigma() {
    Mat sigma = Mat::Identity(kDoseCovariateDim, kDoseCovariateDim);
    for (int j = 0; j + 1 < kDoseCovariateDim; ++j) {
        sigma(j, j + 1) = 0.5;
        sigma(j + 1, j) = 0.5;
    }
    return sigma;
}

Vec dose_treatment(const Mat& x, const Vec& nu) {
    const Vec index = x * dose_beta();
    Vec d(x.rows());
    for (Index i = 0; i < x.rows(); ++i) d[i] = std_normal_cdf(3.0 * index[i]) + 0.75 * nu[i];
    return d;
}

Vec dose_outcome(const Mat& x, const Vec& d, const Vec& eps) {
    const Vec index = x * dose_beta();
    return 1.2 * d + 1.2 * index + d.cwiseProduct(d) + d.cwiseProduct(x.col(0)) + eps;
}

Dataset gen_dose_design(const DoseDesignParams& params) {
    if (params.n < 1) throw ConfigError("simulate: sample size must be at least 1");
    Rng rng(params.seed);
    const Mat chol = Eigen::LLT<Mat>(dose_sigma()).matrixL();

    Mat x(params.n, kDoseCovariateDim);
    Vec nu(params.n), eps(params.n);
    Vec z(kDoseCovariateDim);
    for (Index i = 0; i < params.n; ++i) {
        for (int j = 0; j < kDoseCovariateDim; ++j) z[j] = rng.normal();
        x.row(i) = (chol * z).transpose();
        nu[i] = rng.normal();
        eps[i] = rng.normal();
    }

    Dataset data;
    data.x = std::move(x);
    data.d = dose_treatment(data.x, nu);
    data.y = dose_outcome(data.x, data.d, eps);
    return data;
}

CurveEstimate true_ate_curve(const Vec& d_grid) {
    CurveEstimate est;
    est.grid = Mat(d_grid);
    est.values = (1.2 * d_grid.array() + d_grid.array().square()).matrix();
    est.estimand = Estimand::Ate;
    return est;
}

Mat hte_covariates(const Vec& v, const Mat& eps234) {
    if (eps234.rows() != v.size() || eps234.cols() != 3)
        throw ConfigError("simulate: covariate noise must be n x 3");
    Mat x(v.size(), 3);
    for (Index i = 0; i < v.size(); ++i) {
        x(i, 0) = 1.0 + 2.0 * v[i] + eps234(i, 0);
        x(i, 1) = 1.0 + 2.0 * v[i] + eps234(i, 1);
        x(i, 2) = (v[i] - 1.0) * (v[i] - 1.0) + eps234(i, 2);
    }
    return x;
}

double hte_treatment_probability(double v, double x1, double x2, double x3) {
    return logistic(0.5 * (v + x1 + x2 + x3));
}

Vec hte_outcome(const Vec& v, const Mat& x, const Vec& d, const Vec& nu) {
    Vec y = Vec::Zero(v.size());
    for (Index i = 0; i < v.size(); ++i)
        if (d[i] == 1.0) y[i] = v[i] * x(i, 0) * x(i, 1) * x(i, 2) + nu[i];
    return y;
}

Dataset gen_hte_design(const HteDesignParams& params) {
    if (params.n < 1) throw ConfigError("simulate: sample size must be at least 1");
    Rng rng(params.seed);

    Vec v(params.n), nu(params.n), treatment_u(params.n);
    Mat eps(params.n, 3);
    for (Index i = 0; i < params.n; ++i) {
        v[i] = rng.uniform(-0.5, 0.5);
        for (int j = 0; j < 3; ++j) eps(i, j) = rng.uniform(-0.5, 0.5);
        nu[i] = rng.normal(0.0, 0.25);  // variance 1/16
        treatment_u[i] = rng.uniform01();
    }

    Dataset data;
    data.v = v;
    data.x = hte_covariates(v, eps);
    data.d.resize(params.n);
    for (Index i = 0; i < params.n; ++i) {
        const double p =
            hte_treatment_probability(v[i], data.x(i, 0), data.x(i, 1), data.x(i, 2));
        data.d[i] = treatment_u[i] <= p ? 1.0 : 0.0;
    }
    data.y = hte_outcome(v, data.x, data.d, nu);
    return data;
}

CurveEstimate true_cate_curve(const Vec& v_grid) {
    CurveEstimate est;
    est.grid = Mat(v_grid);
    est.values.resize(v_grid.size());
    for (Index i = 0; i < v_grid.size(); ++i) {
        const double v = v_grid[i];
        const double one_plus = 1.0 + 2.0 * v;
        const double v_minus = v - 1.0;
        est.values[i] = v * one_plus * one_plus * v_minus * v_minus;
    }
    est.estimand = Estimand::Cate;
    return est;
}

std::string to_string(Design d) { return d == Design::Dose ? "dose" : "hte"; }

Vec default_dose_grid() {
    Vec grid(100);
    for (int i = 0; i < 100; ++i) grid[i] = 0.01 * (i + 1);
    return grid;
}

Vec default_hte_grid() {
    Vec grid(99);
    for (int i = 0; i < 99; ++i) grid[i] = -0.49 + 0.01 * i;
    return grid;
}

double grid_mse(const Vec& estimate, const Vec& truth) {
    if (estimate.size() != truth.size()) throw ConfigError("simulate: grid size mismatch");
    return (estimate - truth).squaredNorm() / static_cast<double>(estimate.size());
}

namespace {

double run_dose_replication(Index n, std::uint64_t seed, const Vec& grid, const Vec& penalty_grid,
                            ridge::Criterion criterion) {
    const Dataset data = gen_dose_design({n, seed});
    causal::BlockKernels blocks{
        kernels::KernelConfig::exp_quadratic(kernels::median_heuristic(data.d)),
        kernels::default_block_kernel(data.x), std::nullopt};
    causal::PenaltyPolicy policy;
    policy.kind = criterion == ridge::Criterion::Loocv ? causal::PenaltyPolicy::Kind::Loocv
                                                       : causal::PenaltyPolicy::Kind::Gcv;
    policy.grid = penalty_grid;
    const Penalties penalties =
        causal::resolve_penalties(data, Estimand::Ate, blocks, policy);
    const CurveEstimate est =
        causal::estimate_ate(data, penalties.lambda, blocks.d, blocks.x, grid);
    return grid_mse(est.values, true_ate_curve(grid).values);
}

double run_hte_replication(Index n, std::uint64_t seed, const Vec& grid, const Vec& penalty_grid,
                           ridge::Criterion criterion) {
    const Dataset data = gen_hte_design({n, seed});
    causal::BlockKernels blocks{
        kernels::KernelConfig::exact_match(), kernels::default_block_kernel(data.x),
        kernels::KernelConfig::exp_quadratic(kernels::median_heuristic(*data.v))};
    causal::PenaltyPolicy policy;
    policy.kind = criterion == ridge::Criterion::Loocv ? causal::PenaltyPolicy::Kind::Loocv
                                                       : causal::PenaltyPolicy::Kind::Gcv;
    policy.grid = penalty_grid;
    const Penalties penalties =
        causal::resolve_penalties(data, Estimand::Cate, blocks, policy);

    // Treatment-effect curve: theta(1, v) - theta(0, v). Rows pair each v so
    // the embedding solve at v is shared between the two treatment levels.
    Mat dv_grid(2 * grid.size(), 2);
    for (Index i = 0; i < grid.size(); ++i) {
        dv_grid(2 * i, 0) = 1.0;
        dv_grid(2 * i, 1) = grid[i];
        dv_grid(2 * i + 1, 0) = 0.0;
        dv_grid(2 * i + 1, 1) = grid[i];
    }
    const CurveEstimate est = causal::estimate_cate(data, penalties.lambda, penalties.lambda2,
                                                    blocks.d, *blocks.v, blocks.x, dv_grid);
    Vec effect(grid.size());
    for (Index i = 0; i < grid.size(); ++i) effect[i] = est.values[2 * i] - est.values[2 * i + 1];
    return grid_mse(effect, true_cate_curve(grid).values);
}

}  // namespace

StudyResult run_study(const StudyConfig& config) {
    if (config.replications < 1)
        throw ConfigError("simulate: replications must be at least 1");
    if (config.sample_sizes.empty()) throw ConfigError("simulate: no sample sizes given");
    const Vec grid = config.eval_grid.size() > 0
                         ? config.eval_grid
                         : (config.design == Design::Dose ? default_dose_grid()
                                                          : default_hte_grid());
    const Vec penalty_grid =
        config.penalty_grid.size() > 0 ? config.penalty_grid : ridge::default_penalty_grid();

    StudyResult result;
    result.cells.resize(config.sample_sizes.size() * config.replications);

    auto run_cell = [&](std::size_t size_index, int rep) {
        const Index n = config.sample_sizes[size_index];
        const std::uint64_t seed = config.seed + static_cast<std::uint64_t>(rep);
        StudyCell cell;
        cell.n = n;
        cell.replication = rep;
        try {
            cell.mse = config.design == Design::Dose
                           ? run_dose_replication(n, seed, grid, penalty_grid, config.criterion)
                           : run_hte_replication(n, seed, grid, penalty_grid, config.criterion);
        } catch (const std::exception& e) {
            cell.mse = std::numeric_limits<double>::quiet_NaN();
            cell.error = e.what();
        }
        result.cells[size_index * config.replications + rep] = std::move(cell);
    };

    const int threads = std::max(1, config.threads);
    if (threads == 1) {
        for (std::size_t s = 0; s < config.sample_sizes.size(); ++s)
            for (int rep = 0; rep < config.replications; ++rep) run_cell(s, rep);
    } else {
        // Replications are independent given derived seeds; each worker owns
        // a strided subset and writes to its own slots.
        std::vector<std::future<void>> workers;
        const std::size_t total = result.cells.size();
        for (int w = 0; w < threads; ++w) {
            workers.push_back(std::async(std::launch::async, [&, w]() {
                for (std::size_t flat = static_cast<std::size_t>(w); flat < total;
                     flat += static_cast<std::size_t>(threads)) {
                    const std::size_t s = flat / static_cast<std::size_t>(config.replications);
                    const int rep = static_cast<int>(flat % config.replications);
                    run_cell(s, rep);
                }
            }));
        }
        for (auto& worker : workers) worker.get();
    }

    for (std::size_t s = 0; s < config.sample_sizes.size(); ++s) {
        std::vector<double> mses;
        int failures = 0;
        for (int rep = 0; rep < config.replications; ++rep) {
            const StudyCell& cell = result.cells[s * config.replications + rep];
            if (cell.error.empty())
                mses.push_back(cell.mse);
            else
                ++failures;
        }
        StudyAggregate agg;
        agg.n = config.sample_sizes[s];
        agg.failures = failures;
        if (!mses.empty()) {
            std::sort(mses.begin(), mses.end());
            double sum = 0.0;
            for (double m : mses) sum += m;
            agg.mean_mse = sum / static_cast<double>(mses.size());
            const std::size_t mid = mses.size() / 2;
            agg.median_mse = mses.size() % 2 == 1 ? mses[mid]
                                                  : 0.5 * (mses[mid - 1] + mses[mid]);
        } else {
            agg.mean_mse = std::numeric_limits<double>::quiet_NaN();
            agg.median_mse = std::numeric_limits<double>::quiet_NaN();
        }
        result.aggregates.push_back(agg);
    }
    return result;
}

}  // namespace kcf::simulate
