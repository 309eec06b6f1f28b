// Acceptance suite: one line per criterion, nonzero exit when any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "kcf/causal.hpp"
#include "kcf/distributions.hpp"
#include "kcf/graphical.hpp"
#include "kcf/kernels.hpp"
#include "kcf/ridge.hpp"
#include "kcf/simulate.hpp"

using namespace kcf;
using kernels::KernelConfig;

namespace {

struct Criterion {
    std::string name;
    double time_budget_seconds;  // 0 = untimed
    std::function<bool(std::string&)> body;
};

bool check(bool condition, std::string& detail, const std::string& message) {
    if (!condition && detail.empty()) detail = message;
    return condition;
}

std::string fmt(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3g", value);
    return buf;
}

// ---------------------------------------------------------------------------

bool loocv_closed_form(std::string& detail) {
    Rng rng(1001);
    const Vec lambdas = ridge::log_spaced_grid(1e-6, 1e2, 10);
    double worst = 0.0;
    for (int instance = 0; instance < 50; ++instance) {
        const Index n = 3 + static_cast<Index>(rng.uniform01() * 10);  // up to 12
        const Vec pts = testutil::random_vector(rng, n, 1.5);
        const Mat gram =
            kernels::gram(pts, pts, KernelConfig::exp_quadratic(0.5 + rng.uniform01()))
                .entries;
        const Vec y = testutil::random_vector(rng, n);
        for (Index g = 0; g < lambdas.size(); ++g) {
            const double closed = ridge::loocv_loss(gram, y, lambdas[g]);
            const double brute = testutil::brute_force_loocv(gram, y, lambdas[g]);
            const double rel =
                std::abs(closed - brute) / std::max(1e-30, std::abs(brute));
            worst = std::max(worst, rel);
        }
    }
    detail = "worst relative error " + fmt(worst) + " over 50 instances x 10 penalties";
    return worst <= 1e-8;
}

bool discrete_plugin(std::string& detail) {
    Rng rng(2002);
    const KernelConfig exact = KernelConfig::exact_match();
    const double lambda = 1e-10;
    double worst = 0.0;
    for (int instance = 0; instance < 20; ++instance) {
        const int n_d = 2 + static_cast<int>(rng.uniform01() * 2);  // 2..3
        const int n_x = 2 + static_cast<int>(rng.uniform01() * 2);
        const Index n = 60 + static_cast<Index>(rng.uniform01() * 140);  // up to 200

        const Dataset flat = testutil::discrete_instance(rng, n, n_d, n_x);
        Vec d_grid(n_d);
        for (int d = 0; d < n_d; ++d) d_grid[d] = d;
        const CurveEstimate ate = causal::estimate_ate(flat, lambda, exact, exact, d_grid);
        for (Index g = 0; g < d_grid.size(); ++g)
            worst = std::max(worst,
                             std::abs(ate.values[g] - testutil::plugin_ate(flat, d_grid[g])));

        Mat dd_grid(2, 2);
        dd_grid << 0, n_d - 1, n_d - 1, 0;
        const CurveEstimate att =
            causal::estimate_att(flat, lambda, lambda, exact, exact, dd_grid);
        for (Index g = 0; g < 2; ++g)
            worst = std::max(worst, std::abs(att.values[g] - testutil::plugin_att(
                                                                 flat, dd_grid(g, 0),
                                                                 dd_grid(g, 1))));

        const CurveEstimate fd = graphical::estimate_frontdoor(
            {flat, lambda, lambda, 0.0, exact, exact, std::nullopt, d_grid});
        for (Index g = 0; g < d_grid.size(); ++g)
            worst = std::max(
                worst, std::abs(fd.values[g] - testutil::plugin_frontdoor(flat, d_grid[g])));

        const Dataset with_v = testutil::discrete_instance(rng, n, 2, n_x, 2);
        Mat dv_grid(2, 2);
        dv_grid << 0, 1, 1, 0;
        const CurveEstimate cate =
            causal::estimate_cate(with_v, lambda, lambda, exact, exact, exact, dv_grid);
        for (Index g = 0; g < 2; ++g)
            worst = std::max(worst, std::abs(cate.values[g] - testutil::plugin_cate(
                                                                  with_v, dv_grid(g, 0),
                                                                  dv_grid(g, 1))));
    }
    detail = "worst deviation from plug-in oracles " + fmt(worst);
    return worst <= 1e-4;
}

bool incremental_gradient(std::string& detail) {
    const Dataset data = simulate::gen_dose_design({200, 31415});
    const KernelConfig kd = KernelConfig::exp_quadratic(kernels::median_heuristic(data.d));
    const KernelConfig kx = kernels::default_block_kernel(data.x);
    const double lambda = 0.01;
    Vec grid(20);
    for (Index i = 0; i < 20; ++i) grid[i] = 0.025 + 0.05 * static_cast<double>(i);
    const CurveEstimate inc = causal::estimate_inc_ate(data, lambda, kd, kx, grid);

    const double h = 1e-4;
    Vec shifted(40);
    for (Index i = 0; i < 20; ++i) {
        shifted[2 * i] = grid[i] + h;
        shifted[2 * i + 1] = grid[i] - h;
    }
    const CurveEstimate ate = causal::estimate_ate(data, lambda, kd, kx, shifted);
    double worst = 0.0;
    for (Index i = 0; i < 20; ++i) {
        const double fd = (ate.values[2 * i] - ate.values[2 * i + 1]) / (2.0 * h);
        worst = std::max(worst, std::abs(inc.values[i] - fd));
    }
    detail = "worst deviation from finite differences " + fmt(worst);
    return worst <= 1e-5;
}

bool decoupling_identity(std::string& detail) {
    Rng rng(4004);
    Dataset data = testutil::random_continuous_dataset(rng, 50, 3, true);
    const KernelConfig kd = KernelConfig::exp_quadratic(1.0);
    const KernelConfig kv = KernelConfig::exp_quadratic(0.8);
    const KernelConfig kx = KernelConfig::exp_quadratic(Vec::Constant(3, 1.2));
    const KernelConfig ky = KernelConfig::exp_quadratic(0.9);
    const double lambda = 0.03, lambda1 = 0.06, lambda2 = 0.09, lambda3 = 0.05;
    const double n = 50.0;

    const Mat k_dd = kernels::gram(data.d, data.d, kd).entries;
    const Mat k_vv = kernels::gram(*data.v, *data.v, kv).entries;
    const Mat k_xx = kernels::gram(data.x, data.x, kx).entries;
    const Mat joint_dx = k_dd.cwiseProduct(k_xx);
    const Mat joint_dvx = joint_dx.cwiseProduct(k_vv);

    Rng alt_rng(4040);
    const Mat alt = testutil::random_matrix(alt_rng, 20, 3).array() + 0.5;
    const Vec alt_average = kernels::gram(data.x, alt, kx).entries.rowwise().mean();
    const Vec x_average = k_xx.rowwise().mean();
    const Vec d_average = k_dd.rowwise().mean();

    auto lu_embedding = [&](const Mat& inner_gram, double inner_lambda, const Vec& column) {
        Mat system = inner_gram;
        system.diagonal().array() += n * inner_lambda;
        return Vec(k_xx * Eigen::PartialPivLU<Mat>(system).solve(column));
    };

    double worst = 0.0;
    auto compare = [&](double implementation, double one_line) {
        worst = std::max(worst, std::abs(implementation - one_line));
    };

    // causal curves
    const double at_d = 0.4, at_d2 = -0.3, at_v = 0.2;
    const Vec col_d = kernels::kernel_column(data.d, at_d, kd);
    const Vec col_d2 = kernels::kernel_column(data.d, at_d2, kd);
    const Vec col_v = kernels::kernel_column(*data.v, at_v, kv);

    compare(causal::estimate_ate(data, lambda, kd, kx, Vec::Constant(1, at_d)).values[0],
            testutil::one_line_solve(joint_dx, data.y, lambda, col_d.cwiseProduct(x_average)));
    compare(causal::estimate_ds(data, alt, lambda, kd, kx, Vec::Constant(1, at_d)).values[0],
            testutil::one_line_solve(joint_dx, data.y, lambda,
                                     col_d.cwiseProduct(alt_average)));
    {
        Mat grid(1, 2);
        grid << at_d, at_d2;
        const Vec embedded = lu_embedding(k_dd, lambda1, col_d);
        compare(causal::estimate_att(data, lambda, lambda1, kd, kx, grid).values[0],
                testutil::one_line_solve(joint_dx, data.y, lambda,
                                         col_d2.cwiseProduct(embedded)));
        compare(causal::estimate_inc_att(data, lambda, lambda1, kd, kx, grid).values[0],
                testutil::one_line_solve(
                    joint_dx, data.y, lambda,
                    Vec(kernels::grad_kernel_column(data.d, at_d2, kd).cwiseProduct(embedded))));
    }
    {
        Mat grid(1, 2);
        grid << at_d, at_v;
        const Vec embedded = lu_embedding(k_vv, lambda2, col_v);
        compare(causal::estimate_cate(data, lambda, lambda2, kd, kv, kx, grid).values[0],
                testutil::one_line_solve(joint_dvx, data.y, lambda,
                                         Vec(col_d.cwiseProduct(col_v).cwiseProduct(embedded))));
    }
    compare(causal::estimate_inc_ate(data, lambda, kd, kx, Vec::Constant(1, at_d)).values[0],
            testutil::one_line_solve(
                joint_dx, data.y, lambda,
                Vec(kernels::grad_kernel_column(data.d, at_d, kd).cwiseProduct(x_average))));

    // distribution embeddings, evaluated at a handful of outcomes
    const Vec probe = (Vec(3) << -0.5, 0.1, 0.9).finished();
    auto compare_embedding = [&](const distributions::EmbeddingEstimate& emb,
                                 const Mat& outer_gram, const Vec& column) {
        Mat system = outer_gram;
        system.diagonal().array() += n * lambda3;
        const Vec oracle = Eigen::PartialPivLU<Mat>(system).solve(column);
        for (Index p = 0; p < probe.size(); ++p) {
            const Vec y_col = kernels::kernel_column(data.y, probe[p], ky);
            compare(emb.evaluate(probe[p]), y_col.dot(oracle));
        }
    };

    distributions::EmbeddingRequest request;
    request.kernel_d = kd;
    request.kernel_x = kx;
    request.kernel_y = ky;
    request.kernel_v = kv;
    request.penalties.lambda3 = lambda3;
    request.penalties.lambda1 = lambda1;
    request.penalties.lambda2 = lambda2;
    request.d = at_d;
    request.d_prime = at_d2;
    request.v = at_v;

    request.estimand = distributions::DistEstimand::DAte;
    compare_embedding(distributions::embed_counterfactual(data, request), joint_dx,
                      col_d.cwiseProduct(x_average));
    request.estimand = distributions::DistEstimand::DDs;
    request.alt_covariates = alt;
    compare_embedding(distributions::embed_counterfactual(data, request), joint_dx,
                      col_d.cwiseProduct(alt_average));
    request.alt_covariates.reset();
    request.estimand = distributions::DistEstimand::DAtt;
    compare_embedding(distributions::embed_counterfactual(data, request), joint_dx,
                      col_d2.cwiseProduct(lu_embedding(k_dd, lambda1, col_d)));
    request.estimand = distributions::DistEstimand::DCate;
    compare_embedding(distributions::embed_counterfactual(data, request), joint_dvx,
                      Vec(col_d.cwiseProduct(col_v)
                              .cwiseProduct(lu_embedding(k_vv, lambda2, col_v))));

    // front-door curve and embedding
    graphical::FrontDoorRequest fd;
    fd.data = data;
    fd.lambda = lambda;
    fd.lambda1 = lambda1;
    fd.lambda3 = lambda3;
    fd.kernel_d = kd;
    fd.kernel_x = kx;
    fd.kernel_y = ky;
    fd.d_grid = Vec::Constant(1, at_d);
    const Vec fd_column = d_average.cwiseProduct(lu_embedding(k_dd, lambda1, col_d));
    compare(graphical::estimate_frontdoor(fd).values[0],
            testutil::one_line_solve(joint_dx, data.y, lambda, fd_column));
    compare_embedding(graphical::embed_frontdoor(fd, at_d), joint_dx, fd_column);

    detail = "worst one-line vs two-stage deviation " + fmt(worst);
    return worst <= 1e-10;
}

bool consistency_trend(std::string& detail) {
    simulate::StudyConfig dose;
    dose.design = simulate::Design::Dose;
    dose.sample_sizes = {100, 1000};
    dose.replications = 20;
    dose.seed = 11000;
    dose.threads = 2;
    const simulate::StudyResult dose_result = simulate::run_study(dose);

    simulate::StudyConfig hte;
    hte.design = simulate::Design::Hte;
    hte.sample_sizes = {250, 1000};
    hte.replications = 20;
    hte.seed = 12000;
    hte.threads = 2;
    const simulate::StudyResult hte_result = simulate::run_study(hte);

    const double dose_small = dose_result.aggregates[0].median_mse;
    const double dose_large = dose_result.aggregates[1].median_mse;
    const double hte_small = hte_result.aggregates[0].median_mse;
    const double hte_large = hte_result.aggregates[1].median_mse;
    detail = "dose median mse " + fmt(dose_small) + " -> " + fmt(dose_large) +
             ", hte median mse " + fmt(hte_small) + " -> " + fmt(hte_large);
    for (const auto& agg : dose_result.aggregates)
        if (agg.failures > 0) return false;
    for (const auto& agg : hte_result.aggregates)
        if (agg.failures > 0) return false;
    return dose_large < dose_small && hte_large < hte_small;
}

bool truth_curves(std::string& detail) {
    bool ok = true;
    const Vec one = simulate::true_ate_curve(Vec::Constant(1, 1.0)).values;
    ok = check(one[0] == 2.2, detail, "dose truth at d=1 is not 2.2") && ok;
    Vec zeros(3);
    zeros << 0.0, -0.5, 1.0;
    const Vec cate = simulate::true_cate_curve(zeros).values;
    for (Index i = 0; i < 3; ++i)
        ok = check(cate[i] == 0.0, detail, "hte truth nonzero at a root") && ok;
    if (detail.empty()) detail = "theta(1) = 2.2 and all three roots exact";
    return ok;
}

bool herding_quadrature(std::string& detail) {
    distributions::EmbeddingEstimate emb;
    emb.coefficients = (Vec(2) << 2.0 / 3.0, 1.0 / 3.0).finished();
    emb.outcome_points = (Vec(2) << 0.0, 1.0).finished();
    emb.outcome_kernel = KernelConfig::exp_quadratic(0.25);
    emb.estimand = distributions::DistEstimand::DAte;
    emb.eval_point = Vec::Zero(1);

    const Vec grid = distributions::default_candidate_grid(emb.outcome_points, 512);
    const auto sample = distributions::herd(emb, 400, grid);
    const double at_25 = distributions::herding_distance(emb, sample.points.head(25));
    const double at_400 = distributions::herding_distance(emb, sample.points);

    double near_zero = 0.0;
    for (Index j = 0; j < 300; ++j)
        if (std::abs(sample.points[j]) < std::abs(sample.points[j] - 1.0)) near_zero += 1.0;
    const double freq0 = near_zero / 300.0;
    const double freq1 = 1.0 - freq0;

    detail = "rkhs distance " + fmt(at_25) + " @25 -> " + fmt(at_400) + " @400, frequencies (" +
             fmt(freq0) + ", " + fmt(freq1) + ")";
    return at_400 < at_25 && std::abs(freq0 - 2.0 / 3.0) < 0.1 &&
           std::abs(freq1 - 1.0 / 3.0) < 0.1;
}

bool ds_ate_degeneracy(std::string& detail) {
    Rng rng(8008);
    for (int instance = 0; instance < 10; ++instance) {
        const Index n = 10 + static_cast<Index>(rng.uniform01() * 30);
        const Index dim = 1 + static_cast<Index>(rng.uniform01() * 3);
        const Dataset data = testutil::random_continuous_dataset(rng, n, dim);
        const KernelConfig kd = KernelConfig::exp_quadratic(0.5 + rng.uniform01());
        const KernelConfig kx =
            KernelConfig::exp_quadratic(Vec::Constant(dim, 0.5 + rng.uniform01()));
        const double lambda = std::pow(10.0, -3.0 * rng.uniform01());
        Vec grid(3);
        grid << -0.5, 0.0, 0.75;
        const CurveEstimate ate = causal::estimate_ate(data, lambda, kd, kx, grid);
        const CurveEstimate ds = causal::estimate_ds(data, data.x, lambda, kd, kx, grid);
        for (Index g = 0; g < grid.size(); ++g)
            if (ate.values[g] != ds.values[g]) {
                detail = "instance " + std::to_string(instance) + " differs";
                return false;
            }
    }
    detail = "bitwise equal on 10 instances";
    return true;
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {"loocv-closed-form-oracle", 5.0, loocv_closed_form},
        {"discrete-plugin-equivalence", 10.0, discrete_plugin},
        {"incremental-gradient-check", 10.0, incremental_gradient},
        {"decoupling-identity", 0.0, decoupling_identity},
        {"consistency-trend", 900.0, consistency_trend},
        {"truth-curves", 0.0, truth_curves},
        {"herding-quadrature", 0.0, herding_quadrature},
        {"ds-ate-degeneracy", 0.0, ds_ate_degeneracy},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        std::string detail;
        const auto start = std::chrono::steady_clock::now();
        bool pass = false;
        try {
            pass = criterion.body(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (criterion.time_budget_seconds > 0.0 && seconds > criterion.time_budget_seconds) {
            pass = false;
            detail += " [exceeded " + fmt(criterion.time_budget_seconds) + "s budget]";
        }
        std::printf("[%s] %s (%.2fs) %s\n", pass ? "PASS" : "FAIL", criterion.name.c_str(),
                    seconds, detail.c_str());
        std::fflush(stdout);
        if (!pass) ++failures;
    }
    if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
