#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "kcf/ridge.hpp"
#include "kcf/types.hpp"

namespace kcf::simulate {

inline constexpr int kDoseCovariateDim = 100;

struct DoseDesignParams {
    Index n = 0;
    std::uint64_t seed = 0;
};

struct HteDesignParams {
    Index n = 0;
    std::uint64_t seed = 0;
};

/// beta_j = j^{-2}, j = 1..100.
[[nodiscard]] Vec dose_beta();
/// Unit diagonal with 0.5 on the first off-diagonals.
[[nodiscard]] Mat dose_sigma();

/// Design equations with the noise passed in, so the stochastic draw and
/// the arithmetic can be checked separately.
[[nodiscard]] Vec dose_treatment(const Mat& x, const Vec& nu);
[[nodiscard]] Vec dose_outcome(const Mat& x, const Vec& d, const Vec& eps);

/// Continuous-dose design: X ~ N(0, Sigma), D = Phi(3 X'beta) + 0.75 nu,
/// Y = 1.2 D + 1.2 X'beta + D^2 + D X_1 + eps. Per observation the draw
/// order is the 100 covariate normals, then nu, then eps.
[[nodiscard]] Dataset gen_dose_design(const DoseDesignParams& params);

/// theta(d) = 1.2 d + d^2.
[[nodiscard]] CurveEstimate true_ate_curve(const Vec& d_grid);

[[nodiscard]] Mat hte_covariates(const Vec& v, const Mat& eps234);
[[nodiscard]] double hte_treatment_probability(double v, double x1, double x2, double x3);
[[nodiscard]] Vec hte_outcome(const Vec& v, const Mat& x, const Vec& d, const Vec& nu);

/// Binary-treatment heterogeneous design: V ~ U(-1/2,1/2), X from V plus
/// uniform noise, D ~ Bernoulli(logistic(...)), Y = V X1 X2 X3 + nu when
/// D = 1 and exactly 0 otherwise. Per observation the draw order is
/// eps1..eps4, nu, then the treatment uniform.
[[nodiscard]] Dataset gen_hte_design(const HteDesignParams& params);

/// theta(1, v) = v (1 + 2v)^2 (v - 1)^2; the d = 0 curve is identically 0.
[[nodiscard]] CurveEstimate true_cate_curve(const Vec& v_grid);

enum class Design { Dose, Hte };

[[nodiscard]] std::string to_string(Design d);

struct StudyConfig {
    Design design = Design::Dose;
    std::vector<Index> sample_sizes;
    int replications = 1;
    std::uint64_t seed = 0;
    Vec eval_grid;     // empty -> design default
    Vec penalty_grid;  // empty -> ridge default
    ridge::Criterion criterion = ridge::Criterion::Loocv;
    int threads = 1;
};

struct StudyCell {
    Index n = 0;
    int replication = 0;
    double mse = 0.0;
    std::string error;  // nonempty when the replication failed
};

struct StudyAggregate {
    Index n = 0;
    double mean_mse = 0.0;
    double median_mse = 0.0;
    int failures = 0;
};

struct StudyResult {
    std::vector<StudyCell> cells;
    std::vector<StudyAggregate> aggregates;
};

/// d in {0.01, ..., 1.00}, 100 points.
[[nodiscard]] Vec default_dose_grid();
/// v in {-0.49, ..., 0.49}, 99 points.
[[nodiscard]] Vec default_hte_grid();

/// Mean squared deviation between estimate values and the truth over a
/// shared grid.
[[nodiscard]] double grid_mse(const Vec& estimate, const Vec& truth);

/// Monte-Carlo study: per (n, replication) a fresh dataset seeded at
/// seed + replication, kernels from the median heuristic (binary treatment
/// uses the exact-match kernel), penalties cross-validated, MSE against the
/// analytic truth. Estimation failures are recorded per replication rather
/// than aborting the study.
[[nodiscard]] StudyResult run_study(const StudyConfig& config);

}  // namespace kcf::simulate
