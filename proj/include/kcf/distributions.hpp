#pragma once

#include <optional>
#include <string>

#include "kcf/kernels.hpp"
#include "kcf/types.hpp"

namespace kcf::distributions {

enum class DistEstimand { DAte, DDs, DAtt, DCate, DFrontDoor };

[[nodiscard]] std::string to_string(DistEstimand e);

/// Counterfactual-distribution embedding: a function y -> R represented as
/// a coefficient vector over the training outcomes, evaluated through the
/// outcome kernel column.
struct EmbeddingEstimate {
    Vec coefficients;
    Vec outcome_points;
    kernels::KernelConfig outcome_kernel;
    DistEstimand estimand = DistEstimand::DAte;
    Vec eval_point;  // (d), (d, d'), or (d, v)

    [[nodiscard]] double evaluate(double y) const;
    [[nodiscard]] Vec evaluate(const Vec& ys) const;
};

struct EmbeddingRequest {
    DistEstimand estimand = DistEstimand::DAte;
    Penalties penalties;  // lambda3, plus lambda1 (DAtt) or lambda2 (DCate)
    kernels::KernelConfig kernel_d;
    kernels::KernelConfig kernel_x;
    kernels::KernelConfig kernel_y;
    std::optional<kernels::KernelConfig> kernel_v;
    std::optional<Mat> alt_covariates;  // DDs only
    double d = 0.0;
    double d_prime = 0.0;  // DAtt only
    double v = 0.0;        // DCate only

    void validate(const Dataset& data) const;
};

/// Coefficients (K_DD . K_XX + n lambda3 I)^{-1} column, with the column
/// mirroring the causal estimators' averaged or embedding-product columns.
[[nodiscard]] EmbeddingEstimate embed_counterfactual(const Dataset& data,
                                                     const EmbeddingRequest& request);

/// Deterministic greedy samples: point j maximizes the embedding minus
/// 1/(j+1) times the kernel sum over earlier picks, over a finite grid.
/// Ties resolve to the lowest grid index.
struct HerdedSample {
    Vec points;
    Vec candidate_grid;
};

[[nodiscard]] HerdedSample herd(const EmbeddingEstimate& embedding, int m,
                                const Vec& candidate_grid);

/// 512 equally spaced candidates spanning the outcome range widened by half
/// the range on each side.
[[nodiscard]] Vec default_candidate_grid(const Vec& outcomes, int count = 512);

/// Exact RKHS distance between the embedding and the empirical embedding of
/// the herded points, expanded through Gram evaluations.
[[nodiscard]] double herding_distance(const EmbeddingEstimate& embedding,
                                      const Vec& herded_points);

}  // namespace kcf::distributions
