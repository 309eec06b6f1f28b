#pragma once

#include <string>

#include "kcf/types.hpp"

namespace kcf::kernels {

enum class Family { ExpQuadratic, ExactMatch };

/// Kernel choice for one variable block. ExpQuadratic is the product of
/// per-dimension exponentiated-quadratic factors with the given
/// lengthscales; ExactMatch is 1 on bitwise-equal points and 0 otherwise.
struct KernelConfig {
    Family family = Family::ExpQuadratic;
    Vec lengthscales;

    [[nodiscard]] static KernelConfig exp_quadratic(Vec lengthscales);
    [[nodiscard]] static KernelConfig exp_quadratic(double lengthscale);
    [[nodiscard]] static KernelConfig exact_match();

    void validate() const;
    [[nodiscard]] bool differentiable() const { return family == Family::ExpQuadratic; }
};

struct GramMatrix {
    Mat entries;
    std::string row_block;
    std::string col_block;
};

/// Kernel matrix between two point sets (one point per row; a plain vector
/// converts to one scalar column). Entry (i,j) is
/// prod_d exp{-(a_id - b_jd)^2 / (2 iota_d^2)} for ExpQuadratic, or the
/// all-dimensions-equal indicator for ExactMatch.
[[nodiscard]] GramMatrix gram(const Mat& points_a, const Mat& points_b,
                              const KernelConfig& config,
                              std::string row_block = {}, std::string col_block = {});

/// Kernel vector k(points_i, at) for a scalar block.
[[nodiscard]] Vec kernel_column(const Vec& points, double at, const KernelConfig& config);
/// Kernel vector against a single multi-dimensional point.
[[nodiscard]] Vec kernel_column(const Mat& points, const Vec& at, const KernelConfig& config);

/// d/dt k(points_i, t) at t = `at` for a scalar ExpQuadratic kernel:
/// entry i = k(points_i, at) * (points_i - at) / iota^2.
[[nodiscard]] Vec grad_kernel_column(const Vec& points, double at, const KernelConfig& config);

/// Per-dimension lengthscales set to the lower-median of the pairwise
/// absolute interpoint distances. A zero median falls back to the mean of
/// the strictly positive distances, then to 1.0 when every pair ties.
[[nodiscard]] Vec median_heuristic(const Mat& points);

/// One lengthscale for the whole block: the lower-median of the pairwise
/// Euclidean interpoint distances, same fallbacks. For wide blocks the
/// per-dimension product underflows (~exp(-dim/2) per pair), so front ends
/// default multi-dimensional blocks to this variant.
[[nodiscard]] double median_heuristic_shared(const Mat& points);

/// Data-driven default: per-dimension medians for scalar blocks, the shared
/// Euclidean median broadcast across dimensions otherwise.
[[nodiscard]] KernelConfig default_block_kernel(const Mat& points);

}  // namespace kcf::kernels
