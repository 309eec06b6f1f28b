#pragma once

#include <optional>

#include "kcf/distributions.hpp"
#include "kcf/kernels.hpp"
#include "kcf/types.hpp"

namespace kcf::graphical {

/// Front-door estimation inputs. The x block of the dataset is the mediator
/// intercepting every treatment-to-outcome path. The back-door case needs
/// no operation of its own: its closed form coincides with the dose
/// response estimator in the causal module.
struct FrontDoorRequest {
    Dataset data;
    double lambda = 0.0;   // outer penalty for the causal curve
    double lambda1 = 0.0;  // mediator embedding penalty
    double lambda3 = 0.0;  // outer penalty for the distribution embedding
    kernels::KernelConfig kernel_d;
    kernels::KernelConfig kernel_x;
    std::optional<kernels::KernelConfig> kernel_y;  // embedding use only
    Vec d_grid;

    void validate(bool embedding) const;
};

/// theta(d): the treatment-marginal average of predictions against
/// K_Dd_i paired with the mediator embedding column at d.
[[nodiscard]] CurveEstimate estimate_frontdoor(const FrontDoorRequest& request);

/// Distribution-embedding analogue at one treatment level; herdable via the
/// distributions module.
[[nodiscard]] distributions::EmbeddingEstimate embed_frontdoor(const FrontDoorRequest& request,
                                                               double d);

}  // namespace kcf::graphical
