#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>

#include "kcf/errors.hpp"

namespace kcf {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Column-oriented sample: outcome y, scalar treatment d, optional
/// interpretable covariate v, and a covariate block x (one row per
/// observation).
struct Dataset {
    Vec y;
    Vec d;
    std::optional<Vec> v;
    Mat x;

    [[nodiscard]] Index n() const { return y.size(); }

    void validate() const {
        if (y.size() == 0) throw ConfigError("dataset: empty sample");
        if (d.size() != y.size())
            throw ConfigError("dataset: y and d length mismatch");
        if (x.rows() != y.size())
            throw ConfigError("dataset: x row count does not match sample size");
        if (v && v->size() != y.size())
            throw ConfigError("dataset: v length does not match sample size");
    }
};

enum class Estimand { Ate, Ds, Att, Cate, IncAte, IncAtt, FrontDoor };

[[nodiscard]] inline std::string to_string(Estimand e) {
    switch (e) {
        case Estimand::Ate: return "ate";
        case Estimand::Ds: return "ds";
        case Estimand::Att: return "att";
        case Estimand::Cate: return "cate";
        case Estimand::IncAte: return "inc-ate";
        case Estimand::IncAtt: return "inc-att";
        case Estimand::FrontDoor: return "frontdoor";
    }
    return "unknown";
}

/// Number of coordinates of one evaluation point: 1 for d-indexed curves,
/// 2 for (d,d') and (d,v) curves.
[[nodiscard]] inline int grid_arity(Estimand e) {
    switch (e) {
        case Estimand::Att:
        case Estimand::IncAtt:
        case Estimand::Cate: return 2;
        default: return 1;
    }
}

/// Ridge penalties used by an estimate; unused stages stay at 0.
struct Penalties {
    double lambda = 0.0;    // outcome regression
    double lambda1 = 0.0;   // embedding of x given d
    double lambda2 = 0.0;   // embedding of x given v
    double lambda3 = 0.0;   // distribution-embedding outer system
};

/// Evaluation grid (one row per point) with estimated causal-function
/// values. dual_weights holds the outer-regression dual vector that
/// produced the values.
struct CurveEstimate {
    Mat grid;
    Vec values;
    Estimand estimand = Estimand::Ate;
    Penalties penalties;
    Vec dual_weights;
};

}  // namespace kcf
