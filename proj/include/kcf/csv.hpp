#pragma once

#include <string>
#include <vector>

#include "kcf/simulate.hpp"
#include "kcf/types.hpp"

namespace kcf::csv {

/// Full-precision decimal rendering (17 significant digits) so outputs
/// round-trip and diff cleanly.
[[nodiscard]] std::string format_full(double value);

/// Header roles: y, d, optional v, x1..xp in any column order.
[[nodiscard]] Dataset read_dataset(const std::string& path);

/// Alternative-population covariate file: x1..xp only.
[[nodiscard]] Mat read_covariates(const std::string& path);

void write_dataset(const std::string& path, const Dataset& data);

/// Writes grid columns named after the estimand's coordinates plus an
/// `estimate` column.
void write_curve(const std::string& path, const CurveEstimate& curve);

void write_samples(const std::string& path, const Vec& ys);

void write_study(const std::string& path, const simulate::StudyResult& result,
                 const std::string& design_name);

/// Atomic text write: temp file in place, then rename.
void write_text(const std::string& path, const std::string& contents);

}  // namespace kcf::csv
