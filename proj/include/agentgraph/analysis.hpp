#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace agentgraph {

struct Correlation {
    double r = 0.0;
    double p_value = 1.0;
    std::size_t n = 0;
};

/// Sample Pearson correlation with a two-sided p-value from Student's t on
/// n - 2 degrees of freedom. Needs n >= 3 and non-constant x and y, else
/// DegenerateSampleError.
Correlation pearson_r(std::span<const double> x, std::span<const double> y);

struct OlsFit {
    /// coefficients[0] is the intercept, then one per feature column.
    std::vector<double> coefficients;
    double r_squared = 0.0;
};

/// Least squares with an intercept. `features` is row-major, one row per
/// observation. Needs rows >= columns + 1 and full column rank, else
/// RankDeficiencyError. A constant target has R^2 = 0.
OlsFit ols_fit(const std::vector<std::vector<double>>& features, std::span<const double> target);

} // namespace agentgraph
