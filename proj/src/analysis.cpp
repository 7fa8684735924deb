#include "agentgraph/analysis.hpp"
#include "agentgraph/errors.hpp"

#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace agentgraph {

Correlation pearson_r(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("pearson_r needs samples of equal length");
    const std::size_t n = x.size();
    if (n < 3) throw DegenerateSampleError("pearson_r needs at least 3 observations, got " + std::to_string(n));
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw DegenerateSampleError("pearson_r needs non-constant samples");
    Correlation c;
    c.n = n;
    c.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
    const double df = static_cast<double>(n - 2);
    const double rest = 1.0 - c.r * c.r;
    if (rest <= 0.0) {
        c.p_value = 0.0;
    } else {
        const double t = std::abs(c.r) * std::sqrt(df / rest);
        boost::math::students_t dist(df);
        c.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, t));
    }
    return c;
}

OlsFit ols_fit(const std::vector<std::vector<double>>& features, std::span<const double> target) {
    const auto rows = features.size();
    if (rows != target.size()) throw std::invalid_argument("ols_fit needs one target per feature row");
    const auto cols = rows ? features[0].size() : 0;
    for (const auto& row : features)
        if (row.size() != cols) throw std::invalid_argument("ols_fit feature rows differ in length");
    const auto p = cols + 1;
    if (rows < p) {
        throw RankDeficiencyError("ols_fit needs at least " + std::to_string(p) + " rows for " + std::to_string(cols) +
                                  " features, got " + std::to_string(rows));
    }
    Eigen::MatrixXd X(rows, p);
    Eigen::VectorXd y(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        X(i, 0) = 1.0;
        for (std::size_t j = 0; j < cols; ++j) X(i, j + 1) = features[i][j];
        y(i) = target[i];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    // relative threshold so tiny collinearity noise still counts as rank loss
    qr.setThreshold(1e-10);
    if (qr.rank() < static_cast<Eigen::Index>(p)) {
        throw RankDeficiencyError("design matrix with intercept has rank " + std::to_string(qr.rank()) + " < " +
                                  std::to_string(p));
    }
    const Eigen::VectorXd beta = qr.solve(y);
    OlsFit fit;
    fit.coefficients.assign(beta.data(), beta.data() + beta.size());
    const double mean = y.mean();
    const double ss_tot = (y.array() - mean).square().sum();
    const double ss_res = (y - X * beta).squaredNorm();
    fit.r_squared = ss_tot == 0.0 ? 0.0 : 1.0 - ss_res / ss_tot;
    return fit;
}

} // namespace agentgraph
