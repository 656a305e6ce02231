#include "fracvi/reference.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fracvi {

double mittag_leffler(double a, double b, double z, double tol) {
    if (!(a > 0.0) || !(b > 0.0)) {
        throw DomainError("mittag_leffler: parameters must be positive");
    }
    if (!(std::abs(z) <= 2.0)) {
        throw DomainError("mittag_leffler: |z| <= 2 required");
    }
    if (!(tol > 0.0)) {
        throw DomainError("mittag_leffler: tol must be positive");
    }
    if (z == 0.0) {
        return std::exp(-std::lgamma(b));
    }
    const double log_abs_z = std::log(std::abs(z));
    double sum = 0.0;
    for (int k = 0; k < 200; ++k) {
        // Gamma(a k + b) > 0 for a k + b > 0, so lgamma gives the log of the value itself.
        double term = std::exp(k * log_abs_z - std::lgamma(a * k + b));
        if (z < 0.0 && (k % 2 == 1)) {
            term = -term;
        }
        sum += term;
        if (std::abs(term) <= tol * std::abs(sum)) {
            break;
        }
    }
    return sum;
}

double lq_exact_control(double t) {
    if (!(t >= 0.0 && t <= 1.0)) {
        throw DomainError("lq_exact_control: t must lie in [0, 1]");
    }
    const double s2 = std::sqrt(2.0);
    const double R = s2 * std::cosh(s2) - std::sinh(s2);
    return std::cosh(s2) / R * std::sinh(s2 * t) - std::sinh(s2) / R * std::cosh(s2 * t);
}

double solved_example_exact_control(double alpha, double t) {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw DomainError("solved_example_exact_control: 0 < alpha <= 1 required");
    }
    if (!(t >= 0.0 && t <= 1.0)) {
        throw DomainError("solved_example_exact_control: t must lie in [0, 1]");
    }
    const double s = 1.0 - t;
    if (s == 0.0) {
        return 0.0;
    }
    return -std::pow(s, alpha + 1.0) * mittag_leffler(alpha, alpha + 2.0, std::pow(s, alpha));
}

double max_control_error(const TimeSeq& U, const std::function<Eigen::VectorXd(double)>& exact,
                         const Grid& grid) {
    if (U.N() != grid.N()) {
        throw UsageError("max_control_error: sequence length does not match grid");
    }
    require_valid(U, {1, grid.N()}, "max_control_error");
    double worst = 0.0;
    for (int k = 1; k <= grid.N(); ++k) {
        const Eigen::VectorXd e = exact(grid.t(k));
        if (e.size() != U.dim()) {
            throw UsageError("max_control_error: exact control has the wrong dimension");
        }
        worst = std::max(worst, (e - U.at(k)).norm());
    }
    return worst;
}

ConvergenceReport convergence_order(std::vector<ConvergenceRow> rows) {
    if (rows.size() < 3) {
        throw DegenerateDataError("convergence_order: need at least 3 rows");
    }
    for (const auto& r : rows) {
        if (!(r.max_error > 0.0) || !std::isfinite(r.max_error)) {
            throw DegenerateDataError("convergence_order: errors must be positive and finite (N = " +
                                      std::to_string(r.N) + ", error = " +
                                      std::to_string(r.max_error) + ")");
        }
        if (!(r.h > 0.0)) {
            throw DegenerateDataError("convergence_order: step sizes must be positive");
        }
    }
    std::sort(rows.begin(), rows.end(),
              [](const ConvergenceRow& x, const ConvergenceRow& y) { return x.N < y.N; });

    const auto n = static_cast<double>(rows.size());
    double mean_x = 0.0;
    double mean_y = 0.0;
    for (const auto& r : rows) {
        mean_x += std::log(r.h);
        mean_y += std::log(r.max_error);
    }
    mean_x /= n;
    mean_y /= n;
    double sxy = 0.0;
    double sxx = 0.0;
    for (const auto& r : rows) {
        const double dx = std::log(r.h) - mean_x;
        sxy += dx * (std::log(r.max_error) - mean_y);
        sxx += dx * dx;
    }
    if (!(sxx > 0.0)) {
        throw DegenerateDataError("convergence_order: all step sizes are equal");
    }

    ConvergenceReport report;
    report.fitted_order = sxy / sxx;
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
        report.pairwise_orders.push_back(std::log(rows[i].max_error / rows[i + 1].max_error) /
                                         std::log(rows[i].h / rows[i + 1].h));
    }
    report.rows = std::move(rows);
    return report;
}

}  // namespace fracvi
