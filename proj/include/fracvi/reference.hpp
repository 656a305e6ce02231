#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

#include "fracvi/time_seq.hpp"

namespace fracvi {

/// E_{a,b}(z) = sum_k z^k / Gamma(a k + b) by direct summation with log-Gamma terms.
/// Stops once |term| <= tol |sum| or after 200 terms. Intended for |z| <= 2.
double mittag_leffler(double a, double b, double z, double tol = 1e-16);

/// Control of the linear-quadratic example (L = (x^2 + v^2)/2, f = x + v, A = 1 on [0, 1])
/// for alpha = 1:
///   u(t) = cosh(sqrt2)/R sinh(sqrt2 t) - sinh(sqrt2)/R cosh(sqrt2 t),
///   R = sqrt2 cosh(sqrt2) - sinh(sqrt2).
double lq_exact_control(double t);

/// Control of the example L = (1 - t) x + v^2/2, f = x + v, A = 1 on [0, 1]:
///   u(t) = -(1 - t)^(alpha + 1) E_{alpha, alpha + 2}((1 - t)^alpha).
double solved_example_exact_control(double alpha, double t);

/// max_{k=1..N} ||exact(t_k) - U_k||; k = 0 is excluded since U_0 is free.
double max_control_error(const TimeSeq& U, const std::function<Eigen::VectorXd(double)>& exact,
                         const Grid& grid);

struct ConvergenceRow {
    int N = 0;
    double h = 0.0;
    double max_error = 0.0;
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;    ///< sorted by N ascending
    double fitted_order = 0.0;           ///< least-squares slope of log(error) on log(h)
    std::vector<double> pairwise_orders; ///< log(e_i/e_{i+1}) / log(h_i/h_{i+1})
};

/// Needs at least 3 rows with positive errors (DegenerateDataError otherwise).
ConvergenceReport convergence_order(std::vector<ConvergenceRow> rows);

}  // namespace fracvi
