#include "fracvi/frac_cauchy.hpp"

#include <cmath>
#include <string>

namespace fracvi {

namespace {

double check_contraction(const FracCoeffs& c, const Grid& grid, double K,
                         const FixedPointOpts& opts, const char* what) {
    if (c.N() < grid.N()) {
        throw UsageError(std::string(what) + ": coefficients shorter than the grid");
    }
    if (!(opts.tol > 0.0) || opts.max_iters < 1) {
        throw UsageError(std::string(what) + ": require tol > 0 and max_iters >= 1");
    }
    if (!(K >= 0.0)) {
        throw UsageError(std::string(what) + ": Lipschitz constant must be >= 0");
    }
    const double ha = std::pow(grid.h(), c.alpha.value());
    if (!(ha * K < 1.0)) {
        throw PreconditionError(std::string(what) + ": contraction condition h^alpha K < 1 fails (" +
                                std::to_string(ha * K) + ")");
    }
    return ha;
}

// Iterates x <- ha * F(x) + base from `start`; returns {iterations, initial gap}.
template <class Map>
std::pair<int, double> iterate_fixed_point(Eigen::VectorXd& x, const Map& F,
                                           const Eigen::VectorXd& base, double ha,
                                           const FixedPointOpts& opts, int node,
                                           const char* what) {
    double first_gap = 0.0;
    double gap = 0.0;
    for (int it = 1; it <= opts.max_iters; ++it) {
        Eigen::VectorXd next = ha * F(x) + base;
        gap = (next - x).lpNorm<Eigen::Infinity>();
        if (it == 1) {
            first_gap = gap;
        }
        x = next;
        if (!std::isfinite(gap)) {
            break;
        }
        if (gap <= opts.tol) {
            return {it, first_gap};
        }
    }
    throw NonConvergenceError(std::string(what) + ": fixed point did not converge at node " +
                                  std::to_string(node),
                              node, gap);
}

}  // namespace

CauchySolution solve_left_cauchy(const FracCoeffs& c, const Grid& grid, const CauchyRhs& rhs,
                                 const Eigen::VectorXd& initial, const FixedPointOpts& opts) {
    const double ha = check_contraction(c, grid, rhs.lipschitz_K, opts, "solve_left_cauchy");
    const int N = grid.N();
    const int d = static_cast<int>(initial.size());

    CauchySolution sol{TimeSeq(N, d), std::vector<int>(N + 1, 0),
                       std::vector<double>(N + 1, 0.0)};
    Eigen::MatrixXd& Q = sol.values.data();
    Q.col(0) = initial;
    for (int k = 1; k <= N; ++k) {
        Eigen::VectorXd base = initial;
        for (int r = 1; r <= k - 1; ++r) {
            base -= c[r] * (Q.col(k - r) - initial);
        }
        const double t = grid.t(k);
        Eigen::VectorXd x = Q.col(k - 1);
        auto F = [&](const Eigen::VectorXd& y) { return rhs.eval(y, t, k); };
        const auto [iters, gap] =
            iterate_fixed_point(x, F, base, ha, opts, k, "solve_left_cauchy");
        Q.col(k) = x;
        sol.iterations[k] = iters;
        sol.initial_gap[k] = gap;
    }
    return sol;
}

CauchySolution solve_right_cauchy(const FracCoeffs& c, const Grid& grid, const IndexedRhs& rhs,
                                  double lipschitz_K, const Eigen::VectorXd& terminal,
                                  const FixedPointOpts& opts) {
    const double ha = check_contraction(c, grid, lipschitz_K, opts, "solve_right_cauchy");
    const int N = grid.N();
    const int d = static_cast<int>(terminal.size());

    CauchySolution sol{TimeSeq(N, d), std::vector<int>(N + 1, 0),
                       std::vector<double>(N + 1, 0.0)};
    Eigen::MatrixXd& P = sol.values.data();
    P.col(N) = terminal;
    for (int k = N - 1; k >= 0; --k) {
        Eigen::VectorXd base = terminal;
        for (int r = 1; r <= N - k - 1; ++r) {
            base -= c[r] * (P.col(k + r) - terminal);
        }
        Eigen::VectorXd x = P.col(k + 1);
        auto F = [&](const Eigen::VectorXd& p) { return rhs(p, k); };
        const auto [iters, gap] =
            iterate_fixed_point(x, F, base, ha, opts, k, "solve_right_cauchy");
        P.col(k) = x;
        sol.iterations[k] = iters;
        sol.initial_gap[k] = gap;
    }
    return sol;
}

}  // namespace fracvi
