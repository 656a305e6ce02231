#include "fracvi/pontryagin.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <deque>
#include <string>
#include <utility>

namespace fracvi {

double OcpProblem::hamiltonian(const Eigen::VectorXd& x, const Eigen::VectorXd& v,
                               const Eigen::VectorXd& w, double t) const {
    return L(x, v, t) + w.dot(f(x, v, t));
}

Eigen::VectorXd OcpProblem::dH_dx(const Eigen::VectorXd& x, const Eigen::VectorXd& v,
                                  const Eigen::VectorXd& w, double t) const {
    return dL_dx(x, v, t) + df_dx(x, v, t).transpose() * w;
}

Eigen::VectorXd OcpProblem::dH_dv(const Eigen::VectorXd& x, const Eigen::VectorXd& v,
                                  const Eigen::VectorXd& w, double t) const {
    return dL_dv(x, v, t) + df_dv(x, v, t).transpose() * w;
}

DiscreteOcp::DiscreteOcp(OcpProblem problem, FracOrder alpha, FixedPointOpts inner)
    : problem_(std::move(problem)),
      coeffs_(gl_coefficients(alpha, problem_.grid.N())),
      inner_(inner) {
    const OcpProblem& p = problem_;
    if (p.d < 1 || p.m < 1 || p.A.size() != p.d) {
        throw UsageError("ocp: dimensions inconsistent (need d, m >= 1 and A of size d)");
    }
    if (!p.L || !p.dL_dx || !p.dL_dv || !p.f || !p.df_dx || !p.df_dv) {
        throw UsageError("ocp: L, f and their first derivatives are required");
    }
    if (!(p.lipschitz_M >= 0.0)) {
        throw UsageError("ocp: Lipschitz constant M must be >= 0");
    }
    const double ha = std::pow(p.grid.h(), alpha.value());
    if (!(2.0 * ha * p.lipschitz_M < 1.0)) {
        throw PreconditionError("ocp: step condition 2 h^alpha M < 1 fails (" +
                                std::to_string(2.0 * ha * p.lipschitz_M) + ")");
    }
}

void DiscreteOcp::check_control(const TimeSeq& U, const char* what) const {
    require_shape(U, grid().N(), problem_.m, what);
    require_valid(U, {1, grid().N()}, what);
}

void DiscreteOcp::check_state(const TimeSeq& Q, const char* what) const {
    require_shape(Q, grid().N(), problem_.d, what);
    require_valid(Q, {0, grid().N()}, what);
}

TimeSeq DiscreteOcp::state_solve(const TimeSeq& U) const {
    check_control(U, "state_solve");
    const OcpProblem& p = problem_;
    CauchyRhs rhs{[&](const Eigen::VectorXd& x, double t, int k) {
                      return p.f(x, U.at(k), t);
                  },
                  p.lipschitz_M};
    return solve_left_cauchy(coeffs_, grid(), rhs, p.A, inner_).values;
}

TimeSeq DiscreteOcp::adjoint_solve(const TimeSeq& U, const TimeSeq& Q) const {
    check_control(U, "adjoint_solve");
    check_state(Q, "adjoint_solve");
    const OcpProblem& p = problem_;
    const int N = grid().N();

    // Data of the sigma-shifted right-hand side, frozen per node.
    std::vector<Eigen::VectorXd> forcing(N);
    std::vector<Eigen::MatrixXd> jacobian_t(N);
    for (int k = 0; k < N; ++k) {
        const double t = grid().t(k + 1);
        forcing[k] = p.dL_dx(Q.at(k + 1), U.at(k + 1), t);
        jacobian_t[k] = p.df_dx(Q.at(k + 1), U.at(k + 1), t).transpose();
    }
    IndexedRhs rhs = [&](const Eigen::VectorXd& w, int k) -> Eigen::VectorXd {
        return forcing[k] + jacobian_t[k] * w;
    };
    return solve_right_cauchy(coeffs_, grid(), rhs, p.lipschitz_M, Eigen::VectorXd::Zero(p.d),
                              inner_)
        .values;
}

double DiscreteOcp::cost(const TimeSeq& U) const {
    const TimeSeq Q = state_solve(U);
    double s = 0.0;
    for (int k = 1; k <= grid().N(); ++k) {
        s += problem_.L(Q.at(k), U.at(k), grid().t(k));
    }
    return grid().h() * s;
}

TimeSeq DiscreteOcp::linearized_state(const TimeSeq& U, const TimeSeq& Q,
                                      const TimeSeq& Ubar) const {
    check_control(U, "linearized_state");
    check_control(Ubar, "linearized_state");
    check_state(Q, "linearized_state");
    const OcpProblem& p = problem_;
    const int N = grid().N();

    std::vector<Eigen::MatrixXd> fx(N + 1);
    std::vector<Eigen::VectorXd> drive(N + 1);
    for (int k = 1; k <= N; ++k) {
        const double t = grid().t(k);
        fx[k] = p.df_dx(Q.at(k), U.at(k), t);
        drive[k] = p.df_dv(Q.at(k), U.at(k), t) * Ubar.at(k);
    }
    CauchyRhs rhs{[&](const Eigen::VectorXd& x, double, int k) -> Eigen::VectorXd {
                      return fx[k] * x + drive[k];
                  },
                  p.lipschitz_M};
    return solve_left_cauchy(coeffs_, grid(), rhs, Eigen::VectorXd::Zero(p.d), inner_).values;
}

double DiscreteOcp::gateaux_derivative(const TimeSeq& U, const TimeSeq& Ubar) const {
    const TimeSeq Q = state_solve(U);
    const TimeSeq Qbar = linearized_state(U, Q, Ubar);
    double s = 0.0;
    for (int k = 1; k <= grid().N(); ++k) {
        const double t = grid().t(k);
        s += problem_.dL_dx(Q.at(k), U.at(k), t).dot(Qbar.at(k)) +
             problem_.dL_dv(Q.at(k), U.at(k), t).dot(Ubar.at(k));
    }
    return grid().h() * s;
}

TimeSeq DiscreteOcp::stationarity_residual(const TimeSeq& Q, const TimeSeq& U,
                                           const TimeSeq& P) const {
    check_control(U, "stationarity_residual");
    check_state(Q, "stationarity_residual");
    require_shape(P, grid().N(), problem_.d, "stationarity_residual");
    require_valid(P, {0, grid().N() - 1}, "stationarity_residual");
    const int N = grid().N();
    TimeSeq out(N, 1, {1, N});
    for (int k = 1; k <= N; ++k) {
        out.at(k)(0) = problem_.dH_dv(Q.at(k), U.at(k), P.at(k - 1), grid().t(k)).norm();
    }
    return out;
}

double DiscreteOcp::state_residual(const TimeSeq& Q, const TimeSeq& U) const {
    check_control(U, "state_residual");
    check_state(Q, "state_residual");
    const TimeSeq DQ = delta_minus(coeffs_, grid(), Q, DerivativeStyle::Caputo);
    double worst = 0.0;
    for (int k = 1; k <= grid().N(); ++k) {
        const Eigen::VectorXd r = DQ.at(k) - problem_.f(Q.at(k), U.at(k), grid().t(k));
        worst = std::max(worst, r.lpNorm<Eigen::Infinity>());
    }
    return worst;
}

double DiscreteOcp::adjoint_residual(const TimeSeq& Q, const TimeSeq& U,
                                     const TimeSeq& P) const {
    check_control(U, "adjoint_residual");
    check_state(Q, "adjoint_residual");
    require_shape(P, grid().N(), problem_.d, "adjoint_residual");
    const TimeSeq DP = delta_plus(coeffs_, grid(), P, DerivativeStyle::RiemannLiouville);
    double worst = 0.0;
    for (int k = 0; k < grid().N(); ++k) {
        const Eigen::VectorXd r =
            DP.at(k) - problem_.dH_dx(Q.at(k + 1), U.at(k + 1), P.at(k), grid().t(k + 1));
        worst = std::max(worst, r.lpNorm<Eigen::Infinity>());
    }
    return worst;
}

namespace {

// Root of a monotone scalar function, bracketed outward from `start`.
double monotone_root(const std::function<double(double)>& g, double start, int node) {
    const double g0 = g(start);
    if (g0 == 0.0) {
        return start;
    }
    // Probe which direction lowers |g|.
    double step = std::max(1.0, std::abs(start)) * 1e-3;
    const double gp = g(start + step);
    double dir = (std::abs(gp) < std::abs(g0)) ? 1.0 : -1.0;
    if (std::signbit(gp) != std::signbit(g0)) {
        auto tol = boost::math::tools::eps_tolerance<double>(50);
        std::uintmax_t iters = 200;
        const auto [lo, hi] = boost::math::tools::toms748_solve(g, start, start + step, g0, gp,
                                                               tol, iters);
        return 0.5 * (lo + hi);
    }
    double lo = start;
    double glo = g0;
    for (int i = 0; i < 200; ++i) {
        const double hi = start + dir * step;
        const double ghi = g(hi);
        if (!std::isfinite(ghi)) {
            break;
        }
        if (std::signbit(ghi) != std::signbit(g0) || ghi == 0.0) {
            if (ghi == 0.0) {
                return hi;
            }
            double a = std::min(lo, hi);
            double b = std::max(lo, hi);
            double ga = a == lo ? glo : ghi;
            double gb = b == lo ? glo : ghi;
            auto tol = boost::math::tools::eps_tolerance<double>(50);
            std::uintmax_t iters = 200;
            const auto [ra, rb] = boost::math::tools::toms748_solve(g, a, b, ga, gb, tol, iters);
            return 0.5 * (ra + rb);
        }
        lo = hi;
        glo = ghi;
        step *= 2.0;
    }
    throw ControlUpdateError("control update: no sign change of dH/dv found at node " +
                                 std::to_string(node) +
                                 " (dH/dv must be monotone in each control component)",
                             node);
}

}  // namespace

Eigen::VectorXd DiscreteOcp::update_control(const Eigen::VectorXd& x, const Eigen::VectorXd& w,
                                            double t, const Eigen::VectorXd& guess,
                                            int node) const {
    const OcpProblem& p = problem_;
    if (p.control_update) {
        Eigen::VectorXd v = p.control_update(x, w, t);
        if (v.size() != p.m || !v.allFinite()) {
            throw ControlUpdateError("control update: closed form returned an invalid value at node " +
                                         std::to_string(node),
                                     node);
        }
        return v;
    }
    // Coordinate-wise root finding on dH/dv_j, cycling until the full gradient is small.
    Eigen::VectorXd v = guess;
    const double scale = 1.0 + p.dH_dv(x, v, w, t).lpNorm<Eigen::Infinity>();
    for (int cycle = 0; cycle < 100; ++cycle) {
        for (int j = 0; j < p.m; ++j) {
            auto g = [&](double s) {
                Eigen::VectorXd trial = v;
                trial(j) = s;
                return p.dH_dv(x, trial, w, t)(j);
            };
            v(j) = monotone_root(g, v(j), node);
        }
        if (p.m == 1 || p.dH_dv(x, v, w, t).lpNorm<Eigen::Infinity>() <= 1e-14 * scale) {
            return v;
        }
    }
    if (p.dH_dv(x, v, w, t).lpNorm<Eigen::Infinity>() <= 1e-10 * scale) {
        return v;
    }
    throw ControlUpdateError("control update: coordinate cycles did not converge at node " +
                                 std::to_string(node),
                             node);
}

namespace {

Eigen::VectorXd flatten(const TimeSeq& U) {
    const int N = U.N();
    const int m = U.dim();
    Eigen::VectorXd out(static_cast<Eigen::Index>(N) * m);
    for (int k = 1; k <= N; ++k) {
        out.segment(static_cast<Eigen::Index>(k - 1) * m, m) = U.at(k);
    }
    return out;
}

void unflatten(const Eigen::VectorXd& flat, TimeSeq& U) {
    const int m = U.dim();
    for (int k = 1; k <= U.N(); ++k) {
        U.at(k) = flat.segment(static_cast<Eigen::Index>(k - 1) * m, m);
    }
}

}  // namespace

PontryaginSolution solve_pontryagin(const DiscreteOcp& ocp, const TimeSeq& U_init,
                                    const SweepOpts& opts) {
    if (!(opts.tol_stationarity > 0.0) || !(opts.tol_control > 0.0)) {
        throw UsageError("solve_pontryagin: tolerances must be positive");
    }
    if (!(opts.relaxation_lambda > 0.0 && opts.relaxation_lambda <= 1.0)) {
        throw UsageError("solve_pontryagin: relaxation must lie in (0, 1]");
    }
    if (opts.max_outer_iters < 1 || opts.anderson_depth < 0) {
        throw UsageError("solve_pontryagin: max_outer_iters >= 1 and anderson_depth >= 0 required");
    }
    const OcpProblem& p = ocp.problem();
    const Grid& grid = ocp.grid();
    const int N = grid.N();
    require_shape(U_init, N, p.m, "solve_pontryagin");
    require_valid(U_init, {1, N}, "solve_pontryagin");

    // The sweep uses its own inner options; keep the caller's problem untouched.
    const DiscreteOcp inner(p, ocp.alpha(), opts.inner);
    const double lambda = opts.relaxation_lambda;

    TimeSeq U(N, p.m);
    for (int k = 1; k <= N; ++k) {
        U.at(k) = U_init.at(k);
    }
    U.at(0) = U.at(1);

    Eigen::VectorXd x = flatten(U);
    std::deque<Eigen::VectorXd> dx_hist;
    std::deque<Eigen::VectorXd> df_hist;
    Eigen::VectorXd x_prev;
    Eigen::VectorXd f_prev;

    double stat = 0.0;
    double increment = 0.0;
    for (int it = 1; it <= opts.max_outer_iters; ++it) {
        const TimeSeq Q = inner.state_solve(U);
        const TimeSeq P = inner.adjoint_solve(U, Q);

        TimeSeq Ustar(N, p.m);
        stat = 0.0;
        for (int k = 1; k <= N; ++k) {
            const double t = grid.t(k);
            stat = std::max(stat, p.dH_dv(Q.at(k), U.at(k), P.at(k - 1), t).norm());
            Ustar.at(k) = inner.update_control(Q.at(k), P.at(k - 1), t, U.at(k), k);
        }
        const Eigen::VectorXd fval = flatten(Ustar) - x;
        increment = fval.lpNorm<Eigen::Infinity>();

        if (stat <= opts.tol_stationarity && increment <= opts.tol_control) {
            PontryaginSolution sol{Q, U, P};
            sol.U.at(0) = sol.U.at(1);
            sol.stationarity_residual = stat;
            sol.control_increment = increment;
            sol.state_residual = inner.state_residual(Q, sol.U);
            sol.adjoint_residual = inner.adjoint_residual(Q, sol.U, P);
            sol.outer_iters = it;
            double c = 0.0;
            for (int k = 1; k <= N; ++k) {
                c += p.L(Q.at(k), sol.U.at(k), grid.t(k));
            }
            sol.cost = grid.h() * c;
            return sol;
        }

        if (opts.anderson_depth > 0 && x_prev.size() == x.size()) {
            dx_hist.push_back(x - x_prev);
            df_hist.push_back(fval - f_prev);
            if (static_cast<int>(dx_hist.size()) > opts.anderson_depth) {
                dx_hist.pop_front();
                df_hist.pop_front();
            }
        }
        x_prev = x;
        f_prev = fval;

        Eigen::VectorXd next = x + lambda * fval;
        if (!dx_hist.empty()) {
            const auto cols = static_cast<Eigen::Index>(dx_hist.size());
            Eigen::MatrixXd dX(x.size(), cols);
            Eigen::MatrixXd dF(x.size(), cols);
            for (Eigen::Index j = 0; j < cols; ++j) {
                dX.col(j) = dx_hist[static_cast<std::size_t>(j)];
                dF.col(j) = df_hist[static_cast<std::size_t>(j)];
            }
            const Eigen::VectorXd gamma = dF.colPivHouseholderQr().solve(fval);
            if (gamma.allFinite()) {
                next -= (dX + lambda * dF) * gamma;
            }
        }
        if (!next.allFinite()) {
            throw NonConvergenceError("solve_pontryagin: sweep diverged at iteration " +
                                          std::to_string(it),
                                      it, stat);
        }
        x = next;
        unflatten(x, U);
        U.at(0) = U.at(1);
    }
    throw NonConvergenceError("solve_pontryagin: no convergence after " +
                                  std::to_string(opts.max_outer_iters) +
                                  " sweeps (stationarity " + std::to_string(stat) +
                                  ", increment " + std::to_string(increment) + ")",
                              opts.max_outer_iters, stat);
}

PontryaginSolution solve_pontryagin(const DiscreteOcp& ocp, const SweepOpts& opts) {
    return solve_pontryagin(ocp, TimeSeq(ocp.grid().N(), ocp.problem().m), opts);
}

EulerLagrangeResidual euler_lagrange_residual(const DiscreteOcp& ocp, const TimeSeq& Q,
                                              const TimeSeq& U, const TimeSeq& P) {
    const OcpProblem& p = ocp.problem();
    const Grid& grid = ocp.grid();
    const int N = grid.N();
    require_shape(Q, N, p.d, "euler_lagrange_residual");
    require_shape(U, N, p.m, "euler_lagrange_residual");
    require_shape(P, N, p.d, "euler_lagrange_residual");
    require_valid(Q, {0, N}, "euler_lagrange_residual");
    require_valid(U, {1, N}, "euler_lagrange_residual");
    if (p.d != p.m) {
        throw UsageError("euler_lagrange_residual: requires f(x, v, t) = v (d = m)");
    }
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(p.d, p.d);
    for (int k = 1; k <= N; ++k) {
        const double t = grid.t(k);
        const Eigen::VectorXd& x = Q.at(k);
        const Eigen::VectorXd& v = U.at(k);
        const double scale = 1.0 + v.lpNorm<Eigen::Infinity>();
        if ((p.f(x, v, t) - v).lpNorm<Eigen::Infinity>() > 1e-12 * scale ||
            (p.df_dv(x, v, t) - eye).lpNorm<Eigen::Infinity>() > 1e-12 ||
            p.df_dx(x, v, t).lpNorm<Eigen::Infinity>() > 1e-12) {
            throw UsageError("euler_lagrange_residual: requires f(x, v, t) = v");
        }
    }

    const TimeSeq DQ = delta_minus(ocp.coeffs(), grid, Q, DerivativeStyle::Caputo);
    TimeSeq M(N, p.d);
    for (int k = 0; k < N; ++k) {
        M.at(k) = -p.dL_dv(Q.at(k + 1), DQ.at(k + 1), grid.t(k + 1));
    }
    const TimeSeq DM = delta_plus(ocp.coeffs(), grid, M, DerivativeStyle::RiemannLiouville);

    EulerLagrangeResidual out{TimeSeq(N, 1, {0, N - 1}), 0.0};
    for (int k = 0; k < N; ++k) {
        const double t = grid.t(k + 1);
        out.residual.at(k)(0) = (DM.at(k) - p.dL_dx(Q.at(k + 1), DQ.at(k + 1), t)).norm();
    }
    for (int k = 1; k <= N; ++k) {
        out.control_mismatch =
            std::max(out.control_mismatch, (U.at(k) - DQ.at(k)).lpNorm<Eigen::Infinity>());
    }
    return out;
}

}  // namespace fracvi
