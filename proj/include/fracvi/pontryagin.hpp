#pragma once

#include <Eigen/Dense>

#include <functional>

#include "fracvi/frac_cauchy.hpp"

namespace fracvi {

using ScalarField = std::function<double(const Eigen::VectorXd& x, const Eigen::VectorXd& v, double t)>;
using VectorField =
    std::function<Eigen::VectorXd(const Eigen::VectorXd& x, const Eigen::VectorXd& v, double t)>;
using MatrixField =
    std::function<Eigen::MatrixXd(const Eigen::VectorXd& x, const Eigen::VectorXd& v, double t)>;
/// Returns the control v solving dH/dv(x, v, w, t) = 0.
using ControlUpdate =
    std::function<Eigen::VectorXd(const Eigen::VectorXd& x, const Eigen::VectorXd& w, double t)>;

/// Optimal control data: minimize the discrete cost of L subject to cDelta_- Q = f(Q, U, T),
/// Q_0 = A. Derivatives are analytic and supplied by the caller.
struct OcpProblem {
    int d = 1;  ///< state dimension
    int m = 1;  ///< control dimension
    Eigen::VectorXd A;
    Grid grid{0.0, 1.0, 1};

    ScalarField L;
    VectorField dL_dx;
    VectorField dL_dv;
    VectorField f;
    MatrixField df_dx;  ///< d x d
    MatrixField df_dv;  ///< d x m
    double lipschitz_M = 0.0;  ///< ||f(x1, v, t) - f(x2, v, t)|| <= M ||x1 - x2||

    /// Optional closed-form stationarity solve; empty selects the per-component root finder.
    ControlUpdate control_update;

    /// H(x, v, w, t) = L(x, v, t) + w . f(x, v, t)
    double hamiltonian(const Eigen::VectorXd& x, const Eigen::VectorXd& v,
                       const Eigen::VectorXd& w, double t) const;
    Eigen::VectorXd dH_dx(const Eigen::VectorXd& x, const Eigen::VectorXd& v,
                          const Eigen::VectorXd& w, double t) const;
    Eigen::VectorXd dH_dv(const Eigen::VectorXd& x, const Eigen::VectorXd& v,
                          const Eigen::VectorXd& w, double t) const;
};

/// An OcpProblem discretized at a fractional order. Construction checks the dimensions and
/// the standing step condition 2 h^alpha M < 1.
class DiscreteOcp {
public:
    DiscreteOcp(OcpProblem problem, FracOrder alpha, FixedPointOpts inner = {});

    const OcpProblem& problem() const noexcept { return problem_; }
    const Grid& grid() const noexcept { return problem_.grid; }
    const FracCoeffs& coeffs() const noexcept { return coeffs_; }
    FracOrder alpha() const noexcept { return coeffs_.alpha; }
    const FixedPointOpts& inner_opts() const noexcept { return inner_; }

    /// Q^U: Q_0 = A and cDelta_- Q = f(Q, U, T) on k = 1..N. U is read on [1, N] only.
    TimeSeq state_solve(const TimeSeq& U) const;

    /// P^U: P_N = 0 and, for k = 0..N-1,
    ///   (cDelta_+ P)_k = dL/dx(Q_{k+1}, U_{k+1}, t_{k+1}) + df/dx(Q_{k+1}, U_{k+1}, t_{k+1})^T P_k.
    TimeSeq adjoint_solve(const TimeSeq& U, const TimeSeq& Q) const;

    /// h sum_{k=1}^{N} L(Q^U_k, U_k, t_k)
    double cost(const TimeSeq& U) const;

    /// Solution of the linearized state problem with direction Ubar (zero at k = 0).
    TimeSeq linearized_state(const TimeSeq& U, const TimeSeq& Q, const TimeSeq& Ubar) const;

    /// Directional derivative of cost at U along Ubar, through the linearized state.
    double gateaux_derivative(const TimeSeq& U, const TimeSeq& Ubar) const;

    /// Scalar sequence on [1, N]: ||dH/dv(Q_k, U_k, P_{k-1}, t_k)||.
    TimeSeq stationarity_residual(const TimeSeq& Q, const TimeSeq& U, const TimeSeq& P) const;

    /// max_{k=1..N} ||(cDelta_- Q)_k - f(Q_k, U_k, t_k)||_inf
    double state_residual(const TimeSeq& Q, const TimeSeq& U) const;

    /// max_{k=0..N-1} ||(Delta_+ P)_k - dH/dx(Q_{k+1}, U_{k+1}, P_k, t_{k+1})||_inf
    double adjoint_residual(const TimeSeq& Q, const TimeSeq& U, const TimeSeq& P) const;

    /// Nodewise v solving dH/dv(x, v, w, t) = 0, starting from `guess`. Uses the problem's
    /// closed form when present. Throws ControlUpdateError tagged with `node` on failure.
    Eigen::VectorXd update_control(const Eigen::VectorXd& x, const Eigen::VectorXd& w, double t,
                                   const Eigen::VectorXd& guess, int node) const;

private:
    void check_control(const TimeSeq& U, const char* what) const;
    void check_state(const TimeSeq& Q, const char* what) const;

    OcpProblem problem_;
    FracCoeffs coeffs_;
    FixedPointOpts inner_;
};

struct SweepOpts {
    double tol_stationarity = 1e-9;
    double tol_control = 1e-9;
    int max_outer_iters = 200;
    double relaxation_lambda = 1.0;  ///< in (0, 1]
    /// Number of previous sweeps mixed in by Anderson acceleration; 0 gives the plain
    /// relaxed sweep U <- (1 - lambda) U + lambda U*.
    int anderson_depth = 8;
    FixedPointOpts inner;
};

struct PontryaginSolution {
    TimeSeq Q;
    TimeSeq U;
    TimeSeq P;
    double stationarity_residual = 0.0;  ///< max_k ||dH/dv(Q_k, U_k, P_{k-1}, t_k)||
    double control_increment = 0.0;      ///< ||U* - U||_inf at the last sweep
    double state_residual = 0.0;
    double adjoint_residual = 0.0;
    int outer_iters = 0;
    double cost = 0.0;
};

/// Forward-backward sweep for the shifted discrete Pontryagin system:
/// state solve, adjoint solve, nodewise control update U*, then a relaxed (optionally
/// Anderson-accelerated) step towards U*. Stops when the stationarity residual is within
/// tol_stationarity and ||U* - U||_inf within tol_control. On exit U_0 is set to U_1.
PontryaginSolution solve_pontryagin(const DiscreteOcp& ocp, const TimeSeq& U_init,
                                    const SweepOpts& opts = {});

/// Same, starting from the zero control.
PontryaginSolution solve_pontryagin(const DiscreteOcp& ocp, const SweepOpts& opts = {});

struct EulerLagrangeResidual {
    TimeSeq residual;          ///< scalar, valid on [0, N-1]
    double control_mismatch;   ///< max_{k=1..N} ||U_k - (cDelta_- Q)_k||_inf
};

/// For problems with f(x, v, t) = v: with M_k = -dL/dv(Q_{k+1}, (cDelta_- Q)_{k+1}, t_{k+1})
/// on k < N and M_N = 0, residual_k = ||(Delta_+ M)_k - dL/dx(Q_{k+1}, (cDelta_- Q)_{k+1}, t_{k+1})||.
/// Throws UsageError if f is not the identity in v along the given sequences.
EulerLagrangeResidual euler_lagrange_residual(const DiscreteOcp& ocp, const TimeSeq& Q,
                                              const TimeSeq& U, const TimeSeq& P);

}  // namespace fracvi
