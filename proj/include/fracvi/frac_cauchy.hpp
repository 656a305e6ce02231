#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

#include "fracvi/gl_ops.hpp"

namespace fracvi {

/// Right-hand side F(x, t) of a left Cauchy problem with
/// ||F(x1, t) - F(x2, t)|| <= lipschitz_K ||x1 - x2||.
/// The node index k (t = t_k) is passed along so sampled data can be looked up directly.
struct CauchyRhs {
    std::function<Eigen::VectorXd(const Eigen::VectorXd& x, double t, int k)> eval;
    double lipschitz_K = 0.0;
};

/// Right-hand side of a right (backward) problem, indexed by node. Any sigma-shifted data
/// is already folded into the callback.
using IndexedRhs = std::function<Eigen::VectorXd(const Eigen::VectorXd& p, int k)>;

struct FixedPointOpts {
    double tol = 1e-12;  ///< stop when successive iterates differ by <= tol (inf norm)
    int max_iters = 100;
};

/// Solution plus per-node fixed-point diagnostics. Entries at the boundary node that is
/// prescribed (k = 0 for left problems, k = N for right ones) are zero.
struct CauchySolution {
    TimeSeq values;
    std::vector<int> iterations;     ///< map applications used at each node
    std::vector<double> initial_gap; ///< ||x_1 - x_0||_inf of each per-node iteration
};

/// Solves cDelta_-^alpha Q = F(Q, T), Q_0 = A node by node: Q_k is the fixed point of
///   x -> h^alpha F(x, t_k) + Q_0 - sum_{r=1}^{k-1} alpha_r (Q_{k-r} - Q_0),
/// iterated from the warm start Q_{k-1}.
///
/// Throws PreconditionError unless h^alpha K < 1 and NonConvergenceError (carrying the
/// failing node) when a node needs more than max_iters iterations.
CauchySolution solve_left_cauchy(const FracCoeffs& c, const Grid& grid, const CauchyRhs& rhs,
                                 const Eigen::VectorXd& initial, const FixedPointOpts& opts = {});

/// Solves cDelta_+^alpha P = rhs(P, k) on k = 0..N-1 with P_N = terminal, backwards from
/// k = N-1, P_k being the fixed point of
///   p -> h^alpha rhs(p, k) + P_N - sum_{r=1}^{N-k-1} alpha_r (P_{k+r} - P_N).
CauchySolution solve_right_cauchy(const FracCoeffs& c, const Grid& grid, const IndexedRhs& rhs,
                                  double lipschitz_K, const Eigen::VectorXd& terminal,
                                  const FixedPointOpts& opts = {});

}  // namespace fracvi
