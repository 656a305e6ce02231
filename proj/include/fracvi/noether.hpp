#pragma once

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <vector>

#include "fracvi/pontryagin.hpp"

namespace fracvi {

enum class MatrixKind { B, C, A };

/// Entrywise access to the (N+1) x (N+1) matrices of the discrete transfer formula:
///   B_1 = Id,
///   (B_r)_{ij} = [1 <= i <= N-1][1 <= j <= N-r][0 <= i-j <= r-1] - [j = 0][r <= i]   (r >= 2),
///   (C_r)_{ij} = [r <= i][j = 0],
///   A_r = alpha_r B_r + beta_r C_r.
class NoetherMatrices {
public:
    explicit NoetherMatrices(FracCoeffs coeffs);

    int N() const noexcept { return coeffs_.N(); }
    const FracCoeffs& coeffs() const noexcept { return coeffs_; }

    /// 1 <= r <= N, 0 <= i, j <= N; UsageError otherwise.
    double entry(MatrixKind kind, int r, int i, int j) const;

    /// Dense materialization, for inspection and tests.
    Eigen::MatrixXd dense(MatrixKind kind, int r) const;

private:
    FracCoeffs coeffs_;
};

/// Convenience wrapper around NoetherMatrices::entry.
double matrix_entry(MatrixKind kind, int r, int i, int j, FracOrder alpha, int N);

/// S_i = sum_{r=1}^{N} sum_j (A_r)_{ij} G1_j . G2_{j+r-1}, with G2 read as zero past N.
/// Evaluated in O(N^2) from the sparsity pattern, without forming the matrices.
TimeSeq transfer_sum(const FracCoeffs& c, const TimeSeq& G1, const TimeSeq& G2);

/// max_{k=1..N} |G1_k . (Delta_+ G2)_{k-1} - (cDelta_- G1)_k . G2_{k-1} - h^{1-alpha} (S_k - S_{k-1}) / h|
/// with S = transfer_sum(G1, G2). Requires G2_N = 0.
double transfer_residual(const FracCoeffs& c, const Grid& grid, const TimeSeq& G1,
                         const TimeSeq& G2);

/// I = sum_r A_r (G . sigma^{r-1}(P)), valid on [0, N], where G_k is the generator of the
/// state symmetry evaluated at Q_k. Constant along solutions of a system whose Hamiltonian is
/// invariant. The h^{1-alpha} factor of the transfer formula is not included.
TimeSeq conserved_quantity(const FracCoeffs& c, const Grid& grid, const TimeSeq& G,
                           const TimeSeq& P);

/// phi(s, .) with phi(0, .) = Id and phi(s, phi(s', .)) = phi(s + s', .).
struct OneParamGroup {
    std::function<Eigen::VectorXd(double s, const Eigen::VectorXd& x)> map;
    std::function<Eigen::VectorXd(const Eigen::VectorXd& x)> generator;  ///< d phi/ds at s = 0
    int dim = 0;
};

/// Planar rotations by angle s * theta.
OneParamGroup rotation_group(double theta);

/// Largest violation of the group axioms on the samples: identity at s = 0,
/// additivity over all pairs (s, s'), and the central difference with step eps against the
/// generator (that part is O(eps^2)).
double group_axiom_defect(const OneParamGroup& g, const std::vector<double>& s_samples,
                          const std::vector<Eigen::VectorXd>& x_samples, double eps = 1e-5);

/// Action on the state, control and (shifted) adjoint respectively.
using GroupTriple = std::array<OneParamGroup, 3>;

/// max over s and k = 1..N of
///   |H(phi1(s, Q_k), phi2(s, U_k), phi3(s, P_{k-1}), t_k) - phi3(s, P_{k-1}) . cDelta_-(phi1(s, Q))_k
///    - H(Q_k, U_k, P_{k-1}, t_k) + P_{k-1} . (cDelta_- Q)_k|.
double invariance_residual(const DiscreteOcp& ocp, const GroupTriple& groups,
                           const PontryaginSolution& sol, const std::vector<double>& s_samples);

/// Generator of the state group applied nodewise to Q.
TimeSeq generator_values(const OneParamGroup& g, const TimeSeq& Q);

}  // namespace fracvi
