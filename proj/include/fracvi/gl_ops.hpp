#pragma once

#include <vector>

#include "fracvi/time_seq.hpp"

namespace fracvi {

/// Grünwald-Letnikov weights alpha_r, r = 0..N, and their partial sums
/// beta_r = alpha_0 + ... + alpha_r.
struct FracCoeffs {
    FracOrder alpha;
    std::vector<double> coeffs;
    std::vector<double> partial_sums;

    int N() const noexcept { return static_cast<int>(coeffs.size()) - 1; }
    double operator[](int r) const { return coeffs.at(static_cast<std::size_t>(r)); }
    double beta(int r) const { return partial_sums.at(static_cast<std::size_t>(r)); }
};

/// alpha_0 = 1, alpha_r = alpha_{r-1} (r - 1 - alpha) / r.
FracCoeffs gl_coefficients(FracOrder alpha, int N);

enum class DerivativeStyle { RiemannLiouville, Caputo };

/// Left discrete derivative, result valid on [1, N]:
///   (Delta_- G)_k = h^-alpha sum_{r=0}^{k} alpha_r G_{k-r}
/// The Caputo style applies the same stencil to G - G_0.
TimeSeq delta_minus(const FracCoeffs& c, const Grid& grid, const TimeSeq& G,
                    DerivativeStyle style);

/// Right discrete derivative, result valid on [0, N-1]:
///   (Delta_+ G)_k = h^-alpha sum_{r=0}^{N-k} alpha_r G_{k+r}
/// The Caputo style applies the same stencil to G - G_N.
TimeSeq delta_plus(const FracCoeffs& c, const Grid& grid, const TimeSeq& G,
                   DerivativeStyle style);

/// sigma^k(G)_j = G_{j+k}. Unpadded, the valid range shrinks by |k|; padded, slots
/// that would read outside [0, N] hold zero and the result is valid on [0, N].
TimeSeq shift(const TimeSeq& G, int k, bool pad_with_zero = false);

/// Absolute defect of the discrete fractional integration by parts identity
///   h sum_{k=1}^{N} (cDelta_- G1)_k . G2_{k-1} = h sum_{k=0}^{N-1} G1_{k+1} . (cDelta_+ G2)_k
/// Requires G1_0 = 0 and G2_N = 0 (PreconditionError otherwise).
double dfibp_residual(const FracCoeffs& c, const Grid& grid, const TimeSeq& G1,
                      const TimeSeq& G2);

/// h * sum over k of a_k . b_k for k in [first, last].
double discrete_inner(const TimeSeq& a, const TimeSeq& b, IndexRange range, double h);

}  // namespace fracvi
