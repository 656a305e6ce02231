#include "fracvi/gl_ops.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

namespace fracvi {

FracCoeffs gl_coefficients(FracOrder alpha, int N) {
    if (N < 1) {
        throw DomainError("gl_coefficients: require N >= 1");
    }
    const double a = alpha.value();
    FracCoeffs c{alpha, std::vector<double>(N + 1), std::vector<double>(N + 1)};
    c.coeffs[0] = 1.0;
    c.partial_sums[0] = 1.0;
    for (int r = 1; r <= N; ++r) {
        c.coeffs[r] = c.coeffs[r - 1] * (r - 1 - a) / r;
        c.partial_sums[r] = c.partial_sums[r - 1] + c.coeffs[r];
    }
    return c;
}

namespace {

void check_operator_input(const FracCoeffs& c, const Grid& grid, const TimeSeq& G,
                          const char* what) {
    if (c.N() < grid.N()) {
        throw UsageError(std::string(what) + ": coefficients computed for N = " +
                         std::to_string(c.N()) + " but grid has N = " +
                         std::to_string(grid.N()));
    }
    if (G.N() != grid.N()) {
        throw UsageError(std::string(what) + ": sequence length does not match grid");
    }
    require_valid(G, {0, grid.N()}, what);
}

}  // namespace

TimeSeq delta_minus(const FracCoeffs& c, const Grid& grid, const TimeSeq& G,
                    DerivativeStyle style) {
    check_operator_input(c, grid, G, "delta_minus");
    const int N = grid.N();
    const double scale = std::pow(grid.h(), -c.alpha.value());
    const Eigen::MatrixXd& g = G.data();
    const Eigen::VectorXd base = style == DerivativeStyle::Caputo
                                     ? Eigen::VectorXd(g.col(0))
                                     : Eigen::VectorXd::Zero(G.dim());

    TimeSeq out(N, G.dim(), {1, N});
    for (int k = 1; k <= N; ++k) {
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(G.dim());
        for (int r = 0; r <= k; ++r) {
            acc += c[r] * (g.col(k - r) - base);
        }
        out.at(k) = scale * acc;
    }
    return out;
}

TimeSeq delta_plus(const FracCoeffs& c, const Grid& grid, const TimeSeq& G,
                   DerivativeStyle style) {
    check_operator_input(c, grid, G, "delta_plus");
    const int N = grid.N();
    const double scale = std::pow(grid.h(), -c.alpha.value());
    const Eigen::MatrixXd& g = G.data();
    const Eigen::VectorXd base = style == DerivativeStyle::Caputo
                                     ? Eigen::VectorXd(g.col(N))
                                     : Eigen::VectorXd::Zero(G.dim());

    TimeSeq out(N, G.dim(), {0, N - 1});
    for (int k = 0; k < N; ++k) {
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(G.dim());
        for (int r = 0; r <= N - k; ++r) {
            acc += c[r] * (g.col(k + r) - base);
        }
        out.at(k) = scale * acc;
    }
    return out;
}

TimeSeq shift(const TimeSeq& G, int k, bool pad_with_zero) {
    const int N = G.N();
    if (std::abs(k) > N) {
        throw UsageError("shift: |k| = " + std::to_string(std::abs(k)) + " exceeds N = " +
                         std::to_string(N));
    }
    const IndexRange src = G.valid_range();
    TimeSeq out(N, G.dim());
    for (int j = 0; j <= N; ++j) {
        const int from = j + k;
        if (src.contains(from)) {
            out.data().col(j) = G.data().col(from);
        }
    }
    if (!pad_with_zero) {
        // Readable where j + k lies in the source range.
        const int first = std::max(0, src.first - k);
        const int last = std::min(N, src.last - k);
        out.set_valid_range({first, std::max(last, first - 1)});
    }
    return out;
}

double discrete_inner(const TimeSeq& a, const TimeSeq& b, IndexRange range, double h) {
    if (a.dim() != b.dim()) {
        throw UsageError("discrete_inner: dimension mismatch");
    }
    double s = 0.0;
    for (int k = range.first; k <= range.last; ++k) {
        s += a.at(k).dot(b.at(k));
    }
    return h * s;
}

double dfibp_residual(const FracCoeffs& c, const Grid& grid, const TimeSeq& G1,
                      const TimeSeq& G2) {
    if (G1.dim() != G2.dim()) {
        throw UsageError("dfibp_residual: dimension mismatch");
    }
    const int N = grid.N();
    require_valid(G1, {0, N}, "dfibp_residual");
    require_valid(G2, {0, N}, "dfibp_residual");
    if (G1.at(0).lpNorm<Eigen::Infinity>() != 0.0) {
        throw PreconditionError("dfibp_residual: require G1_0 = 0");
    }
    if (G2.at(N).lpNorm<Eigen::Infinity>() != 0.0) {
        throw PreconditionError("dfibp_residual: require G2_N = 0");
    }
    const TimeSeq left = delta_minus(c, grid, G1, DerivativeStyle::Caputo);
    const TimeSeq right = delta_plus(c, grid, G2, DerivativeStyle::Caputo);
    const double lhs = discrete_inner(left, shift(G2, -1), {1, N}, grid.h());
    const double rhs = discrete_inner(shift(G1, 1), right, {0, N - 1}, grid.h());
    return std::abs(lhs - rhs);
}

}  // namespace fracvi
