#include "fracvi/noether.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace fracvi {

NoetherMatrices::NoetherMatrices(FracCoeffs coeffs) : coeffs_(std::move(coeffs)) {}

double NoetherMatrices::entry(MatrixKind kind, int r, int i, int j) const {
    const int N = coeffs_.N();
    if (r < 1 || r > N || i < 0 || i > N || j < 0 || j > N) {
        throw UsageError("noether matrix: index out of range (r = " + std::to_string(r) +
                         ", i = " + std::to_string(i) + ", j = " + std::to_string(j) + ")");
    }
    const auto ind = [](bool b) { return b ? 1.0 : 0.0; };
    const double c = ind(r <= i && j == 0);
    double b = 0.0;
    if (r == 1) {
        b = ind(i == j);
    } else {
        b = ind(1 <= i && i <= N - 1) * ind(1 <= j && j <= N - r) * ind(0 <= i - j && i - j <= r - 1) -
            ind(j == 0) * ind(r <= i);
    }
    switch (kind) {
        case MatrixKind::B:
            return b;
        case MatrixKind::C:
            return c;
        case MatrixKind::A:
            return coeffs_[r] * b + coeffs_.beta(r) * c;
    }
    return 0.0;
}

Eigen::MatrixXd NoetherMatrices::dense(MatrixKind kind, int r) const {
    const int N = coeffs_.N();
    Eigen::MatrixXd out(N + 1, N + 1);
    for (int i = 0; i <= N; ++i) {
        for (int j = 0; j <= N; ++j) {
            out(i, j) = entry(kind, r, i, j);
        }
    }
    return out;
}

double matrix_entry(MatrixKind kind, int r, int i, int j, FracOrder alpha, int N) {
    return NoetherMatrices(gl_coefficients(alpha, N)).entry(kind, r, i, j);
}

TimeSeq transfer_sum(const FracCoeffs& c, const TimeSeq& G1, const TimeSeq& G2) {
    const int N = G1.N();
    if (G2.N() != N || G1.dim() != G2.dim()) {
        throw UsageError("transfer_sum: sequences must share length and dimension");
    }
    if (c.N() < N) {
        throw UsageError("transfer_sum: coefficients shorter than the sequences");
    }
    require_valid(G1, {0, N}, "transfer_sum");
    require_valid(G2, {0, N}, "transfer_sum");
    const Eigen::MatrixXd& g1 = G1.data();
    const Eigen::MatrixXd& g2 = G2.data();

    TimeSeq out(N, 1);
    Eigen::MatrixXd& I = out.data();
    std::vector<double> prefix(N + 2);
    for (int r = 1; r <= N; ++r) {
        // s_r(j) = G1_j . G2_{j+r-1}, zero once j + r - 1 > N.
        const auto s = [&](int j) { return j + r - 1 <= N ? g1.col(j).dot(g2.col(j + r - 1)) : 0.0; };
        const double alpha_r = c[r];
        const double beta_r = c.beta(r);
        const double s0 = s(0);
        if (r == 1) {
            for (int i = 0; i <= N; ++i) {
                I(0, i) += alpha_r * s(i) + (i >= 1 ? beta_r * s0 : 0.0);
            }
            continue;
        }
        // prefix[j] = s(1) + ... + s(j-1) over the band columns 1..N-r.
        prefix[0] = prefix[1] = 0.0;
        for (int j = 1; j <= N - r; ++j) {
            prefix[j + 1] = prefix[j] + s(j);
        }
        for (int i = 0; i <= N; ++i) {
            double band = 0.0;
            if (i >= 1 && i <= N - 1) {
                const int lo = std::max(1, i - r + 1);
                const int hi = std::min(i, N - r);
                if (lo <= hi) {
                    band = prefix[hi + 1] - prefix[lo];
                }
            }
            const double col0 = i >= r ? s0 : 0.0;
            I(0, i) += alpha_r * (band - col0) + beta_r * col0;
        }
    }
    return out;
}

double transfer_residual(const FracCoeffs& c, const Grid& grid, const TimeSeq& G1,
                         const TimeSeq& G2) {
    const int N = grid.N();
    require_shape(G2, N, G1.dim(), "transfer_residual");
    require_shape(G1, N, G2.dim(), "transfer_residual");
    require_valid(G2, {0, N}, "transfer_residual");
    if (G2.at(N).lpNorm<Eigen::Infinity>() != 0.0) {
        throw PreconditionError("transfer_residual: require G2_N = 0");
    }
    const TimeSeq right = delta_plus(c, grid, G2, DerivativeStyle::RiemannLiouville);
    const TimeSeq left = delta_minus(c, grid, G1, DerivativeStyle::Caputo);
    const TimeSeq S = transfer_sum(c, G1, G2);
    const double factor = std::pow(grid.h(), 1.0 - c.alpha.value());

    double worst = 0.0;
    for (int k = 1; k <= N; ++k) {
        const double lhs = G1.at(k).dot(right.at(k - 1)) - left.at(k).dot(G2.at(k - 1));
        const double rhs = factor * (S.scalar(k) - S.scalar(k - 1)) / grid.h();
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

TimeSeq conserved_quantity(const FracCoeffs& c, const Grid& grid, const TimeSeq& G,
                           const TimeSeq& P) {
    require_shape(G, grid.N(), P.dim(), "conserved_quantity");
    require_shape(P, grid.N(), G.dim(), "conserved_quantity");
    return transfer_sum(c, G, P);
}

OneParamGroup rotation_group(double theta) {
    OneParamGroup g;
    g.dim = 2;
    g.map = [theta](double s, const Eigen::VectorXd& x) -> Eigen::VectorXd {
        const double cs = std::cos(s * theta);
        const double sn = std::sin(s * theta);
        Eigen::VectorXd y(2);
        y << cs * x(0) - sn * x(1), sn * x(0) + cs * x(1);
        return y;
    };
    g.generator = [theta](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        Eigen::VectorXd y(2);
        y << -theta * x(1), theta * x(0);
        return y;
    };
    return g;
}

double group_axiom_defect(const OneParamGroup& g, const std::vector<double>& s_samples,
                          const std::vector<Eigen::VectorXd>& x_samples, double eps) {
    double worst = 0.0;
    for (const auto& x : x_samples) {
        if (x.size() != g.dim) {
            throw UsageError("group_axiom_defect: sample dimension mismatch");
        }
        worst = std::max(worst, (g.map(0.0, x) - x).lpNorm<Eigen::Infinity>());
        for (double s : s_samples) {
            for (double s2 : s_samples) {
                worst = std::max(worst,
                                 (g.map(s, g.map(s2, x)) - g.map(s + s2, x)).lpNorm<Eigen::Infinity>());
            }
        }
        const Eigen::VectorXd fd = (g.map(eps, x) - g.map(-eps, x)) / (2.0 * eps);
        worst = std::max(worst, (fd - g.generator(x)).lpNorm<Eigen::Infinity>());
    }
    return worst;
}

TimeSeq generator_values(const OneParamGroup& g, const TimeSeq& Q) {
    if (Q.dim() != g.dim) {
        throw UsageError("generator_values: dimension mismatch");
    }
    TimeSeq out(Q.N(), Q.dim(), Q.valid_range());
    const IndexRange r = Q.valid_range();
    for (int k = r.first; k <= r.last; ++k) {
        out.at(k) = g.generator(Q.at(k));
    }
    return out;
}

double invariance_residual(const DiscreteOcp& ocp, const GroupTriple& groups,
                           const PontryaginSolution& sol, const std::vector<double>& s_samples) {
    const OcpProblem& p = ocp.problem();
    const Grid& grid = ocp.grid();
    const int N = grid.N();
    if (groups[0].dim != p.d || groups[1].dim != p.m || groups[2].dim != p.d) {
        throw UsageError("invariance_residual: group dimensions must be (d, m, d)");
    }
    require_shape(sol.Q, N, p.d, "invariance_residual");
    require_shape(sol.U, N, p.m, "invariance_residual");
    require_shape(sol.P, N, p.d, "invariance_residual");

    const auto side = [&](double s) {
        TimeSeq moved(N, p.d);
        for (int k = 0; k <= N; ++k) {
            moved.at(k) = groups[0].map(s, sol.Q.at(k));
        }
        const TimeSeq D = delta_minus(ocp.coeffs(), grid, moved, DerivativeStyle::Caputo);
        std::vector<double> vals(N + 1, 0.0);
        for (int k = 1; k <= N; ++k) {
            const Eigen::VectorXd w = groups[2].map(s, sol.P.at(k - 1));
            const Eigen::VectorXd v = groups[1].map(s, sol.U.at(k));
            vals[k] = p.hamiltonian(moved.at(k), v, w, grid.t(k)) - w.dot(D.at(k));
        }
        return vals;
    };

    const std::vector<double> reference = side(0.0);
    double worst = 0.0;
    for (double s : s_samples) {
        const std::vector<double> moved = side(s);
        for (int k = 1; k <= N; ++k) {
            worst = std::max(worst, std::abs(moved[k] - reference[k]));
        }
    }
    return worst;
}

}  // namespace fracvi
