// Acceptance run: one PASS/FAIL line per criterion. Exit status is nonzero if any criterion fails.

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "fracvi/harness.hpp"
#include "oracles.hpp"
#include "problems.hpp"
#include "test_support.hpp"

using namespace fracvi;
using namespace fracvi::testing;

namespace {

const double kAlphas[] = {1.0, 0.75, 0.5, 0.25};
const std::vector<int> kNList{25, 50, 100, 200, 400};

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        if (!detail.empty()) detail += "; ";
        detail += what;
    }
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Verdict()>& body) {
    Verdict v;
    try {
        v = body();
    } catch (const std::exception& e) {
        v.pass = false;
        v.detail = std::string("exception: ") + e.what();
    }
    if (!v.pass) ++failures;
    fmt::print("[{}] criterion {}: {} ({})\n", v.pass ? "PASS" : "FAIL", id, title, v.detail);
}

double fitted(const std::string& example, double alpha) {
    RunConfig cfg;
    cfg.example = example;
    cfg.alpha = alpha;
    cfg.N_list = kNList;
    const ConvergeRun run = run_converge(cfg);
    if (!run.report) throw DegenerateDataError(run.degenerate_reason);
    return run.report->fitted_order;
}

Verdict lq_convergence() {
    Verdict v;
    const auto start = std::chrono::steady_clock::now();
    const double order = fitted("lq", 1.0);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    v.require(order >= 0.8 && order <= 1.2, fmt::format("fitted_order={:.4f} in [0.8, 1.2]", order));
    v.require(secs < 10.0, fmt::format("runtime {:.2f}s < 10s", secs));
    return v;
}

Verdict solved_convergence() {
    Verdict v;
    for (double a : kAlphas) {
        const double order = fitted("solved", a);
        v.require(order >= 0.8 && order <= 1.2, fmt::format("alpha={} order={:.4f}", a, order));
    }
    return v;
}

Verdict noether_conservation() {
    Verdict v;
    for (double a : kAlphas) {
        RunConfig cfg;
        cfg.example = "rotation";
        cfg.alpha = a;
        cfg.N = 100;
        const NoetherRun run = run_noether(cfg);
        const double dev_bound = 1e-8 * (1.0 + run.max_abs);
        const double abs_bound = 1e-6 * (1.0 + run.solution.P.max_abs() * run.solution.Q.max_abs());
        v.require(run.max_deviation <= dev_bound && run.max_abs <= abs_bound,
                  fmt::format("alpha={} dev={:.2e} max|I|={:.2e}", a, run.max_deviation, run.max_abs));
    }
    return v;
}

Verdict identity_suites() {
    Verdict v;
    std::mt19937 rng(20240917);
    double worst_dfibp = 0.0;
    double worst_transfer = 0.0;
    int instances = 0;
    for (int N : {2, 5, 17, 64}) {
        const Grid g(0.0, 1.0, N);
        for (double a : kAlphas) {
            const FracCoeffs c = gl_coefficients(FracOrder(a), N);
            for (int trial = 0; trial < 100; ++trial) {
                TimeSeq G1 = random_seq(rng, N, 2, 5.0);
                TimeSeq G2 = random_seq(rng, N, 2, 5.0);
                G2.at(N).setZero();
                const double scale = G1.max_abs() * G2.max_abs() * (g.b() - g.a()) * std::pow(g.h(), -a);
                worst_transfer = std::max(worst_transfer, transfer_residual(c, g, G1, G2) / scale);
                G1.at(0).setZero();
                const double scale0 = G1.max_abs() * G2.max_abs() * (g.b() - g.a()) * std::pow(g.h(), -a);
                worst_dfibp = std::max(worst_dfibp, dfibp_residual(c, g, G1, G2) / scale0);
                ++instances;
            }
        }
    }
    v.require(worst_dfibp <= 1e-10, fmt::format("integration by parts worst/scale={:.2e}", worst_dfibp));
    v.require(worst_transfer <= 1e-10, fmt::format("transfer worst/scale={:.2e}", worst_transfer));
    v.require(true, fmt::format("{} instances each", instances));
    return v;
}

Verdict golden_matrices() {
    // Appendix patterns for N = 5: 'a' alpha_r, 'b' beta_r, 'd' beta_r - alpha_r.
    static const char* const golden[5][6] = {
        {"a00000", "ba0000", "b0a000", "b00a00", "b000a0", "b0000a"},
        {"000000", "0a0000", "daa000", "d0aa00", "d00a00", "d00000"},
        {"000000", "0a0000", "0aa000", "daa000", "d0a000", "d00000"},
        {"000000", "0a0000", "0a0000", "0a0000", "da0000", "d00000"},
        {"000000", "000000", "000000", "000000", "000000", "d00000"},
    };
    Verdict v;
    const FracCoeffs co = gl_coefficients(FracOrder(0.5), 5);
    const NoetherMatrices mats(co);
    int pattern_mismatch = 0;
    double worst = 0.0;
    for (int r = 1; r <= 5; ++r) {
        const Eigen::MatrixXd A = mats.dense(MatrixKind::A, r);
        for (int i = 0; i <= 5; ++i) {
            for (int j = 0; j <= 5; ++j) {
                const char c = golden[r - 1][i][j];
                double want = 0.0;
                if (c == 'a') want = co[r];
                if (c == 'b') want = co.beta(r);
                if (c == 'd') want = co.beta(r) - co[r];
                if ((c == '0') != (A(i, j) == 0.0)) ++pattern_mismatch;
                worst = std::max(worst, std::abs(A(i, j) - want));
            }
        }
    }
    v.require(pattern_mismatch == 0, fmt::format("{} pattern mismatches", pattern_mismatch));
    v.require(worst <= 1e-15, fmt::format("max value error {:.1e}", worst));
    return v;
}

Verdict cauchy_oracles() {
    Verdict v;
    std::mt19937 rng(6);
    double worst = 0.0;
    for (int N : {1, 2, 5, 17, 40, 64}) {
        const Grid g(0.0, 1.0, N);
        for (double a : kAlphas) {
            const FracCoeffs c = gl_coefficients(FracOrder(a), N);
            const Affine f = random_affine(rng, 2, N, std::min(0.5 / std::pow(g.h(), a), 1.5));
            const Eigen::VectorXd A = vec({1.0, -0.5});
            const CauchyRhs left{[&](const Eigen::VectorXd& x, double, int k) { return (f.C * x + f.g.col(k)).eval(); },
                                 f.K()};
            worst = std::max(worst, (solve_left_cauchy(c, g, left, A).values.data() - left_oracle(a, g, f, A))
                                        .lpNorm<Eigen::Infinity>());
            const Eigen::VectorXd T = vec({0.0, 0.25});
            const auto right = solve_right_cauchy(
                c, g, [&](const Eigen::VectorXd& x, int k) { return (f.C * x + f.g.col(k)).eval(); }, f.K(), T);
            worst = std::max(worst, (right.values.data() - right_oracle(a, g, f, T)).lpNorm<Eigen::Infinity>());
        }
    }
    v.require(worst <= 1e-9, fmt::format("max deviation from dense oracles {:.1e}", worst));

    // Implicit Euler at alpha = 1: Q_k = Q_{k-1} / (1 - h).
    const Grid g(0.0, 1.0, 10);
    const FracCoeffs c1 = gl_coefficients(FracOrder(1.0), 10);
    const CauchyRhs id{[](const Eigen::VectorXd& x, double, int) { return x; }, 1.0};
    const TimeSeq Q = solve_left_cauchy(c1, g, id, vec({1.0})).values;
    double euler = 0.0;
    double q = 1.0;
    for (int k = 1; k <= 10; ++k) {
        q /= (1.0 - g.h());
        euler = std::max(euler, std::abs(Q.scalar(k) - q) / q);
    }
    v.require(euler <= 1e-11, fmt::format("implicit Euler relative deviation {:.1e}", euler));
    return v;
}

Verdict variational_structure() {
    Verdict v;
    std::mt19937 rng(7);
    double worst_gateaux = 0.0;
    int solves = 0;
    for (double a : kAlphas) {
        std::vector<OcpProblem> problems{lq_problem(50), sine_problem(50),
                                         make_example("solved", a, 50).problem,
                                         make_example("rotation", a, 50).problem};
        for (const OcpProblem& p : problems) {
            const DiscreteOcp ocp(p, FracOrder(a));
            const PontryaginSolution s = solve_pontryagin(ocp);
            ++solves;
            for (int trial = 0; trial < 20; ++trial) {
                const TimeSeq Ub = random_seq(rng, 50, p.m);
                worst_gateaux = std::max(worst_gateaux, std::abs(ocp.gateaux_derivative(s.U, Ub)) / Ub.max_abs());
            }
        }
    }
    v.require(worst_gateaux <= 1e-6,
              fmt::format("max |DJ(U)(Ubar)|/|Ubar| = {:.1e} over {} solutions", worst_gateaux, solves));

    // Quadratic decay of the linearization defect; f = sin(x) + v so the defect is not rounding noise.
    double worst_ratio = 0.0;
    for (double a : kAlphas) {
        const int N = 50;
        const DiscreteOcp ocp(sine_problem(N), FracOrder(a));
        const TimeSeq U = random_seq(rng, N, 1);
        const TimeSeq Ub = random_seq(rng, N, 1);
        const TimeSeq Q = ocp.state_solve(U);
        const TimeSeq Qb = ocp.linearized_state(U, Q, Ub);
        auto defect = [&](double eps) {
            TimeSeq moved(N, 1);
            moved.data() = U.data() + eps * Ub.data();
            return (ocp.state_solve(moved).data() - Q.data() - eps * Qb.data()).lpNorm<Eigen::Infinity>();
        };
        for (double eps : {1e-2, 1e-3}) {
            worst_ratio = std::max(worst_ratio, defect(eps / 2.0) / defect(eps));
        }
    }
    v.require(worst_ratio <= 0.3, fmt::format("max defect(eps/2)/defect(eps) = {:.3f}", worst_ratio));
    return v;
}

Verdict euler_lagrange() {
    Verdict v;
    for (double a : {0.5, 1.0}) {
        const DiscreteOcp ocp(velocity_problem(100), FracOrder(a));
        const PontryaginSolution s = solve_pontryagin(ocp);
        const EulerLagrangeResidual el = euler_lagrange_residual(ocp, s.Q, s.U, s.P);
        v.require(el.residual.max_abs() <= 1e-7,
                  fmt::format("alpha={} residual={:.1e} (control mismatch {:.1e})", a, el.residual.max_abs(),
                              el.control_mismatch));
    }
    return v;
}

}  // namespace

int main() {
    report(1, "LQ convergence order", lq_convergence);
    report(2, "solved-example convergence order", solved_convergence);
    report(3, "Noether conservation on the rotation example", noether_conservation);
    report(4, "integration-by-parts and transfer identities", identity_suites);
    report(5, "golden A_r matrices", golden_matrices);
    report(6, "Cauchy solvers against dense oracles", cauchy_oracles);
    report(7, "variational structure", variational_structure);
    report(8, "Euler-Lagrange reduction", euler_lagrange);
    fmt::print("{} of 8 criteria passed\n", 8 - failures);
    return failures == 0 ? 0 : 1;
}
