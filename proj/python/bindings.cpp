#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fracvi/harness.hpp"

namespace py = pybind11;
using namespace fracvi;

namespace {

// Python sees sequences as (N+1, dim) arrays, one row per node.
Eigen::MatrixXd to_rows(const TimeSeq& s) { return s.data().transpose(); }

TimeSeq from_rows(const Eigen::MatrixXd& rows) {
    if (rows.rows() < 1 || rows.cols() < 1) {
        throw UsageError("expected a non-empty (N+1, dim) array");
    }
    TimeSeq s(static_cast<int>(rows.rows()) - 1, static_cast<int>(rows.cols()));
    s.data() = rows.transpose();
    return s;
}

// Entries outside the valid range are reported as NaN.
Eigen::MatrixXd to_rows_masked(const TimeSeq& s) {
    Eigen::MatrixXd out = to_rows(s);
    const IndexRange r = s.valid_range();
    for (int k = 0; k <= s.N(); ++k) {
        if (!r.contains(k)) out.row(k).setConstant(std::numeric_limits<double>::quiet_NaN());
    }
    return out;
}

DerivativeStyle style_of(bool caputo) {
    return caputo ? DerivativeStyle::Caputo : DerivativeStyle::RiemannLiouville;
}

SweepOpts sweep_opts(double tol_stat, double tol_control, int max_outer, double relax, int anderson) {
    SweepOpts o;
    o.tol_stationarity = tol_stat;
    o.tol_control = tol_control;
    o.max_outer_iters = max_outer;
    o.relaxation_lambda = relax;
    o.anderson_depth = anderson;
    return o;
}

py::dict solution_dict(const Grid& grid, const PontryaginSolution& s) {
    Eigen::VectorXd t(grid.N() + 1);
    for (int k = 0; k <= grid.N(); ++k) t(k) = grid.t(k);
    py::dict d;
    d["t"] = t;
    d["U"] = to_rows(s.U);
    d["Q"] = to_rows(s.Q);
    d["P"] = to_rows(s.P);
    d["stationarity_residual"] = s.stationarity_residual;
    d["state_residual"] = s.state_residual;
    d["adjoint_residual"] = s.adjoint_residual;
    d["outer_iters"] = s.outer_iters;
    d["cost"] = s.cost;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Grunwald-Letnikov operators and the discrete fractional Pontryagin solver";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
    py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
    py::register_exception<DegenerateDataError>(m, "DegenerateDataError", PyExc_ValueError);
    py::register_exception<NonConvergenceError>(m, "NonConvergenceError", PyExc_RuntimeError);
    py::register_exception<ControlUpdateError>(m, "ControlUpdateError", PyExc_RuntimeError);

    m.def(
        "gl_coefficients",
        [](double alpha, int N) {
            const FracCoeffs c = gl_coefficients(FracOrder(alpha), N);
            return py::make_tuple(c.coeffs, c.partial_sums);
        },
        py::arg("alpha"), py::arg("N"), "Return (alpha_r, beta_r) for r = 0..N.");

    m.def(
        "delta_minus",
        [](double alpha, double a, double b, const Eigen::MatrixXd& G, bool caputo) {
            const TimeSeq s = from_rows(G);
            const Grid grid(a, b, s.N());
            return to_rows_masked(delta_minus(gl_coefficients(FracOrder(alpha), s.N()), grid, s, style_of(caputo)));
        },
        py::arg("alpha"), py::arg("a"), py::arg("b"), py::arg("G"), py::arg("caputo") = false,
        "Left operator; row 0 of the result is NaN.");

    m.def(
        "delta_plus",
        [](double alpha, double a, double b, const Eigen::MatrixXd& G, bool caputo) {
            const TimeSeq s = from_rows(G);
            const Grid grid(a, b, s.N());
            return to_rows_masked(delta_plus(gl_coefficients(FracOrder(alpha), s.N()), grid, s, style_of(caputo)));
        },
        py::arg("alpha"), py::arg("a"), py::arg("b"), py::arg("G"), py::arg("caputo") = false,
        "Right operator; row N of the result is NaN.");

    m.def(
        "dfibp_residual",
        [](double alpha, double a, double b, const Eigen::MatrixXd& G1, const Eigen::MatrixXd& G2) {
            const TimeSeq s1 = from_rows(G1);
            return dfibp_residual(gl_coefficients(FracOrder(alpha), s1.N()), Grid(a, b, s1.N()), s1, from_rows(G2));
        },
        py::arg("alpha"), py::arg("a"), py::arg("b"), py::arg("G1"), py::arg("G2"));

    m.def(
        "transfer_residual",
        [](double alpha, double a, double b, const Eigen::MatrixXd& G1, const Eigen::MatrixXd& G2) {
            const TimeSeq s1 = from_rows(G1);
            return transfer_residual(gl_coefficients(FracOrder(alpha), s1.N()), Grid(a, b, s1.N()), s1,
                                     from_rows(G2));
        },
        py::arg("alpha"), py::arg("a"), py::arg("b"), py::arg("G1"), py::arg("G2"));

    m.def(
        "noether_matrix",
        [](const std::string& kind, int r, double alpha, int N) {
            MatrixKind k;
            if (kind == "A") k = MatrixKind::A;
            else if (kind == "B") k = MatrixKind::B;
            else if (kind == "C") k = MatrixKind::C;
            else throw UsageError("kind must be 'A', 'B' or 'C'");
            return NoetherMatrices(gl_coefficients(FracOrder(alpha), N)).dense(k, r);
        },
        py::arg("kind"), py::arg("r"), py::arg("alpha"), py::arg("N"));

    m.def("mittag_leffler", &mittag_leffler, py::arg("a"), py::arg("b"), py::arg("z"), py::arg("tol") = 1e-16);
    m.def("lq_exact_control", &lq_exact_control, py::arg("t"));
    m.def("solved_example_exact_control", &solved_example_exact_control, py::arg("alpha"), py::arg("t"));

    m.def(
        "convergence_order",
        [](const std::vector<int>& N, const std::vector<double>& errors, double a, double b) {
            if (N.size() != errors.size()) throw UsageError("N and errors must have equal length");
            std::vector<ConvergenceRow> rows;
            for (std::size_t i = 0; i < N.size(); ++i) rows.push_back({N[i], (b - a) / N[i], errors[i]});
            const ConvergenceReport r = convergence_order(rows);
            return py::make_tuple(r.fitted_order, r.pairwise_orders);
        },
        py::arg("N"), py::arg("errors"), py::arg("a") = 0.0, py::arg("b") = 1.0,
        "Return (fitted_order, pairwise_orders).");

    m.def("example_names", &example_names);

    m.def(
        "solve",
        [](const std::string& example, double alpha, int N, double a, double b, double tol_stat,
           double tol_control, int max_outer, double relax, int anderson) {
            RunConfig cfg;
            cfg.example = example;
            cfg.alpha = alpha;
            cfg.N = N;
            cfg.a = a;
            cfg.b = b;
            cfg.sweep = sweep_opts(tol_stat, tol_control, max_outer, relax, anderson);
            SolveRun run = [&] {
                py::gil_scoped_release release;
                return run_solve(cfg);
            }();
            return solution_dict(run.grid, run.solution);
        },
        py::arg("example"), py::arg("alpha") = 1.0, py::arg("N") = 100, py::arg("a") = 0.0, py::arg("b") = 1.0,
        py::arg("tol_stat") = 1e-9, py::arg("tol_control") = 1e-9, py::arg("max_outer") = 200,
        py::arg("relax") = 1.0, py::arg("anderson") = 8,
        "Solve a built-in example; returns a dict with t, U, Q, P and diagnostics.");

    m.def(
        "converge",
        [](const std::string& example, double alpha, const std::vector<int>& N_list) {
            RunConfig cfg;
            cfg.example = example;
            cfg.alpha = alpha;
            cfg.N_list = N_list;
            ConvergeRun run = [&] {
                py::gil_scoped_release release;
                return run_converge(cfg);
            }();
            py::list rows;
            for (const auto& r : run.rows) rows.append(py::make_tuple(r.N, r.h, r.max_error));
            py::dict d;
            d["rows"] = rows;
            if (run.report) {
                d["fitted_order"] = run.report->fitted_order;
                d["pairwise_orders"] = run.report->pairwise_orders;
            } else {
                d["fitted_order"] = py::none();
                d["degenerate_reason"] = run.degenerate_reason;
            }
            return d;
        },
        py::arg("example"), py::arg("alpha"), py::arg("N_list"));

    m.def(
        "noether",
        [](double alpha, int N, bool zero_generator) {
            RunConfig cfg;
            cfg.example = "rotation";
            cfg.alpha = alpha;
            cfg.N = N;
            cfg.zero_generator = zero_generator;
            NoetherRun run = [&] {
                py::gil_scoped_release release;
                return run_noether(cfg);
            }();
            py::dict d = solution_dict(run.grid, run.solution);
            d["I"] = Eigen::VectorXd(run.invariant.data().row(0).transpose());
            d["max_deviation"] = run.max_deviation;
            d["max_abs"] = run.max_abs;
            d["invariance_residual"] = run.invariance;
            return d;
        },
        py::arg("alpha"), py::arg("N") = 100, py::arg("zero_generator") = false,
        "Conserved quantity of the rotation example.");
}
