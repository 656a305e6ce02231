#include "fracvi/harness.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <future>
#include <iostream>
#include <limits>
#include <sstream>

namespace fracvi {

namespace {

Eigen::VectorXd vec1(double x) {
    Eigen::VectorXd v(1);
    v << x;
    return v;
}

Eigen::MatrixXd eye(int n) { return Eigen::MatrixXd::Identity(n, n); }

// f = x + v with d = m = n; Lipschitz constant 1.
void set_sum_constraint(OcpProblem& p, int n) {
    p.f = [](const Eigen::VectorXd& x, const Eigen::VectorXd& v, double) -> Eigen::VectorXd {
        return x + v;
    };
    p.df_dx = [n](const Eigen::VectorXd&, const Eigen::VectorXd&, double) { return eye(n); };
    p.df_dv = [n](const Eigen::VectorXd&, const Eigen::VectorXd&, double) { return eye(n); };
    p.lipschitz_M = 1.0;
    // dH/dv = v + w for every built-in problem with a quadratic control cost.
    p.control_update = [](const Eigen::VectorXd&, const Eigen::VectorXd& w,
                          double) -> Eigen::VectorXd { return -w; };
}

}  // namespace

const std::vector<std::string>& example_names() {
    static const std::vector<std::string> names{"lq", "solved", "rotation", "zero"};
    return names;
}

Example make_example(const std::string& name, double alpha, int N, double a, double b,
                     const Eigen::VectorXd& A) {
    const FracOrder order(alpha);
    Example ex{name, OcpProblem{}, {}, std::nullopt};
    OcpProblem& p = ex.problem;
    p.grid = Grid(a, b, N);
    const bool unit_interval = a == 0.0 && b == 1.0;

    if (name == "lq") {
        p.d = p.m = 1;
        p.A = vec1(1.0);
        p.L = [](const Eigen::VectorXd& x, const Eigen::VectorXd& v, double) {
            return 0.5 * (x.squaredNorm() + v.squaredNorm());
        };
        p.dL_dx = [](const Eigen::VectorXd& x, const Eigen::VectorXd&, double) -> Eigen::VectorXd {
            return x;
        };
        p.dL_dv = [](const Eigen::VectorXd&, const Eigen::VectorXd& v, double) -> Eigen::VectorXd {
            return v;
        };
        set_sum_constraint(p, 1);
        // Closed form known for the classical order and the default data only.
        if (order.value() == 1.0 && unit_interval && A.size() == 0) {
            ex.exact = [](double t) { return vec1(lq_exact_control(t)); };
        }
    } else if (name == "solved") {
        p.d = p.m = 1;
        p.A = vec1(1.0);
        p.L = [](const Eigen::VectorXd& x, const Eigen::VectorXd& v, double t) {
            return (1.0 - t) * x(0) + 0.5 * v.squaredNorm();
        };
        p.dL_dx = [](const Eigen::VectorXd&, const Eigen::VectorXd&, double t) {
            return vec1(1.0 - t);
        };
        p.dL_dv = [](const Eigen::VectorXd&, const Eigen::VectorXd& v, double) -> Eigen::VectorXd {
            return v;
        };
        set_sum_constraint(p, 1);
        // The control does not depend on A: the adjoint equation does not involve Q.
        if (unit_interval) {
            const double al = order.value();
            ex.exact = [al](double t) { return vec1(solved_example_exact_control(al, t)); };
        }
    } else if (name == "rotation") {
        p.d = p.m = 2;
        p.A = Eigen::Vector2d(1.0, 2.0);
        p.L = [](const Eigen::VectorXd& x, const Eigen::VectorXd& v, double) {
            return 0.5 * (x.squaredNorm() + v.squaredNorm());
        };
        p.dL_dx = [](const Eigen::VectorXd& x, const Eigen::VectorXd&, double) -> Eigen::VectorXd {
            return x;
        };
        p.dL_dv = [](const Eigen::VectorXd&, const Eigen::VectorXd& v, double) -> Eigen::VectorXd {
            return v;
        };
        set_sum_constraint(p, 2);
        ex.symmetry = GroupTriple{rotation_group(1.0), rotation_group(1.0), rotation_group(-1.0)};
    } else if (name == "zero") {
        p.d = p.m = 1;
        p.A = vec1(1.0);
        p.L = [](const Eigen::VectorXd&, const Eigen::VectorXd& v, double) {
            return 0.5 * v.squaredNorm();
        };
        p.dL_dx = [](const Eigen::VectorXd&, const Eigen::VectorXd&, double) { return vec1(0.0); };
        p.dL_dv = [](const Eigen::VectorXd&, const Eigen::VectorXd& v, double) -> Eigen::VectorXd {
            return v;
        };
        p.f = [](const Eigen::VectorXd& x, const Eigen::VectorXd&, double) -> Eigen::VectorXd {
            return 0.0 * x;
        };
        p.df_dx = [](const Eigen::VectorXd&, const Eigen::VectorXd&, double) {
            return Eigen::MatrixXd::Zero(1, 1).eval();
        };
        p.df_dv = [](const Eigen::VectorXd&, const Eigen::VectorXd&, double) {
            return Eigen::MatrixXd::Zero(1, 1).eval();
        };
        p.lipschitz_M = 0.0;
        p.control_update = [](const Eigen::VectorXd&, const Eigen::VectorXd&, double) {
            return vec1(0.0);
        };
        ex.exact = [](double) { return vec1(0.0); };
    } else {
        throw UsageError("unknown example '" + name + "' (expected lq, solved, rotation or zero)");
    }

    if (A.size() != 0) {
        if (A.size() != p.d) {
            throw UsageError("initial state has dimension " + std::to_string(A.size()) +
                             ", example '" + name + "' needs " + std::to_string(p.d));
        }
        p.A = A;
    }
    return ex;
}

SolveRun run_solve(const RunConfig& config) {
    const Example ex = make_example(config.example, config.alpha, config.N, config.a, config.b);
    const DiscreteOcp ocp(ex.problem, FracOrder(config.alpha), config.sweep.inner);
    return SolveRun{ocp.grid(), solve_pontryagin(ocp, config.sweep)};
}

ConvergeRun run_converge(const RunConfig& config) {
    if (config.N_list.size() < 3) {
        throw UsageError("converge: need at least 3 values in the N list");
    }
    {
        const Example probe =
            make_example(config.example, config.alpha, config.N_list.front(), config.a, config.b);
        if (!probe.exact && !config.self_test) {
            throw UnsupportedReferenceError("converge: no exact control known for example '" +
                                            config.example + "' at alpha = " +
                                            format_real(config.alpha) + " on this interval");
        }
    }
    std::vector<int> Ns = config.N_list;
    std::sort(Ns.begin(), Ns.end());
    if (std::adjacent_find(Ns.begin(), Ns.end()) != Ns.end()) {
        throw UsageError("converge: N values must be distinct");
    }

    auto one_case = [&config](int N) {
        const Example ex = make_example(config.example, config.alpha, N, config.a, config.b);
        const DiscreteOcp ocp(ex.problem, FracOrder(config.alpha), config.sweep.inner);
        const PontryaginSolution sol = solve_pontryagin(ocp, config.sweep);
        double err = 0.0;
        if (config.self_test) {
            const TimeSeq& U = sol.U;
            err = max_control_error(
                U, [&](double t) -> Eigen::VectorXd {
                    const int k = static_cast<int>(std::lround((t - ocp.grid().a()) / ocp.grid().h()));
                    return U.at(k);
                },
                ocp.grid());
        } else {
            err = max_control_error(sol.U, ex.exact, ocp.grid());
        }
        return ConvergenceRow{N, ocp.grid().h(), err};
    };

    std::vector<std::future<ConvergenceRow>> jobs;
    jobs.reserve(Ns.size());
    for (int N : Ns) {
        jobs.push_back(std::async(std::launch::async, one_case, N));
    }
    ConvergeRun run;
    for (auto& j : jobs) {
        run.rows.push_back(j.get());
    }
    try {
        run.report = convergence_order(run.rows);
    } catch (const DegenerateDataError& e) {
        run.degenerate_reason = e.what();
    }
    return run;
}

NoetherRun run_noether(const RunConfig& config) {
    Example ex = make_example(config.example, config.alpha, config.N, config.a, config.b);
    if (!ex.symmetry) {
        throw UsageError("noether: example '" + config.example +
                         "' has no registered symmetry; only 'rotation' does");
    }
    if (config.theta.size() != 3) {
        throw UsageError("noether: need three rotation angles");
    }
    ex.symmetry = GroupTriple{rotation_group(config.theta[0]), rotation_group(config.theta[1]),
                              rotation_group(config.theta[2])};

    const DiscreteOcp ocp(ex.problem, FracOrder(config.alpha), config.sweep.inner);
    PontryaginSolution sol = solve_pontryagin(ocp, config.sweep);
    const Grid& grid = ocp.grid();

    TimeSeq G = config.zero_generator ? TimeSeq(grid.N(), ex.problem.d)
                                      : generator_values((*ex.symmetry)[0], sol.Q);
    TimeSeq I = conserved_quantity(ocp.coeffs(), grid, G, sol.P);

    NoetherRun run{grid, std::move(sol), std::move(I)};
    const double I0 = run.invariant.scalar(0);
    for (int k = 0; k <= grid.N(); ++k) {
        run.max_deviation = std::max(run.max_deviation, std::abs(run.invariant.scalar(k) - I0));
        run.max_abs = std::max(run.max_abs, std::abs(run.invariant.scalar(k)));
    }
    run.invariance = invariance_residual(ocp, *ex.symmetry, run.solution, {-1.0, -0.5, 0.5, 1.0});
    return run;
}

std::string format_real(double x) { return fmt::format("{:.17g}", x); }

void write_solve_csv(std::ostream& os, const Grid& grid, const PontryaginSolution& sol) {
    const int m = sol.U.dim();
    const int d = sol.Q.dim();
    os << "k,t";
    for (int i = 1; i <= m; ++i) os << ",u_" << i;
    for (int i = 1; i <= d; ++i) os << ",q_" << i;
    for (int i = 1; i <= d; ++i) os << ",p_" << i;
    os << '\n';
    for (int k = 0; k <= grid.N(); ++k) {
        os << k << ',' << format_real(grid.t(k));
        for (int i = 0; i < m; ++i) os << ',' << format_real(sol.U.at(k)(i));
        for (int i = 0; i < d; ++i) os << ',' << format_real(sol.Q.at(k)(i));
        for (int i = 0; i < d; ++i) os << ',' << format_real(sol.P.at(k)(i));
        os << '\n';
    }
}

void write_converge_csv(std::ostream& os, const ConvergeRun& run) {
    os << "N,h,max_error,pairwise_order\n";
    for (std::size_t i = 0; i < run.rows.size(); ++i) {
        const auto& r = run.rows[i];
        os << r.N << ',' << format_real(r.h) << ',' << format_real(r.max_error) << ',';
        if (i > 0 && run.report) {
            os << format_real(run.report->pairwise_orders[i - 1]);
        }
        os << '\n';
    }
    if (run.report) {
        os << "# fitted_order=" << format_real(run.report->fitted_order) << '\n';
    } else {
        os << "# fitted_order=degenerate\n";
    }
}

void write_noether_csv(std::ostream& os, const Grid& grid, const TimeSeq& invariant) {
    os << "k,t,I_k\n";
    for (int k = 0; k <= grid.N(); ++k) {
        os << k << ',' << format_real(grid.t(k)) << ',' << format_real(invariant.scalar(k))
           << '\n';
    }
}

namespace {

// from_chars keeps subnormals (stod throws on them) and is locale independent.
double parse_real(const std::string& text) {
    double value = 0.0;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ptr != end || (ec != std::errc() && ec != std::errc::result_out_of_range)) {
        throw UsageError("read_csv: not a number: '" + text + "'");
    }
    return value;
}

}  // namespace

CsvTable read_csv(std::istream& is) {
    CsvTable table;
    std::string line;
    bool have_header = false;
    while (std::getline(is, line)) {
        if (line.empty()) {
            continue;
        }
        if (line.front() == '#') {
            table.comments.push_back(line.substr(1));
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) {
            fields.push_back(field);
        }
        if (line.back() == ',') {
            fields.emplace_back();
        }
        if (!have_header) {
            table.header = std::move(fields);
            have_header = true;
            continue;
        }
        if (fields.size() != table.header.size()) {
            throw UsageError("read_csv: row has " + std::to_string(fields.size()) +
                             " fields, header has " + std::to_string(table.header.size()));
        }
        std::vector<double> row;
        row.reserve(fields.size());
        for (const auto& f : fields) {
            row.push_back(f.empty() ? std::numeric_limits<double>::quiet_NaN() : parse_real(f));
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

namespace {

void add_shared_options(CLI::App* cmd, RunConfig& cfg, bool with_n_list) {
    cmd->add_option("--example", cfg.example, "lq | solved | rotation | zero")
        ->check(CLI::IsMember(example_names()));
    cmd->add_option("--alpha", cfg.alpha, "fractional order in (0, 1]");
    if (with_n_list) {
        cmd->add_option("--n-list", cfg.N_list, "comma-separated subinterval counts")
            ->delimiter(',')
            ->required();
    } else {
        cmd->add_option("--n", cfg.N, "number of subintervals");
    }
    cmd->add_option("--a", cfg.a, "interval start");
    cmd->add_option("--b", cfg.b, "interval end");
    cmd->add_option("--out", cfg.out, "output CSV path (standard output when omitted)");
    cmd->add_option("--tol-stat", cfg.sweep.tol_stationarity, "stationarity tolerance");
    cmd->add_option("--tol-control", cfg.sweep.tol_control, "control increment tolerance");
    cmd->add_option("--max-outer", cfg.sweep.max_outer_iters, "maximum number of sweeps");
    cmd->add_option("--relax", cfg.sweep.relaxation_lambda, "relaxation factor in (0, 1]");
    cmd->add_option("--anderson", cfg.sweep.anderson_depth,
                    "Anderson mixing depth (0 = plain relaxed sweep)");
}

// Writes to --out when given, else to `out`. The file is only created once the content is
// complete, so failed runs leave nothing behind.
void emit(const RunConfig& cfg, std::ostream& out, const std::function<void(std::ostream&)>& body) {
    if (cfg.out.empty()) {
        body(out);
        return;
    }
    std::ostringstream buffer;
    body(buffer);
    std::ofstream file(cfg.out, std::ios::binary | std::ios::trunc);
    if (!file) {
        throw UsageError("cannot open output file '" + cfg.out + "'");
    }
    file << buffer.str();
}

// Diagnostics go to stderr when the CSV itself is written to stdout.
std::ostream& diag(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return cfg.out.empty() ? err : out;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Variational integrator for discrete fractional Pontryagin systems", "fracvi"};
    app.require_subcommand(1);

    RunConfig solve_cfg;
    RunConfig converge_cfg;
    RunConfig noether_cfg;
    noether_cfg.example = "rotation";

    auto* solve = app.add_subcommand("solve", "solve one problem and write k,t,u,q,p");
    add_shared_options(solve, solve_cfg, false);

    auto* converge = app.add_subcommand("converge", "control error versus h for a list of N");
    add_shared_options(converge, converge_cfg, true);
    converge->add_flag("--self-test", converge_cfg.self_test,
                       "compare each run with itself (all errors zero)");

    auto* noether = app.add_subcommand("noether", "discrete conserved quantity of the rotation example");
    add_shared_options(noether, noether_cfg, false);
    noether->add_flag("--zero-generator", noether_cfg.zero_generator,
                      "use a zero generator (the quantity is then identically zero)");
    noether->add_option("--theta", noether_cfg.theta, "rotation angles theta1,theta2,theta3")
        ->delimiter(',')
        ->expected(3);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(std::move(reversed));
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return 1;
    }

    try {
        if (*solve) {
            const RunConfig& cfg = solve_cfg;
            const SolveRun run = run_solve(cfg);
            emit(cfg, out, [&](std::ostream& os) { write_solve_csv(os, run.grid, run.solution); });
            diag(cfg, out, err) << "stationarity_residual=" << format_real(run.solution.stationarity_residual)
                                << "\ncost=" << format_real(run.solution.cost)
                                << "\nouter_iters=" << run.solution.outer_iters << '\n';
            return 0;
        }
        if (*converge) {
            const RunConfig& cfg = converge_cfg;
            const ConvergeRun run = run_converge(cfg);
            emit(cfg, out, [&](std::ostream& os) { write_converge_csv(os, run); });
            if (!run.report) {
                err << "degenerate fit: " << run.degenerate_reason << '\n';
                return 3;
            }
            diag(cfg, out, err) << "fitted_order=" << format_real(run.report->fitted_order) << '\n';
            return 0;
        }
        const RunConfig& cfg = noether_cfg;
        const NoetherRun run = run_noether(cfg);
        emit(cfg, out, [&](std::ostream& os) { write_noether_csv(os, run.grid, run.invariant); });
        diag(cfg, out, err) << "max_deviation=" << format_real(run.max_deviation)
                            << "\nmax_abs=" << format_real(run.max_abs)
                            << "\ninvariance_residual=" << format_real(run.invariance)
                            << "\nouter_iters=" << run.solution.outer_iters << '\n';
        return 0;
    } catch (const NonConvergenceError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const ControlUpdateError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace fracvi
