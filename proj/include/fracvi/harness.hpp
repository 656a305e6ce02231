#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fracvi/noether.hpp"
#include "fracvi/pontryagin.hpp"
#include "fracvi/reference.hpp"

namespace fracvi {

/// Requested convergence study has no closed-form control to compare against.
class UnsupportedReferenceError : public UsageError {
public:
    using UsageError::UsageError;
};

/// A built-in problem. `exact` is empty when no closed-form control is known for the chosen
/// order and interval; `symmetry` is set for problems with a registered invariance.
struct Example {
    std::string name;
    OcpProblem problem;
    std::function<Eigen::VectorXd(double)> exact;
    std::optional<GroupTriple> symmetry;
};

/// Names accepted by make_example.
const std::vector<std::string>& example_names();

/// Built-in problems:
///   lq       L = (x^2 + v^2)/2,            f = x + v, d = m = 1, A = 1
///   solved   L = (1 - t) x + v^2/2,        f = x + v, d = m = 1, A = 1
///   rotation L = (|x|^2 + |v|^2)/2,        f = x + v, d = m = 2, A = (1, 2)
///   zero     L = v^2/2,                    f = 0 x,   d = m = 1, A = 1
/// `A` overrides the default initial state when non-empty.
Example make_example(const std::string& name, double alpha, int N, double a = 0.0, double b = 1.0,
                     const Eigen::VectorXd& A = {});

struct RunConfig {
    std::string example = "lq";
    double alpha = 1.0;
    int N = 100;
    std::vector<int> N_list;
    double a = 0.0;
    double b = 1.0;
    SweepOpts sweep;
    std::string out;
    bool zero_generator = false;  ///< noether: use G = 0 instead of the symmetry generator
    bool self_test = false;       ///< converge: compare each run against itself
    std::vector<double> theta{1.0, 1.0, -1.0};  ///< rotation angles of the three groups
};

struct SolveRun {
    Grid grid;
    PontryaginSolution solution;
};

SolveRun run_solve(const RunConfig& config);

struct ConvergeRun {
    std::vector<ConvergenceRow> rows;        ///< N ascending
    std::optional<ConvergenceReport> report; ///< empty when the fit is degenerate
    std::string degenerate_reason;
};

/// Independent N-cases run concurrently; results are merged in N order.
ConvergeRun run_converge(const RunConfig& config);

struct NoetherRun {
    Grid grid;
    PontryaginSolution solution;
    TimeSeq invariant;            ///< I_k, k = 0..N
    double max_deviation = 0.0;   ///< max_k |I_k - I_0|
    double max_abs = 0.0;         ///< max_k |I_k|
    double invariance = 0.0;      ///< invariance residual on s in {-1, -0.5, 0.5, 1}
};

NoetherRun run_noether(const RunConfig& config);

/// "%.17g": re-parses to the same double.
std::string format_real(double x);

void write_solve_csv(std::ostream& os, const Grid& grid, const PontryaginSolution& sol);
void write_converge_csv(std::ostream& os, const ConvergeRun& run);
void write_noether_csv(std::ostream& os, const Grid& grid, const TimeSeq& invariant);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;  ///< empty fields read as NaN
    std::vector<std::string> comments;      ///< lines starting with '#', without the '#'
};

CsvTable read_csv(std::istream& is);

/// Command-line entry point: subcommands solve, converge, noether. Returns the exit code:
/// 0 success, 1 bad usage or unsupported request, 2 solver failure, 3 degenerate fit.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fracvi
