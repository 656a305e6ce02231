#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fracvi/harness.hpp"

using namespace fracvi;
namespace fs = std::filesystem;

namespace {

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli_main(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path temp_file(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "fracvi_harness_test";
    fs::create_directories(dir);
    const fs::path p = dir / name;
    fs::remove(p);
    return p;
}

CsvTable read_file(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    return read_csv(in);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST_CASE("example registry") {
    CHECK(example_names().size() == 4);
    for (const auto& name : example_names()) {
        const Example ex = make_example(name, 0.5, 10);
        CHECK(ex.name == name);
        CHECK(ex.problem.A.size() == ex.problem.d);
    }
    CHECK(make_example("rotation", 0.5, 10).problem.A == Eigen::Vector2d(1.0, 2.0));
    CHECK(make_example("rotation", 0.5, 10).symmetry.has_value());
    CHECK_FALSE(make_example("lq", 0.5, 10).symmetry.has_value());
    CHECK(make_example("lq", 1.0, 10).exact);
    CHECK_FALSE(make_example("lq", 0.5, 10).exact);
    CHECK_FALSE(make_example("lq", 1.0, 10, 0.0, 2.0).exact);
    CHECK(make_example("solved", 0.25, 10).exact);
    CHECK(make_example("lq", 1.0, 10, 0.0, 1.0, Eigen::VectorXd::Constant(1, 3.0)).problem.A(0) == 3.0);
    CHECK_THROWS_AS(make_example("lq", 1.0, 10, 0.0, 1.0, Eigen::Vector2d(1, 1)), UsageError);
    CHECK_THROWS_AS(make_example("pendulum", 1.0, 10), UsageError);
    CHECK_THROWS_AS(make_example("lq", 1.5, 10), DomainError);
}

TEST_CASE("solve: zero example writes zero controls") {
    const fs::path out = temp_file("zero.csv");
    const CliResult r = run({"solve", "--example", "zero", "--alpha", "0.5", "--n", "10", "--out", out.string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("stationarity_residual=") != std::string::npos);
    CHECK(r.out.find("cost=") != std::string::npos);
    CHECK(r.out.find("outer_iters=") != std::string::npos);
    const CsvTable t = read_file(out);
    CHECK(t.header == std::vector<std::string>{"k", "t", "u_1", "q_1", "p_1"});
    REQUIRE(t.rows.size() == 11);
    for (const auto& row : t.rows) CHECK(row[2] == 0.0);
}

TEST_CASE("solve: rotation header has two of everything") {
    const CliResult r = run({"solve", "--example", "rotation", "--n", "20"});
    CHECK(r.code == 0);
    std::istringstream in(r.out);
    const CsvTable t = read_csv(in);
    CHECK(t.header == std::vector<std::string>{"k", "t", "u_1", "u_2", "q_1", "q_2", "p_1", "p_2"});
    CHECK(t.rows.size() == 21);
    CHECK(r.err.find("outer_iters=") != std::string::npos);
}

TEST_CASE("solve: controls close to the closed forms") {
    struct Case {
        std::string example;
        std::string alpha;
        std::function<double(double)> exact;
    };
    const Case cases[] = {
        {"lq", "1", [](double t) { return lq_exact_control(t); }},
        {"solved", "0.25", [](double t) { return solved_example_exact_control(0.25, t); }},
    };
    for (const auto& c : cases) {
        const fs::path out = temp_file(c.example + ".csv");
        const CliResult r = run({"solve", "--example", c.example, "--alpha", c.alpha, "--n", "500", "--out", out.string()});
        REQUIRE(r.code == 0);
        const CsvTable t = read_file(out);
        double worst = 0.0;
        for (std::size_t k = 1; k < t.rows.size(); ++k) {
            worst = std::max(worst, std::abs(t.rows[k][2] - c.exact(t.rows[k][1])));
        }
        CHECK(worst < 20.0 / 500.0);
    }
}

TEST_CASE("converge: order one on both reference problems") {
    const std::vector<std::pair<std::string, std::string>> cases{{"lq", "1"}, {"solved", "0.5"}};
    for (const auto& [example, alpha] : cases) {
        const fs::path out = temp_file("conv_" + example + ".csv");
        const CliResult r = run({"converge", "--example", example, "--alpha", alpha, "--n-list",
                                 "25,50,100,200,400", "--out", out.string()});
        REQUIRE(r.code == 0);
        const CsvTable t = read_file(out);
        CHECK(t.header == std::vector<std::string>{"N", "h", "max_error", "pairwise_order"});
        REQUIRE(t.rows.size() == 5);
        CHECK(std::isnan(t.rows[0][3]));
        REQUIRE(t.comments.size() == 1);
        const std::string key = " fitted_order=";
        REQUIRE(t.comments[0].rfind(key, 0) == 0);
        const double order = std::stod(t.comments[0].substr(key.size()));
        CHECK(order >= 0.8);
        CHECK(order <= 1.2);
    }
}

TEST_CASE("converge: rows are merged in N order") {
    RunConfig cfg;
    cfg.example = "solved";
    cfg.alpha = 0.75;
    cfg.N_list = {80, 20, 40};
    const ConvergeRun run = run_converge(cfg);
    REQUIRE(run.rows.size() == 3);
    CHECK(run.rows[0].N == 20);
    CHECK(run.rows[1].N == 40);
    CHECK(run.rows[2].N == 80);
    CHECK(run.report.has_value());
}

TEST_CASE("converge: refusals and the self-test mode") {
    const CliResult lq = run({"converge", "--example", "lq", "--alpha", "0.5", "--n-list", "10,20,40"});
    CHECK(lq.code == 1);
    CHECK(lq.err.find("no exact control") != std::string::npos);

    RunConfig cfg;
    cfg.example = "lq";
    cfg.alpha = 0.5;
    cfg.N_list = {10, 20, 40};
    CHECK_THROWS_AS(run_converge(cfg), UnsupportedReferenceError);

    CHECK(run({"converge", "--example", "solved", "--n-list", "10,20"}).code == 1);
    CHECK(run({"converge", "--example", "solved", "--n-list", "10,10,20"}).code == 1);

    const CliResult self = run({"converge", "--example", "lq", "--alpha", "0.5", "--n-list", "10,20,40", "--self-test"});
    CHECK(self.code == 3);
    CHECK(self.err.find("degenerate") != std::string::npos);
    std::istringstream in(self.out);
    const CsvTable t = read_csv(in);
    REQUIRE(t.rows.size() == 3);
    for (const auto& row : t.rows) CHECK(row[2] == 0.0);
}

TEST_CASE("noether: rotation example conserves a zero quantity") {
    const fs::path out = temp_file("noether.csv");
    const CliResult r = run({"noether", "--example", "rotation", "--alpha", "0.75", "--n", "100", "--out", out.string()});
    REQUIRE(r.code == 0);
    const CsvTable t = read_file(out);
    CHECK(t.header == std::vector<std::string>{"k", "t", "I_k"});
    REQUIRE(t.rows.size() == 101);

    RunConfig cfg;
    cfg.example = "rotation";
    cfg.alpha = 0.75;
    cfg.N = 100;
    const NoetherRun run_ = run_noether(cfg);
    const double scale = 1.0 + run_.solution.P.max_abs() * run_.solution.Q.max_abs();
    for (const auto& row : t.rows) CHECK(std::abs(row[2]) <= 1e-8 * scale);
    CHECK(r.out.find("max_deviation=") != std::string::npos);
    CHECK(r.out.find("max_abs=") != std::string::npos);
}

TEST_CASE("noether: flags and refusals") {
    const CliResult zero = run({"noether", "--alpha", "1", "--n", "30", "--zero-generator"});
    REQUIRE(zero.code == 0);
    std::istringstream in(zero.out);
    for (const auto& row : read_csv(in).rows) CHECK(row[2] == 0.0);

    const CliResult lq = run({"noether", "--example", "lq", "--n", "30"});
    CHECK(lq.code == 1);
    CHECK(lq.err.find("symmetry") != std::string::npos);
}

TEST_CASE("bad usage and solver failure") {
    CHECK(run({}).code == 1);
    CHECK(run({"solve", "--example", "pendulum"}).code == 1);
    CHECK(run({"solve", "--alpha", "1.5"}).code == 1);
    CHECK(run({"solve", "--relax", "0"}).code == 1);
    CHECK(run({"solve", "--n", "1"}).code == 1);  // 2 h M = 2
    CHECK(run({"frobnicate"}).code == 1);
    CHECK(run({"--help"}).code == 0);

    const fs::path out = temp_file("fail.csv");
    const CliResult r = run({"solve", "--example", "lq", "--alpha", "0.5", "--n", "50", "--max-outer", "2",
                             "--out", out.string()});
    CHECK(r.code == 2);
    CHECK_FALSE(fs::exists(out));
}

TEST_CASE("CSV round trip is bit exact") {
    RunConfig cfg;
    cfg.example = "rotation";
    cfg.alpha = 0.5;
    cfg.N = 40;
    const SolveRun s = run_solve(cfg);
    std::ostringstream os;
    write_solve_csv(os, s.grid, s.solution);
    std::istringstream is(os.str());
    const CsvTable t = read_csv(is);
    REQUIRE(t.rows.size() == 41);
    for (int k = 0; k <= 40; ++k) {
        const auto& row = t.rows[static_cast<std::size_t>(k)];
        CHECK(row[1] == s.grid.t(k));
        for (int i = 0; i < 2; ++i) {
            CHECK(row[2 + i] == s.solution.U.at(k)(i));
            CHECK(row[4 + i] == s.solution.Q.at(k)(i));
            CHECK(row[6 + i] == s.solution.P.at(k)(i));
        }
    }
    for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 5e-324}) {
        std::istringstream in("v\n" + format_real(x) + "\n");
        CHECK(read_csv(in).rows.at(0).at(0) == x);
    }
}

TEST_CASE("identical configs give identical files") {
    const std::vector<std::vector<std::string>> commands{
        {"solve", "--example", "solved", "--alpha", "0.25", "--n", "60"},
        {"converge", "--example", "solved", "--alpha", "0.5", "--n-list", "20,40,80"},
        {"noether", "--alpha", "0.5", "--n", "50"},
    };
    for (const auto& cmd : commands) {
        const fs::path a = temp_file("det_a.csv");
        const fs::path b = temp_file("det_b.csv");
        auto with_out = [&](const fs::path& p) {
            auto c = cmd;
            c.push_back("--out");
            c.push_back(p.string());
            return c;
        };
        REQUIRE(run(with_out(a)).code == 0);
        REQUIRE(run(with_out(b)).code == 0);
        CHECK(slurp(a) == slurp(b));
        CHECK(slurp(a).find('\r') == std::string::npos);
    }
}

TEST_CASE("read_csv rejects ragged rows and junk") {
    std::istringstream in("a,b\n1,2\n3\n");
    CHECK_THROWS_AS(read_csv(in), UsageError);
    std::istringstream junk("a\n1.5x\n");
    CHECK_THROWS_AS(read_csv(junk), UsageError);
}

#ifdef FRACVI_CLI_PATH
TEST_CASE("installed command line tool") {
    const fs::path out = temp_file("binary.csv");
    const std::string cmd = std::string("\"") + FRACVI_CLI_PATH + "\" solve --example lq --n 50 --out \"" +
                            out.string() + "\" > /dev/null";
    CHECK(std::system(cmd.c_str()) == 0);
    CHECK(read_file(out).rows.size() == 51);
    const std::string bad = std::string("\"") + FRACVI_CLI_PATH + "\" noether --example lq 2> /dev/null";
    CHECK(std::system(bad.c_str()) != 0);
}
#endif
