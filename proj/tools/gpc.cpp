// Command-line front end. Talks to the library only through gpc.h.

#include "gpc.h"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

namespace {

struct ProblemDeleter {
    void operator()(gpc_problem* p) const { gpc_problem_free(p); }
};
struct RunDeleter {
    void operator()(gpc_run* r) const { gpc_run_free(r); }
};
using ProblemPtr = std::unique_ptr<gpc_problem, ProblemDeleter>;
using RunPtr = std::unique_ptr<gpc_run, RunDeleter>;

// Flags shared by every subcommand; each one mirrors a problem-file field.
struct Common {
    std::string file;
    std::string run_root;
    std::vector<std::string> sets;  // key=value
    std::string seed;
    std::string samples;
    bool quiet = false;
};

int report_failure(gpc_status st) {
    std::cerr << "gpc: " << gpc_status_name(st) << ": " << gpc_last_error() << "\n";
    return gpc_exit_code(st);
}

// Parses the file and applies overrides in order: explicit flags, then the
// generic --set pairs.
gpc_status load(const Common& c, const std::vector<std::pair<std::string, std::string>>& flags, ProblemPtr& out) {
    gpc_problem* raw = nullptr;
    gpc_status st = gpc_problem_parse_file(c.file.c_str(), &raw);
    out.reset(raw);
    if (st != GPC_OK) return st;
    std::vector<std::pair<std::string, std::string>> all = flags;
    if (!c.seed.empty()) all.emplace_back("seed", c.seed);
    if (!c.samples.empty()) all.emplace_back("mc.samples", c.samples);
    for (const auto& kv : c.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) {
            std::cerr << "gpc: --set expects key=value, got '" << kv << "'\n";
            return GPC_VALIDATION_ERROR;
        }
        all.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
    }
    for (const auto& [k, v] : all) {
        st = gpc_problem_set(out.get(), k.c_str(), v.c_str());
        if (st != GPC_OK) return st;
    }
    return GPC_OK;
}

int execute(const Common& c, const std::vector<std::pair<std::string, std::string>>& flags) {
    ProblemPtr problem;
    gpc_status st = load(c, flags, problem);
    if (st != GPC_OK) {
        if (st == GPC_VALIDATION_ERROR && gpc_last_error()[0] == '\0') return 4;  // bad --set, already reported
        return report_failure(st);
    }
    gpc_run* raw = nullptr;
    st = gpc_run_problem(problem.get(), c.run_root.empty() ? nullptr : c.run_root.c_str(), &raw);
    RunPtr run(raw);
    if (st != GPC_OK) return report_failure(st);
    const int code = gpc_run_exit_code(run.get());
    if (!c.quiet) std::cout << gpc_run_report(run.get());
    std::cerr << "run directory: " << gpc_run_directory(run.get()) << (gpc_run_reused(run.get()) ? " (existing)" : "")
              << "\n";
    if (code == 2) std::cerr << "gpc: solver did not reach the residual tolerance\n";
    if (code == 1) std::cerr << "gpc: at least one check failed\n";
    return code;
}

void add_common(CLI::App* app, Common& c) {
    app->add_option("problem", c.file, "Problem file (JSON, schema 1)")->required()->check(CLI::ExistingFile);
    app->add_option("--run-root", c.run_root, "Directory for run records (default $GPC_RUN_ROOT or ./runs)");
    app->add_option("--seed", c.seed, "Override the problem seed");
    app->add_option("--samples", c.samples, "Override mc.samples");
    app->add_option("--set", c.sets, "Override any field: key=value with a dotted key and a JSON value");
    app->add_flag("-q,--quiet", c.quiet, "Do not print the report");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gaussian Minkowski problems on C-pseudo-cones"};
    app.set_version_flag("--version", std::string(gpc_version()));
    app.require_subcommand(1);

    Common solve_c;
    std::string kind;
    std::string method;
    std::string tol;
    std::string max_iters;
    bool unnormalized = false;
    auto* solve = app.add_subcommand("solve", "Solve the normalized Gaussian or the log-Minkowski problem");
    add_common(solve, solve_c);
    solve->add_option("--kind", kind, "surface or log (default: the file's problem)")
        ->check(CLI::IsMember({"surface", "log"}));
    solve->add_option("--method", method, "gradient or fixed_point")->check(CLI::IsMember({"gradient", "fixed_point"}));
    solve->add_option("--tol", tol, "Residual tolerance");
    solve->add_option("--max-iters", max_iters, "Iteration cap");
    solve->add_flag("--unnormalized", unnormalized, "Fail on weights no single-facet shape can carry");

    Common measure_c;
    auto* measure = app.add_subcommand("measure", "Gaussian volume, covolume and measures of shape.h");
    add_common(measure, measure_c);

    Common verify_c;
    std::string t;
    auto* verify = app.add_subcommand("verify", "Variational formulas and inequalities for shape.h (and h_other)");
    add_common(verify, verify_c);
    verify->add_option("--t", t, "Interpolation parameter for the Ehrhard checks");

    Common cex_c;
    std::string cex_kind;
    std::string rho;
    auto* cex = app.add_subcommand("counterexample", "Two distinct shapes with the same single-direction measure");
    add_common(cex, cex_c);
    cex->add_option("--kind", cex_kind, "surface or cone")->check(CLI::IsMember({"surface", "cone"}));
    cex->add_option("--rho", rho, "Level offset below the peak");

    std::string scan_file;
    std::string out_path;
    double t_min = 0.0;
    double t_max = 0.0;
    int count = 0;
    std::string scan_seed;
    std::string scan_samples;
    auto* scan = app.add_subcommand("scan", "CSV of g, h, S and C along single-facet shapes");
    scan->add_option("problem", scan_file, "Problem file providing the cone and b")->required()->check(CLI::ExistingFile);
    scan->add_option("--t-min", t_min, "Smallest t");
    scan->add_option("--t-max", t_max, "Largest t");
    scan->add_option("--count", count, "Number of log-spaced points");
    scan->add_option("--seed", scan_seed, "Override the problem seed");
    scan->add_option("--samples", scan_samples, "Override mc.samples");
    scan->add_option("-o,--output", out_path, "Write the CSV here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Help and version exit 0; usage errors count as invalid input.
        return app.exit(e) == 0 ? 0 : 4;
    }

    if (solve->parsed()) {
        std::vector<std::pair<std::string, std::string>> flags;
        if (!kind.empty()) flags.emplace_back("problem", kind);
        if (!method.empty()) flags.emplace_back("solver.method", method);
        if (!tol.empty()) flags.emplace_back("solver.tol_residual", tol);
        if (!max_iters.empty()) flags.emplace_back("solver.max_iters", max_iters);
        if (unnormalized) flags.emplace_back("solver.normalized", "false");
        ProblemPtr probe;
        // The file must already describe a solve unless --kind says which one.
        if (kind.empty()) {
            gpc_problem* raw = nullptr;
            const gpc_status st = gpc_problem_parse_file(solve_c.file.c_str(), &raw);
            probe.reset(raw);
            if (st != GPC_OK) return report_failure(st);
            const std::string task = gpc_problem_task(probe.get());
            if (task != "surface" && task != "log") {
                std::cerr << "gpc: problem '" << task << "' is not a solve; pass --kind surface|log\n";
                return 4;
            }
        }
        return execute(solve_c, flags);
    }
    if (measure->parsed()) return execute(measure_c, {{"problem", "measure"}});
    if (verify->parsed()) {
        std::vector<std::pair<std::string, std::string>> flags{{"problem", "verify"}};
        if (!t.empty()) flags.emplace_back("verify.t", t);
        return execute(verify_c, flags);
    }
    if (cex->parsed()) {
        std::vector<std::pair<std::string, std::string>> flags{{"problem", "counterexample"}};
        if (!cex_kind.empty()) flags.emplace_back("counterexample.kind", cex_kind);
        if (!rho.empty()) flags.emplace_back("counterexample.rho", rho);
        return execute(cex_c, flags);
    }

    // scan
    Common sc;
    sc.file = scan_file;
    sc.seed = scan_seed;
    sc.samples = scan_samples;
    ProblemPtr problem;
    gpc_status st = load(sc, {}, problem);
    if (st != GPC_OK) return report_failure(st);
    char* csv = nullptr;
    st = gpc_scan_csv(problem.get(), nullptr, t_min, t_max, count, &csv);
    if (st != GPC_OK) return report_failure(st);
    const std::string text(csv);
    gpc_string_free(csv);
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream os(out_path, std::ios::binary);
        os << text;
        if (!os) {
            std::cerr << "gpc: cannot write " << out_path << "\n";
            return 1;
        }
    }
    return 0;
}
