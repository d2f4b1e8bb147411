#include <cstdio>
#include <cstdlib>
#include <future>
#include <string>
#include <vector>

#include "shapeflow/app.hpp"
#include "shapeflow/errors.hpp"

using namespace shapeflow;

namespace {

constexpr const char* kOutputRootVar = "SHAPEFLOW_OUTPUT_ROOT";

int usage() {
    std::fprintf(stderr,
                 "usage: shapeflow run <config> [<config> ...]\n"
                 "       shapeflow trace <config> --start <coefficient-file>\n"
                 "       shapeflow check <config> [<config> ...]\n"
                 "\n"
                 "run    optimize the configured problem and write its artifacts\n"
                 "trace  sweep the failure/volume trade-off from stored coefficients\n"
                 "check  run the invariant suite on a config without optimizing\n"
                 "\n"
                 "%s, when set, is prepended to every output directory.\n"
                 "exit codes: 0 success, 2 configuration error, 3 numerical failure\n",
                 kOutputRootVar);
    return 2;
}

std::string output_root() {
    const char* root = std::getenv(kOutputRootVar);
    return root ? root : "";
}

/** Exit code for an exception, with the message printed to stderr. */
int report_failure(const std::string& label) {
    try {
        throw;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "%s: config error: %s\n", label.c_str(), e.what());
        return 2;
    } catch (const IoError& e) {
        std::fprintf(stderr, "%s: io error: %s\n", label.c_str(), e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "%s: numerical failure: %s\n", label.c_str(), e.what());
        return 3;
    }
}

void print_mode_line(const char* name, const ModeArtifacts& artifacts) {
    const ObjectiveValue& v = artifacts.final_value;
    std::printf("  %-12s %-16s J=%.6g  (j1=%.6g j2=%.6g j3=%.6g) after %zu records\n", name,
                stop_reason_name(artifacts.result.reason), v.j_lambda, v.j1, v.j2, v.j3,
                artifacts.result.energy.size());
}

int run_one(const std::string& config_path) {
    try {
        const ProblemConfig config = load_config(config_path);
        const RunOutcome outcome = run_problem(config, output_root());
        std::printf("run %s -> %s\n", config_path.c_str(), outcome.directory.c_str());
        if (outcome.descent) print_mode_line("gd", *outcome.descent);
        if (outcome.flow) print_mode_line("hamiltonian", *outcome.flow);
        if (!outcome.error.empty())
            std::fprintf(stderr, "run %s: numerical failure\n%s", config_path.c_str(),
                         outcome.error.c_str());
        return outcome.exit_code;
    } catch (...) {
        return report_failure("run " + config_path);
    }
}

int cmd_run(const std::vector<std::string>& configs) {
    if (configs.empty()) return usage();
    if (configs.size() == 1) return run_one(configs[0]);
    // Batch: isolated output directories, so the runs are independent.
    std::vector<std::future<int>> results;
    results.reserve(configs.size());
    for (const std::string& path : configs)
        results.push_back(std::async(std::launch::async, run_one, path));
    int exit_code = 0;
    for (std::future<int>& r : results) exit_code = std::max(exit_code, r.get());
    return exit_code;
}

int cmd_trace(const std::vector<std::string>& args) {
    std::string config_path, start_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--start") {
            if (i + 1 >= args.size()) return usage();
            start_path = args[++i];
        } else if (config_path.empty()) {
            config_path = args[i];
        } else {
            return usage();
        }
    }
    if (config_path.empty() || start_path.empty()) return usage();
    try {
        const ProblemConfig config = load_config(config_path);
        const TraceOutcome outcome = trace_problem(config, start_path, output_root());
        std::printf("trace %s -> %s\n", config_path.c_str(), outcome.directory.c_str());
        std::size_t converged = 0;
        for (const FrontPoint& p : outcome.front)
            if (p.converged) ++converged;
        std::printf("  %zu weights (%zu converged), %zu points after dominance filtering\n",
                    outcome.front.size(), converged, outcome.filtered.size());
        return 0;
    } catch (...) {
        return report_failure("trace " + config_path);
    }
}

int check_one(const std::string& config_path) {
    try {
        check_problem(load_config(config_path));
        std::printf("check %s: ok\n", config_path.c_str());
        return 0;
    } catch (...) {
        return report_failure("check " + config_path);
    }
}

int cmd_check(const std::vector<std::string>& configs) {
    if (configs.empty()) return usage();
    int exit_code = 0;
    for (const std::string& path : configs) exit_code = std::max(exit_code, check_one(path));
    return exit_code;
}

} // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    if (args.empty()) return usage();
    const std::string command = args[0];
    const std::vector<std::string> rest(args.begin() + 1, args.end());
    if (command == "run") return cmd_run(rest);
    if (command == "trace") return cmd_trace(rest);
    if (command == "check") return cmd_check(rest);
    if (command == "--help" || command == "-h") {
        usage();
        return 0;
    }
    return usage();
}
