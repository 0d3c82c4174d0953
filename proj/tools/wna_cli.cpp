// Command-line front end: single-point evaluation, grid sweeps, lemma and
// identity verification, CSV/JSON reports.
//
// Exit codes: 0 all assertions passed, 1 assertion failure, 2 usage/config
// error.  WNA_JOBS in the environment overrides --jobs.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "wna/report.hpp"

namespace {

struct CommonArgs {
    std::string config;
    std::string out;
    std::string format = "csv";
    std::string tol;
    std::string n, r, p, beta;
    int jobs = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config, "key=value config file");
    cmd->add_option("--out", args.out, "output path (default stdout)");
    cmd->add_option("--format", args.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--tol", args.tol, "relative accuracy target");
    cmd->add_option("--jobs", args.jobs, "worker threads (WNA_JOBS overrides)");
    cmd->add_option("-n,--n", args.n, "comma list of tail start indices");
    cmd->add_option("-r,--r", args.r, "comma list of r values, or band:<count>");
    cmd->add_option("-p,--p", args.p, "comma list of exponents; inf allowed");
    cmd->add_option("--beta", args.beta, "constant phase shift");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw wna::ConfigError("cannot open config file '" + path + "'", 0);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// The flags are folded into config text so one parser validates everything;
// later lines override earlier ones.
wna::SweepSpec build_spec(const std::string& default_task, const CommonArgs& args) {
    std::ostringstream text;
    if (!default_task.empty()) text << "task=" << default_task << "\n";
    if (!args.config.empty()) text << read_file(args.config) << "\n";
    if (!args.n.empty()) text << "n=" << args.n << "\n";
    if (!args.r.empty()) text << "r=" << args.r << "\n";
    if (!args.p.empty()) text << "p=" << args.p << "\n";
    if (!args.beta.empty()) text << "beta=" << args.beta << "\n";
    if (!args.tol.empty()) text << "tol=" << args.tol << "\n";
    return wna::parse_config(text.str());
}

int run_and_emit(const wna::SweepSpec& spec, const CommonArgs& args) {
    const auto rows = wna::run_sweep(spec);
    const wna::Format format =
        args.format == "json" ? wna::Format::json : wna::Format::csv;
    const std::string out_path = !args.out.empty() ? args.out : spec.out;
    if (out_path.empty() || out_path == "-") {
        wna::emit(rows, format, std::cout);
    } else {
        wna::emit_to_file(rows, format, out_path);
    }
    return wna::all_assertions_passed(rows) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"worst-case Fourier-sum errors on Weyl-Nagy and Poisson classes"};
    app.require_subcommand(1);

    CommonArgs eval_args, main_args, verify_args, sweep_args, ident_args;
    std::string metric = "C";
    double poisson_q = 0.0;
    std::string formula = "thm1";
    std::string verify_task = "lemma1";

    CLI::App* eval = app.add_subcommand("eval", "compute E_n at given points");
    add_common(eval, eval_args);
    eval->add_option("--metric", metric, "C (uniform) or L (integral)")
        ->check(CLI::IsMember({"C", "L"}));
    eval->add_option("--q", poisson_q, "Poisson decay; switches family");

    CLI::App* mains = app.add_subcommand("main-term", "main terms without E_n");
    add_common(mains, main_args);
    mains->add_option("--formula", formula, "thm1|thm2|thm3|thm4")
        ->check(CLI::IsMember({"thm1", "thm2", "thm3", "thm4"}));

    CLI::App* verify = app.add_subcommand("verify", "lemma and bound verification");
    add_common(verify, verify_args);
    verify->add_option("--task", verify_task, "lemma1|stechkin_sum|identities")
        ->check(CLI::IsMember({"lemma1", "stechkin_sum", "identities"}));

    CLI::App* sweep = app.add_subcommand("sweep", "run a config-driven sweep");
    add_common(sweep, sweep_args);

    CLI::App* identities = app.add_subcommand("identities", "special-function identity report");
    add_common(identities, ident_args);

    try {
        app.parse(argc, argv);

        CommonArgs* args = nullptr;
        std::string default_task;
        if (eval->parsed()) {
            args = &eval_args;
            default_task = metric == "L" ? "evalL" : "evalC";
        } else if (mains->parsed()) {
            args = &main_args;
            default_task = formula;
        } else if (verify->parsed()) {
            args = &verify_args;
            default_task = verify_task;
        } else if (sweep->parsed()) {
            args = &sweep_args;
            if (sweep_args.config.empty()) {
                std::cerr << "sweep: --config is required\n";
                return 2;
            }
        } else {
            args = &ident_args;
            default_task = "identities";
        }

        if (args->jobs >= 1) {
            // env wins when already present
            setenv("WNA_JOBS", std::to_string(args->jobs).c_str(), 0);
        }

        wna::SweepSpec spec = build_spec(default_task, *args);
        if (eval->parsed()) {
            spec.poisson_q = poisson_q;
            if (poisson_q > 0.0 && spec.r_rule.band_samples) {
                spec.r_rule = wna::RRule{false, 0, {0.0}};  // r unused for Poisson
            }
        }
        if (mains->parsed()) spec.mains_only = true;
        return run_and_emit(spec, *args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const wna::ConfigError& e) {
        std::cerr << "config error";
        if (e.line_number > 0) std::cerr << " (line " << e.line_number << ")";
        std::cerr << ": " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
