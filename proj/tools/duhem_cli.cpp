// duhem: simulate, analyze, plot and verify Duhem hysteresis models.

#include "duhem/cli/commands.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

using duhem::cli::CommandResult;

struct Args {
    std::string config;
    std::string output;
    std::optional<double> h;
    std::optional<double> tol;
    std::optional<std::size_t> max_iter;
    std::string suite;
    std::string model = "cubic-default";
    std::string params;
    std::optional<double> seed_upsilon;
};

void add_common(CLI::App* sub, Args& a, bool config_required) {
    auto* c = sub->add_option("--config", a.config, "run configuration (JSON)");
    if (config_required) c->required();
    sub->add_option("--output", a.output, "output file, - for stdout (default: config outputs entry, else stdout)");
    sub->add_option("--h", a.h, "integration step in input units");
    sub->add_option("--tol", a.tol, "accommodation tolerance");
    sub->add_option("--max-iter", a.max_iter, "maximum accommodation cycles");
}

int emit(const CommandResult& r, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << r.output;
    } else {
        std::ofstream out(path, std::ios::binary);
        if (!out) {
            std::cerr << "error: cannot write " << path << '\n';
            return duhem::cli::exit_config;
        }
        out << r.output;
    }
    if (!r.message.empty()) std::cerr << r.message << '\n';
    return r.exit_code;
}

std::string output_path(const Args& a, const std::optional<std::string>& from_config) {
    if (!a.output.empty()) return a.output;
    return from_config.value_or("");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Duhem hysteresis operator toolkit"};
    app.set_help_flag("--help", "print this help message and exit");
    app.require_subcommand(1);
    Args a;

    auto* sim = app.add_subcommand("simulate", "integrate the model and write a CSV trajectory");
    add_common(sim, a, true);
    auto* ana = app.add_subcommand("analyze", "accommodation, condition checks and loop class as JSON");
    add_common(ana, a, true);
    auto* plot = app.add_subcommand("plot", "phase plot as SVG");
    add_common(plot, a, true);
    auto* ver = app.add_subcommand("verify", "run property suites; exit 0 iff all pass");
    add_common(ver, a, false);
    ver->add_option("suite,--suite", a.suite, "suite id (lemma1..lemma6, prop1..prop3, cor1, wellposed, all)");
    ver->add_option("--model", a.model, "builtin model: cubic-default, cubic-negated, multiloop, boucwen");
    ver->add_option("--params", a.params, "Bouc-Wen parameters alpha,beta,zeta,n");
    ver->add_option("--seed-upsilon", a.seed_upsilon, "seed input value for lemma6 and prop3");

    CLI11_PARSE(app, argc, argv);

    using namespace duhem;
    try {
        const cli::Overrides ov{a.h, a.tol, a.max_iter};
        if (*ver) {
            if (a.suite.empty()) a.suite = "all";
            auto target = a.config.empty() ? cli::builtin_target(a.model, a.params)
                                           : cli::target_from_config(io::load_config(a.config));
            if (a.seed_upsilon) target.seed_upsilon = *a.seed_upsilon;
            return emit(cli::cmd_verify(a.suite, target), a.output);
        }
        const auto cfg = cli::apply(io::load_config(a.config), ov);
        if (*sim) return emit(cli::cmd_simulate(cfg), output_path(a, cfg.outputs.csv));
        if (*ana) return emit(cli::cmd_analyze(cfg), output_path(a, cfg.outputs.json));
        if (*plot) return emit(cli::cmd_plot(cfg), output_path(a, cfg.outputs.svg));
    } catch (const io::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return cli::exit_config;
    } catch (const InvalidArgument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return cli::exit_config;
    } catch (const NonFiniteState& e) {
        std::cerr << "divergence: " << e.what() << '\n';
        return cli::exit_divergence;
    }
    return 0;
}
