#include <iostream>

#include <CLI11.hpp>

#include "spinsense/cli.hpp"
#include "spinsense/estimate.hpp"
#include "spinsense/quadrature.hpp"

namespace sc = spinsense::cli;

namespace {

sc::RunConfig load(const std::string& path, const std::vector<std::string>& sets)
{
    nlohmann::json doc = sc::load_json_file(path);
    for (const auto& s : sets) sc::apply_override(doc, s);
    return sc::parse_config(doc);
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Sensitivity limits for free-electron spin sensing"};
    app.require_subcommand(1);
    app.set_version_flag("--version", sc::kVersion);

    std::string figure_name, out_dir = ".", config_path;
    std::vector<std::string> sets;
    int workers = 0;
    std::uint64_t seed = 0;

    auto* fig = app.add_subcommand("figure", "Regenerate the data behind a figure (or 'all')");
    fig->add_option("name", figure_name, "Figure name")->required();
    fig->add_option("--out", out_dir, "Output directory");
    fig->add_option("--workers", workers, "Worker threads (0 = all)")->check(CLI::NonNegativeNumber);
    auto* fig_seed = fig->add_option("--seed", seed, "Master seed for Monte Carlo columns");

    auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep from a config file");
    sweep->add_option("--config", config_path, "JSON config file")->required();
    sweep->add_option("--set", sets, "Override a config value, key.sub=value");
    auto* sweep_seed = sweep->add_option("--seed", seed, "Master seed for Monte Carlo columns");
    sweep->add_option("--workers", workers, "Worker threads (0 = all)")->check(CLI::NonNegativeNumber);
    auto* sweep_out = sweep->add_option("--out", out_dir, "Output directory");

    auto* report = app.add_subcommand("report", "Single-point report as JSON on stdout");
    report->add_option("--config", config_path, "JSON config file")->required();
    report->add_option("--set", sets, "Override a config value, key.sub=value");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        sc::RunOptions opt;
        opt.workers = workers;
        if (*fig) {
            if (*fig_seed) opt.seed = seed;
            std::vector<std::string> names;
            if (figure_name == "all")
                names = sc::figure_names();
            else
                names.push_back(figure_name);
            for (const auto& n : names)
                for (const auto& out : sc::run_figure(n, opt)) {
                    sc::write_output(out_dir, out);
                    std::cerr << "wrote " << out_dir << "/" << out.name << ".csv\n";
                }
        } else if (*sweep) {
            const sc::RunConfig cfg = load(config_path, sets);
            if (*sweep_seed) opt.seed = seed;
            const std::string dir = *sweep_out ? out_dir : cfg.out_dir;
            const sc::Output out = sc::run_sweep(cfg, opt);
            sc::write_output(dir, out);
            std::cerr << "wrote " << dir << "/" << out.name << ".csv\n";
        } else if (*report) {
            const sc::RunConfig cfg = load(config_path, sets);
            std::cout << sc::run_report(cfg).dump(2) << '\n';
        }
    } catch (const sc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const spinsense::NonConvergence& e) {
        std::cerr << "numerical non-convergence: " << e.what() << '\n';
        return 3;
    } catch (const spinsense::NonUnimodal& e) {
        std::cerr << "numerical non-convergence: " << e.what() << '\n';
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
