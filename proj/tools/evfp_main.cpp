// Command-line front end: simulate | classify | sweep | fit-blowup.
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "evfp/harness.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Homogeneous isotropic Einstein-Vlasov-Fokker-Planck simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string csv_path;
    bool resolve = false;
    int jobs = 1;

    auto* sim = app.add_subcommand("simulate", "run the coupled system and write outputs");
    sim->add_option("--config", config_path, "INI config file")->required();

    auto* cls = app.add_subcommand("classify", "closed-form regime classification of the data");
    cls->add_option("--config", config_path, "INI config file")->required();

    auto* swp = app.add_subcommand("sweep", "grid sweep over (phi0, sigma)");
    swp->add_option("--config", config_path, "INI config file with a [sweep] section")->required();
    swp->add_flag("--resolve", resolve, "simulate each cell and record the outcome");
    swp->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

    auto* fit = app.add_subcommand("fit-blowup", "blow-up fit of an existing timeseries.csv");
    fit->add_option("csv", csv_path, "timeseries.csv path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(sim))
            return evfp::cmd_simulate(evfp::load_config_file(config_path), std::cout);
        if (app.got_subcommand(cls))
            return evfp::cmd_classify(evfp::load_config_file(config_path), std::cout);
        if (app.got_subcommand(swp))
            return evfp::cmd_sweep(evfp::load_config_file(config_path), resolve, jobs, std::cout);
        if (app.got_subcommand(fit))
            return evfp::cmd_fit_blowup(csv_path, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
