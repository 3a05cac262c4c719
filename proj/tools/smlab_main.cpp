#include <cstdlib>
#include <string>

#include "CLI11.hpp"

#include "smlab/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"exact covering numbers, submeasure classification, and "
                 "concentration experiments on finite set algebras"};
    app.require_subcommand(0, 1);

    smlab::cli::RunConfig cfg;
    bool list = false;
    app.add_flag("--list", list, "list subcommands and exit");

    std::vector<CLI::App*> subs;
    for (const auto& name : smlab::cli::subcommands()) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--input", cfg.input_path, "input JSON document");
        sub->add_option("--out", cfg.out_dir, "output directory");
        sub->add_option("--format", cfg.format, "report format: json or csv")
            ->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--seed", cfg.seed, "64-bit experiment seed")
            ->each([&cfg](const std::string&) { cfg.seed_set = true; });
        sub->add_option("--trials", cfg.trials, "trial count override");
        sub->add_option("--xi-grid", cfg.xi_grid, "comma-separated exact thresholds");
        sub->add_option("--epsilon", cfg.epsilon, "enlargement radius (exact)");
        sub->add_option("--depth", cfg.depth, "truncation depth");
        sub->add_option("--max-atoms", cfg.max_atoms, "atom cap for exhaustive routines");
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : smlab::cli::kExitValidation;
    }

    if (list) {
        for (const auto& s : smlab::cli::subcommands()) std::printf("%s\n", s.c_str());
        return 0;
    }
    if (app.get_subcommands().empty()) {
        std::printf("%s\n", app.help().c_str());
        return smlab::cli::kExitValidation;
    }
    cfg.subcommand = app.get_subcommands().front()->get_name();

    cfg.threads = 1;
    if (const char* env = std::getenv("SUBMEASURE_LAB_THREADS")) {
        int t = std::atoi(env);
        if (t >= 1) cfg.threads = t;
    }
    return smlab::cli::run(cfg);
}
