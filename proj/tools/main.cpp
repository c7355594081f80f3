#include "segregate/cli.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"segregate: 1D strong-segregation and van der Waals laboratory"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out_dir = "out";
    int workers = 1;
    std::uint64_t seed = 0;
    app.add_option("--config", config_path, "key=value configuration file")
        ->configurable(false);
    app.add_option("--out", out_dir, "output directory (overridden by SEGREGATE_OUT)");
    app.add_option("--workers", workers, "concurrent sweep points")->check(CLI::Range(1, 256));
    app.add_option("--seed", seed, "random seed for multi-start and random inits");

    for (const char* name : {"eos", "envelope", "minimize", "gamma", "elastic-check", "exponent"})
        app.add_subcommand(name);

    CLI11_PARSE(app, argc, argv);

    seg::cli::RunContext ctx;
    ctx.workers = workers;
    ctx.seed = seed;
    if (const char* env = std::getenv("SEGREGATE_OUT"))
        ctx.out = env;
    else
        ctx.out = out_dir;

    try {
        if (!config_path.empty()) ctx.cfg = seg::Config::parse_file(config_path);
        seg::cli::dispatch(app.get_subcommands().front()->get_name(), ctx);
    } catch (const seg::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
