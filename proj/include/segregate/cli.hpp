#pragma once

#include "segregate/config.hpp"

#include <cstdint>
#include <filesystem>
#include <string>

namespace seg::cli {

struct RunContext {
    Config cfg;
    std::filesystem::path out = "out";
    std::uint64_t seed = 0;
    int workers = 1;
};

void run_eos(RunContext& ctx);
void run_envelope(RunContext& ctx);
void run_minimize(RunContext& ctx);
void run_gamma(RunContext& ctx);
void run_elastic_check(RunContext& ctx);
void run_exponent(RunContext& ctx);

// Runs the named subcommand; throws ConfigError (exit 2) or numeric errors
// (exit 3) upward to main.
void dispatch(const std::string& sub, RunContext& ctx);

} // namespace seg::cli
