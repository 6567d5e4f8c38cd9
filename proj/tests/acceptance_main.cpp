// Acceptance gate: runs every criterion, streams one PASS/FAIL line each,
// exits 0 only if all pass. Flags: --fast (reduced budgets), --seed N,
// --workers N, --quiet (no stderr progress). CBS_WORKERS is honored when
// --workers is absent.

#include <cstdlib>
#include <cstring>
#include <iostream>
#include <string>

#include "cbs/acceptance.hpp"

int main(int argc, char** argv) {
    cbs::AcceptanceConfig cfg;
    if (const char* env = std::getenv("CBS_WORKERS")) cfg.workers = std::atoi(env);
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--fast") {
            cfg.fast = true;
        } else if (a == "--quiet") {
            cfg.progress = false;
        } else if (a == "--seed" && i + 1 < argc) {
            cfg.seed = std::strtoull(argv[++i], nullptr, 10);
        } else if (a == "--workers" && i + 1 < argc) {
            cfg.workers = std::atoi(argv[++i]);
        } else {
            std::cerr << "usage: cbs_acceptance [--fast] [--seed N] [--workers N] [--quiet]\n";
            return 2;
        }
    }
    if (cfg.workers < 1) cfg.workers = 1;
    const auto results = cbs::run_acceptance(cfg, std::cout);
    return cbs::all_passed(results) ? 0 : 1;
}
