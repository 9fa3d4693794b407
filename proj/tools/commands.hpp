#pragma once

#include <string>

namespace fracdiff::cli {

// Process exit codes shared by every command.
enum Exit : int {
    kOk = 0,
    kCheckFailed = 1,
    kBadInput = 2,     // invalid config, unreadable file, unknown suite
    kSolverFailed = 3,
    kOutOfRange = 4,   // scan scales exhausted or oracle argument out of regime
};

struct Options {
    std::string config;
    std::string out;         // overrides the config's output directory
    std::string suite;
    std::string trajectory;  // verify/degiorgi: analyse this file instead of solving
    int threads = 0;         // 0 keeps the config value
};

int cmd_solve(const Options& opt);
int cmd_verify(const Options& opt);
int cmd_degiorgi(const Options& opt);
int cmd_converge(const Options& opt);
int cmd_oracle(const Options& opt);

// Runs `fn` and maps library exceptions onto exit codes.
int guarded(const char* command, int (*fn)(const Options&), const Options& opt);

}  // namespace fracdiff::cli
