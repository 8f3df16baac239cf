#pragma once

#include "reflev/config.hpp"

namespace reflev {

// Dispatches a resolved config and writes the report. Exit codes: 0 success,
// 1 usage/config error, 2 numerical error, 3 statistical-gate failure.
int run(const RunConfig& config);

// Flag/file parsing front end for the CLI binary; flags override file values.
int run_cli(int argc, char** argv);

}  // namespace reflev
