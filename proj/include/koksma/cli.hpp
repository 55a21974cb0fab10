#pragma once

// Command-line front end: every module behind one binary, seeded reproducible
// runs, machine-readable JSON reports ("schema": "koksma/1").
//
// Exit codes: 0 success, 2 validation or usage error, 3 budget exhaustion,
// 4 falsified theorem inequality.

#include <string>
#include <vector>

namespace koksma {

// argv-style arguments without the program name.
int run_cli(const std::vector<std::string>& args);

}  // namespace koksma
