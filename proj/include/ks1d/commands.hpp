#pragma once

// Command implementations behind the CLI. Exit codes partition the outcome:
//   0 completed / all verdicts / suite passed
//   1 invalid configuration
//   2 blow-up suspected
//   3 step failure (or a sweep cell with no verdict)
//   4 verification threshold missed

#include <string>

namespace ks1d {

int cmd_run(const std::string& config_path, const std::string& output_dir, bool dense);
int cmd_sweep(const std::string& config_path, const std::string& output_dir, int workers);
int cmd_verify(const std::string& suite);

}  // namespace ks1d
