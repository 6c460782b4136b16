#ifndef DETSHOCK_COMMANDS_HPP_
#define DETSHOCK_COMMANDS_HPP_

#include <ostream>
#include <string>
#include <vector>

namespace detshock {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitSolver = 2, kExitVerify = 3 };

struct CommandOptions {
  std::string config_path;
  std::string out_dir;  // overrides out_dir from the config when non-empty
  std::vector<std::string> overrides;
};

// Each command reports progress on `log`, errors on `err` and returns an
// ExitCode. Configuration problems never reach the solver.
int cmd_polar(const CommandOptions& opt, std::ostream& log, std::ostream& err);
int cmd_solve(const CommandOptions& opt, std::ostream& log, std::ostream& err);
int cmd_verify(const CommandOptions& opt, std::ostream& log, std::ostream& err);
int cmd_sweep(const CommandOptions& opt, std::ostream& log, std::ostream& err);

// DETSHOCK_THREADS when set and positive, else the hardware concurrency.
int thread_budget();

}  // namespace detshock

#endif  // DETSHOCK_COMMANDS_HPP_
