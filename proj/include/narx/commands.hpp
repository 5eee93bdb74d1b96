#pragma once

#include <iosfwd>

#include "narx/config.hpp"

namespace narx {

// Each command validates the whole config first, writes its artifacts under
// cfg.output_dir, logs progress to `log`, and returns the process exit code.
// Errors are reported by throwing narx::Error subclasses.

int cmd_train(const RunConfig& cfg, std::ostream& log);
int cmd_evaluate(const RunConfig& cfg, std::ostream& log);
int cmd_grid_search(const RunConfig& cfg, std::ostream& log);
int cmd_ablation(const RunConfig& cfg, std::ostream& log);
int cmd_robustness(const RunConfig& cfg, std::ostream& log);
int cmd_dump_attention(const RunConfig& cfg, std::ostream& log);
int cmd_grad_check(const RunConfig& cfg, std::ostream& log);
int cmd_synth(const RunConfig& cfg, std::ostream& log);

int run_command(Command command, const RunConfig& cfg, std::ostream& log);

}  // namespace narx
