#pragma once

#include "run_config.hpp"

namespace tse::cli {

void cmd_ingest(const RunConfig& config);
void cmd_synth(const RunConfig& config);
void cmd_estimate(const RunConfig& config);
void cmd_sweep_coverage(const RunConfig& config);
void cmd_sweep_wavespeeds(const RunConfig& config);

}  // namespace tse::cli
