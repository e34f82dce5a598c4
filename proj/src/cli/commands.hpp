#pragma once

#include "rwalk/cli.hpp"

namespace rwalk::cli {

int cmd_simulate(const RunConfig& cfg);
int cmd_mc(const RunConfig& cfg);
int cmd_flow(const RunConfig& cfg);
int cmd_gap(const RunConfig& cfg);
int cmd_spectrum(const RunConfig& cfg);
int cmd_lyapunov_scan(const RunConfig& cfg);
int cmd_verify_appendix(const RunConfig& cfg);

}  // namespace rwalk::cli
