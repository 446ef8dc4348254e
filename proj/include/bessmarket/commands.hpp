#pragma once

#include <iosfwd>

#include "bessmarket/errors.hpp"
#include "bessmarket/run_config.hpp"

namespace bessmarket {

/// 0 success, 1 usage/config, 2 data validation, 3 analysis.
int exit_code_for(Errc code);

int cmd_validate(const RunConfig& config, std::ostream& log);
int cmd_fetch(const RunConfig& config, bool verify_only, std::ostream& log);
int cmd_arbitrage(const RunConfig& config, std::ostream& log);
int cmd_reserve(const RunConfig& config, std::ostream& log);
int cmd_sweep(const RunConfig& config, std::ostream& log);
int cmd_report(const RunConfig& config, std::ostream& log);

/// Full argv-level entry point, shared by the binary and in-process tests.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bessmarket
