#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "oscmc/scenario.hpp"

namespace oscmc {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitConfig = 2,
  kExitInfeasible = 3,
  kExitIo = 4,
};

struct RunConfig {
  std::string scenario;
  std::filesystem::path out_dir = "out";
  std::vector<Policy> policies;
  std::string trace;
  std::optional<std::uint64_t> seed;
  std::optional<int> intervals;
  int workers = 1;
};

int cmd_run(const RunConfig& config, std::ostream& out);

/// Side-by-side table of completed run directories, deltas relative to the
/// first. `csv` switches to comma separated output.
int cmd_compare(const std::vector<std::filesystem::path>& runs, bool csv, std::ostream& out);

int cmd_ingest(const std::filesystem::path& trace, const std::optional<std::filesystem::path>& normalized_out,
               std::ostream& out);

/// Full command line entry point. Errors are reported on `err` and mapped to
/// ExitCode values.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace oscmc
