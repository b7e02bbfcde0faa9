#include "oscmc/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "oscmc/allocator.hpp"
#include "oscmc/engine.hpp"
#include "oscmc/report_io.hpp"
#include "oscmc/workload.hpp"

namespace oscmc {

int cmd_run(const RunConfig& config, std::ostream& out) {
  Scenario sc = load_scenario(config.scenario);
  if (config.seed) sc.seed = *config.seed;
  if (config.intervals) sc.intervals = *config.intervals;
  if (!config.trace.empty()) sc.trace_path = config.trace;
  validate(sc);
  std::vector<Policy> policies = config.policies;
  if (policies.empty()) policies.push_back(Policy::Oscmc);

  // Independent engines; the worker budget goes to policies first.
  const int outer = std::min<int>(config.workers, static_cast<int>(policies.size()));
  const int inner = std::max(1, config.workers / std::max(1, outer));
  std::vector<RunLog> logs(policies.size());
  parallel_for(policies.size(), outer, [&](std::size_t i) { logs[i] = run(sc, policies[i], RunOptions{inner}); });

  for (const RunLog& log : logs) {
    const auto dir = config.out_dir / to_string(log.policy);
    write_run(dir, log);
    out << to_string(log.policy) << ": " << log.intervals.size() << " intervals, final AL% "
        << format_number(log.summary.final_al_pct) << ", suspended " << log.summary.suspended_vms << ", mean hogs "
        << format_number(log.summary.mean_hogs) << " -> " << dir.string() << '\n';
  }
  return kExitOk;
}

namespace {

struct RunStats {
  std::string label;
  std::size_t intervals = 0;
  std::map<std::string, double> values;
};

const std::vector<std::pair<std::string, std::string>> kCompareRows = {
    {"pw_watts_mean", "PW (W, mean)"},     {"energy_kwh", "PW (kWh, total)"}, {"ru_pct_mean", "RU (%)"},
    {"al_pct_final", "AL (%, final)"},     {"al_pct_mean", "AL (%, mean)"},   {"hogs_mean", "hogs (mean)"},
    {"active_servers_mean", "active servers"}};

RunStats load_stats(const std::filesystem::path& dir) {
  RunStats s;
  s.label = dir.filename().string();
  if (s.label.empty()) s.label = dir.parent_path().filename().string();
  std::ifstream summary(dir / "summary.txt");
  for (std::string line; std::getline(summary, line);) {
    if (line.rfind("policy: ", 0) == 0) s.label = line.substr(8);
  }
  const auto rows = read_metrics_csv(dir / "metrics.csv");
  s.intervals = rows.size();
  double pw = 0, ru = 0, al = 0, hogs = 0, act = 0;
  for (const auto& r : rows) {
    pw += r.pw_dc_watts;
    ru += r.ru_dc_pct;
    al += r.authorized_link_pct;
    hogs += r.hogs;
    act += r.active_servers;
  }
  const double n = rows.empty() ? 1.0 : static_cast<double>(rows.size());
  s.values["pw_watts_mean"] = pw / n;
  s.values["energy_kwh"] = pw * (5.0 / 60.0) / 1000.0;
  s.values["ru_pct_mean"] = ru / n;
  s.values["al_pct_final"] = rows.empty() ? 100.0 : rows.back().authorized_link_pct;
  s.values["al_pct_mean"] = al / n;
  s.values["hogs_mean"] = hogs / n;
  s.values["active_servers_mean"] = act / n;
  return s;
}

std::string delta(double base, double x) {
  if (base == x) return "0";
  if (base == 0.0) return "n/a";
  std::ostringstream o;
  o << std::fixed << std::setprecision(2) << 100.0 * (x - base) / std::abs(base);
  return o.str();
}

std::string fixed(double x) {
  std::ostringstream o;
  o << std::fixed << std::setprecision(3) << x;
  return o.str();
}

}  // namespace

int cmd_compare(const std::vector<std::filesystem::path>& runs, bool csv, std::ostream& out) {
  if (runs.size() < 2) throw ConfigError("compare needs at least two run directories");
  std::vector<RunStats> stats;
  for (const auto& r : runs) stats.push_back(load_stats(r));
  for (const auto& s : stats) {
    if (s.intervals != stats.front().intervals) {
      throw ConfigError("interval count mismatch: " + stats.front().label + " has " +
                        std::to_string(stats.front().intervals) + ", " + s.label + " has " +
                        std::to_string(s.intervals));
    }
  }
  std::vector<std::string> header{"metric"};
  for (const auto& s : stats) header.push_back(s.label);
  for (std::size_t i = 1; i < stats.size(); ++i) header.push_back("delta_" + stats[i].label + "_pct");

  std::vector<std::vector<std::string>> table{header};
  for (const auto& [key, name] : kCompareRows) {
    std::vector<std::string> row{csv ? key : name};
    for (const auto& s : stats) row.push_back(csv ? format_number(s.values.at(key)) : fixed(s.values.at(key)));
    for (std::size_t i = 1; i < stats.size(); ++i) {
      row.push_back(delta(stats.front().values.at(key), stats[i].values.at(key)));
    }
    table.push_back(row);
  }
  if (csv) {
    for (const auto& row : table) {
      for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << row[c];
      out << '\n';
    }
    return kExitOk;
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& row : table) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  for (const auto& row : table) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c == 0) {
        out << std::left << std::setw(static_cast<int>(width[c])) << row[c];
      } else {
        out << "  " << std::right << std::setw(static_cast<int>(width[c])) << row[c];
      }
    }
    out << '\n';
  }
  return kExitOk;
}

int cmd_ingest(const std::filesystem::path& trace, const std::optional<std::filesystem::path>& normalized_out,
               std::ostream& out) {
  const TraceSet set = ingest_traces(trace);
  out << "vms: " << set.series.size() << '\n'
      << "rows: " << set.rows << '\n'
      << "dropped: " << set.dropped << '\n'
      << "samples: " << set.samples() << '\n'
      << "resampled: " << set.resampled() << '\n';
  if (normalized_out) {
    std::ofstream f(*normalized_out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + normalized_out->string());
    f << "timestamp,vm_id,cpu_usage_mips,mem_usage_mb,net_bw_used\n";
    for (const auto& [id, series] : set.series) {
      for (std::size_t i = 0; i < series.size(); ++i) {
        f << format_number(static_cast<double>(i) * kTraceCadenceSeconds) << ',' << id << ','
          << format_number(series[i].cpu) << ',' << format_number(series[i].mem) << ','
          << format_number(series[i].bw) << '\n';
      }
    }
  }
  return kExitOk;
}

namespace {

void configure_logging() {
  const char* env = std::getenv("OSCMC_LOG");
  spdlog::set_level(env ? spdlog::level::from_str(env) : spdlog::level::warn);
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  configure_logging();
  CLI::App app{"Secure VM allocation and threat mitigation simulator"};
  app.require_subcommand(1);

  RunConfig run_cfg;
  std::vector<std::string> policy_names;
  std::uint64_t seed = 0;
  int intervals = 0;
  run_cfg.workers = static_cast<int>(std::clamp(std::thread::hardware_concurrency(), 1u, 4u));
  auto* run_cmd = app.add_subcommand("run", "Simulate one or more policies on a scenario");
  run_cmd->add_option("--scenario", run_cfg.scenario, "Scenario file or preset name")->required();
  run_cmd->add_option("--policy", policy_names, "oscmc, pssf or wosc (repeatable)");
  run_cmd->add_option("--trace", run_cfg.trace, "Trace file or directory replacing the synthetic workload");
  auto* seed_opt = run_cmd->add_option("--seed", seed, "Seed override");
  auto* int_opt = run_cmd->add_option("--intervals", intervals, "Interval count override")->check(CLI::PositiveNumber);
  run_cmd->add_option("--out", run_cfg.out_dir, "Output directory");
  run_cmd->add_option("--workers", run_cfg.workers, "Worker threads")->check(CLI::PositiveNumber);

  std::vector<std::filesystem::path> compare_dirs;
  bool compare_csv = false;
  auto* cmp_cmd = app.add_subcommand("compare", "Compare completed run directories");
  cmp_cmd->add_option("runs", compare_dirs, "Run directories (out/<policy>)")->required()->expected(2, -1);
  cmp_cmd->add_flag("--csv", compare_csv, "Comma separated output");

  std::filesystem::path ingest_path;
  std::filesystem::path ingest_out;
  auto* ing_cmd = app.add_subcommand("ingest", "Parse and resample a usage trace");
  ing_cmd->add_option("trace", ingest_path, "Trace file or directory")->required();
  auto* ing_out = ing_cmd->add_option("--out", ingest_out, "Write the resampled series in the documented schema");

  auto* presets_cmd = app.add_subcommand("presets", "List built-in scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o;
    std::ostringstream e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run_cmd) {
      for (const auto& p : policy_names) run_cfg.policies.push_back(parse_policy(p));
      if (*seed_opt) run_cfg.seed = seed;
      if (*int_opt) run_cfg.intervals = intervals;
      return cmd_run(run_cfg, out);
    }
    if (*cmp_cmd) return cmd_compare(compare_dirs, compare_csv, out);
    if (*ing_cmd) {
      std::optional<std::filesystem::path> dest;
      if (*ing_out) dest = ingest_out;
      return cmd_ingest(ingest_path, dest, out);
    }
    if (*presets_cmd) {
      for (const auto& n : preset_names()) out << n << '\n';
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const TraceFormatError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const PlacementInfeasible& e) {
    err << "error: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitUsage;
}

}  // namespace oscmc
