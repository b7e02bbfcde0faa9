#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "oscmc/engine.hpp"

namespace oscmc {

class ReportFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest representation that parses back to the same double.
std::string format_number(double x);

inline constexpr const char* kMetricsHeader =
    "interval,ru_dc_pct,pw_dc_watts,hogs,authorized_link_pct,active_servers,theta_col,theta_cas,theta_vul,"
    "malicious_vms_cum";
inline constexpr const char* kEventsHeader = "interval,kind,attacker_vm,victim_vm,servers";

void write_metrics_csv(std::ostream& out, const RunLog& log);
void write_events_csv(std::ostream& out, const RunLog& log);
void write_summary(std::ostream& out, const RunLog& log);
void write_clusters_csv(std::ostream& out, const RunLog& log);

/// Writes metrics.csv, events.csv, clusters.csv and summary.txt into `dir`, creating it.
void write_run(const std::filesystem::path& dir, const RunLog& log);

/// One parsed metrics.csv row, in the units written (RU as a percentage).
struct MetricsRow {
  int interval = 0;
  double ru_dc_pct = 0.0;
  double pw_dc_watts = 0.0;
  int hogs = 0;
  double authorized_link_pct = 0.0;
  int active_servers = 0;
  int theta_col = 0;
  int theta_cas = 0;
  int theta_vul = 0;
  int malicious_vms_cum = 0;

  friend bool operator==(const MetricsRow&, const MetricsRow&) = default;
};

std::vector<MetricsRow> read_metrics_csv(std::istream& in);
std::vector<MetricsRow> read_metrics_csv(const std::filesystem::path& path);

struct EventRow {
  int interval = 0;
  std::string kind;  // col, cas, vul
  std::string attacker_vm;
  std::string victim_vm;
  std::string servers;

  friend bool operator==(const EventRow&, const EventRow&) = default;
};

std::vector<EventRow> read_events_csv(std::istream& in);

}  // namespace oscmc
