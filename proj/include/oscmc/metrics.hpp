#pragma once

#include <map>
#include <span>

#include "oscmc/dc_model.hpp"
#include "oscmc/link_monitor.hpp"

namespace oscmc {

inline constexpr int kMonitoredResources = 3;

struct ServerUtilization {
  double cpu = 0.0;
  double mem = 0.0;
  double bw = 0.0;

  [[nodiscard]] double mean() const { return (cpu + mem + bw) / kMonitoredResources; }
};

ServerUtilization ru_server(const Server& server, const Placement& placement);

/// Mean utilization over the three resources and all active servers.
double ru_dc(std::span<const Server> servers, const Placement& placement);

enum class PowerBasis { MeanUtilization, CpuOnly };

/// Linear power model summed over active servers. `utilization` must hold an
/// entry for every active server.
double power_dc(std::span<const Server> servers, const std::map<ServerId, ServerUtilization>& utilization,
                PowerBasis basis = PowerBasis::MeanUtilization);

/// VMs whose observed bandwidth exceeds prediction by more than `threshold`
/// (fractional, 0.5 = 50%).
int count_hogs(const std::map<VmId, double>& observed_bw, const std::map<VmId, double>& predicted_bw,
               double threshold);

/// Percentage of links that the log authorizes; 100 when there are none.
double authorized_link_pct(const LinkSet& links, const Ivcl& ivcl);

struct IntervalMetrics {
  int interval = 0;
  double ru_dc = 0.0;
  std::map<ServerId, ServerUtilization> ru_per_server;
  double pw_dc = 0.0;
  int hog_count = 0;
  double authorized_link_pct = 100.0;
  int theta_col = 0;
  int theta_cas = 0;
  int theta_vul = 0;
  int malicious_links = 0;
  int active_server_count = 0;
  int malicious_vms_cum = 0;
};

}  // namespace oscmc
