#include "oscmc/metrics.hpp"

#include <stdexcept>

namespace oscmc {

ServerUtilization ru_server(const Server& server, const Placement& placement) {
  if (!server.active) throw std::domain_error("RU undefined for inactive server");
  const ResourceVector load = placement.load(server.id);
  return {load.cpu / server.capacity.cpu, load.mem / server.capacity.mem, load.bw / server.capacity.bw};
}

double ru_dc(std::span<const Server> servers, const Placement& placement) {
  double sum = 0.0;
  int active = 0;
  for (const Server& s : servers) {
    if (!s.active) continue;
    const auto u = ru_server(s, placement);
    sum += u.cpu + u.mem + u.bw;
    ++active;
  }
  if (active == 0) throw std::domain_error("empty data center");
  return sum / (kMonitoredResources * active);
}

double power_dc(std::span<const Server> servers, const std::map<ServerId, ServerUtilization>& utilization,
                PowerBasis basis) {
  double total = 0.0;
  for (const Server& s : servers) {
    if (!s.active) continue;
    auto it = utilization.find(s.id);
    if (it == utilization.end()) {
      throw std::invalid_argument("power_dc: no utilization for server " + std::to_string(s.id.value));
    }
    const double ru = basis == PowerBasis::CpuOnly ? it->second.cpu : it->second.mean();
    total += (s.power.max - s.power.min) * ru + s.power.idle;
  }
  return total;
}

int count_hogs(const std::map<VmId, double>& observed_bw, const std::map<VmId, double>& predicted_bw,
               double threshold) {
  int hogs = 0;
  for (const auto& [vm, observed] : observed_bw) {
    auto it = predicted_bw.find(vm);
    if (it == predicted_bw.end()) {
      throw std::invalid_argument("count_hogs: no prediction for VM " + std::to_string(vm.value));
    }
    if (observed > it->second * (1.0 + threshold)) ++hogs;
  }
  return hogs;
}

double authorized_link_pct(const LinkSet& links, const Ivcl& ivcl) {
  if (links.empty()) return 100.0;
  std::size_t ok = 0;
  for (const Link& l : links) {
    if (ivcl.is_authorized(l.src, l.dst)) ++ok;
  }
  return 100.0 * static_cast<double>(ok) / static_cast<double>(links.size());
}

}  // namespace oscmc
