#include "oscmc/link_monitor.hpp"

#include <algorithm>

namespace oscmc {

void Ivcl::authorize(VmId src, VmId dst) {
  register_vm(src);
  register_vm(dst);
  authorized_[src].insert(dst);
}

bool Ivcl::is_authorized(VmId src, VmId dst) const {
  auto it = authorized_.find(src);
  return it != authorized_.end() && it->second.contains(dst);
}

const std::set<VmId>& Ivcl::authorized_from(VmId src) const {
  auto it = authorized_.find(src);
  if (it == authorized_.end()) throw UnregisteredVm(src);
  return it->second;
}

std::vector<Vlam> build_vlams(const Placement& placement, std::span<const Server> servers,
                              const LinkSet& links) {
  std::vector<Vlam> vlams;
  vlams.reserve(servers.size());
  std::map<ServerId, std::size_t> slot;
  for (const Server& s : servers) {
    slot[s.id] = vlams.size();
    vlams.push_back(Vlam{s.id, {}});
  }
  for (const Link& l : links) {
    const auto a = placement.server_of(l.src);
    const auto b = placement.server_of(l.dst);
    if (a && slot.contains(*a)) vlams[slot[*a]].links.push_back(l);
    if (b && b != a && slot.contains(*b)) vlams[slot[*b]].links.push_back(l);
  }
  return vlams;
}

LinkSet observed_links(std::span<const Vlam> vlams) {
  LinkSet all;
  for (const Vlam& v : vlams) all.insert(v.links.begin(), v.links.end());
  return all;
}

LinkRelation classify_link(const Link& link, const Ivcl& ivcl) {
  if (!ivcl.registered(link.src)) throw UnregisteredVm(link.src);
  if (!ivcl.registered(link.dst)) throw UnregisteredVm(link.dst);
  return LinkRelation{link, ivcl.is_authorized(link.src, link.dst) ? 0 : 1};
}

std::vector<ColocationEvent> detect_colocation(const Placement& placement, std::span<const Vlam> vlams,
                                               const Ivcl& ivcl) {
  std::vector<ColocationEvent> events;
  for (const Vlam& vlam : vlams) {
    for (const Link& l : vlam.links) {
      if (classify_link(l, ivcl).value == 0) continue;
      const auto a = placement.server_of(l.src);
      const auto b = placement.server_of(l.dst);
      if (a && b && *a == *b && *a == vlam.server) events.push_back({vlam.server, l.src, l.dst});
    }
  }
  std::sort(events.begin(), events.end());
  events.erase(std::unique(events.begin(), events.end()), events.end());
  return events;
}

namespace {

std::map<VmId, std::set<VmId>> unauthorized_adjacency(std::span<const Vlam> vlams, const Ivcl& ivcl) {
  std::map<VmId, std::set<VmId>> adj;
  for (const Link& l : observed_links(vlams)) {
    if (classify_link(l, ivcl).value == 0) continue;
    adj[l.src].insert(l.dst);
    adj[l.dst].insert(l.src);
  }
  return adj;
}

}  // namespace

std::vector<CascadingEvent> detect_cascading(const Placement& placement, std::span<const Vlam> vlams,
                                             const Ivcl& ivcl) {
  std::vector<CascadingEvent> events;
  const auto adj = unauthorized_adjacency(vlams, ivcl);
  for (const auto& [relay, partners] : adj) {
    const auto home = placement.server_of(relay);
    if (!home) continue;
    std::vector<VmId> local;
    std::vector<std::pair<VmId, ServerId>> remote;
    for (VmId p : partners) {
      const auto s = placement.server_of(p);
      if (!s) continue;
      if (*s == *home) {
        local.push_back(p);
      } else {
        remote.emplace_back(p, *s);
      }
    }
    for (VmId origin : local) {
      for (const auto& [target, target_server] : remote) {
        events.push_back({origin, relay, target, *home, target_server});
      }
    }
  }
  std::sort(events.begin(), events.end());
  return events;
}

std::vector<VulnerabilityEvent> detect_vulnerability(const std::map<VmId, PerfSample>& perf,
                                                     const std::map<VmId, GuaranteedThreshold>& thresholds,
                                                     const Placement& placement,
                                                     const std::map<ServerId, double>& vuln_scores,
                                                     double interval_minutes) {
  std::vector<VulnerabilityEvent> events;
  for (const auto& [vm, server] : placement.assignments()) {
    auto p = perf.find(vm);
    if (p == perf.end() || p->second.covered_minutes < interval_minutes) throw IncompleteTelemetry(vm);
    auto th = thresholds.find(vm);
    if (th == thresholds.end()) {
      throw std::invalid_argument("no guaranteed threshold for VM " + std::to_string(vm.value));
    }
    const bool starved = p->second.tp_avl < th->second.tp_min && p->second.bw_avl < th->second.bw_min;
    if (!starved) continue;
    auto score = vuln_scores.find(server);
    const bool high = score != vuln_scores.end() && score->second >= kHighRiskScore;
    events.push_back({vm, server, high});
  }
  return events;
}

std::map<UserId, int> aggregate_breaches(std::span<const ColocationEvent> colocation,
                                         std::span<const CascadingEvent> cascading,
                                         std::span<const VulnerabilityEvent> vulnerability,
                                         const std::map<VmId, UserId>& vm_owner) {
  std::map<UserId, int> theta;
  for (const auto& [vm, owner] : vm_owner) theta.try_emplace(owner, 0);
  auto owner_of = [&](VmId v) {
    auto it = vm_owner.find(v);
    if (it == vm_owner.end()) throw UnregisteredVm(v);
    return it->second;
  };
  for (const auto& e : colocation) ++theta[owner_of(e.dst)];
  for (const auto& e : cascading) ++theta[owner_of(e.target)];
  for (const auto& e : vulnerability) ++theta[owner_of(e.vm)];
  return theta;
}

LinkSet malicious_links(VmId vm, std::span<const Vlam> vlams, const Ivcl& ivcl) {
  if (!ivcl.registered(vm)) throw UnregisteredVm(vm);
  const auto& legal = ivcl.authorized_from(vm);
  LinkSet out;
  for (const Vlam& v : vlams) {
    for (const Link& l : v.links) {
      if (l.src == vm && !legal.contains(l.dst)) out.insert(l);
    }
  }
  return out;
}

double attack_coverage(std::span<const VmId> attacker_vms, std::span<const ThreatReport> reports) {
  if (attacker_vms.empty()) throw std::domain_error("undefined coverage: attacker owns no VMs");
  const std::set<VmId> owned(attacker_vms.begin(), attacker_vms.end());
  std::size_t links = 0;
  for (const ThreatReport& r : reports) {
    links += static_cast<std::size_t>(
        std::count_if(r.malicious_links.begin(), r.malicious_links.end(),
                      [&](const Link& l) { return owned.contains(l.src); }));
  }
  return static_cast<double>(links) / static_cast<double>(owned.size());
}

ThreatReport inspect(const MonitorSnapshot& snap, const MonitorConfig& config) {
  if (!snap.placement || !snap.ivcl || !snap.vm_owner) {
    throw std::invalid_argument("inspect: incomplete snapshot");
  }
  ThreatReport report;
  report.interval = snap.interval;
  report.colocation_events = detect_colocation(*snap.placement, snap.vlams, *snap.ivcl);
  report.cascading_events = detect_cascading(*snap.placement, snap.vlams, *snap.ivcl);
  if (snap.perf && snap.thresholds) {
    static const std::map<ServerId, double> no_scores;
    report.vulnerability_events =
        detect_vulnerability(*snap.perf, *snap.thresholds, *snap.placement,
                             snap.vuln_scores ? *snap.vuln_scores : no_scores, config.interval_minutes);
  }
  report.theta_dc_per_user = aggregate_breaches(report.colocation_events, report.cascading_events,
                                                report.vulnerability_events, *snap.vm_owner);

  std::map<VmId, int> sourced;
  for (const Link& l : observed_links(snap.vlams)) {
    if (classify_link(l, *snap.ivcl).value == 0) continue;
    report.malicious_links.insert(l);
    ++sourced[l.src];
  }
  for (const auto& [vm, n] : sourced) {
    if (n >= config.malicious_link_threshold) report.malicious_vms.insert(vm);
  }

  std::map<UserId, int> owned;
  for (const auto& [vm, owner] : *snap.vm_owner) ++owned[owner];
  std::map<UserId, int> mal_links;
  for (VmId vm : report.malicious_vms) mal_links.try_emplace(snap.vm_owner->at(vm), 0);
  for (const Link& l : report.malicious_links) {
    const UserId u = snap.vm_owner->at(l.src);
    if (mal_links.contains(u)) ++mal_links[u];
  }
  for (const auto& [u, n] : mal_links) {
    report.coverage_per_attacker[u] = static_cast<double>(n) / static_cast<double>(owned.at(u));
  }
  return report;
}

QuarantineDirective quarantine(const ThreatReport& report, const Placement& placement,
                               std::span<const Vlam> vlams) {
  QuarantineDirective d;
  d.terminate_links = report.malicious_links;
  d.suspend_vms = report.malicious_vms;
  // Links of a suspended VM go with it, authorized or not.
  for (const Vlam& v : vlams) {
    for (const Link& l : v.links) {
      if (d.suspend_vms.contains(l.src) || d.suspend_vms.contains(l.dst)) d.terminate_links.insert(l);
    }
  }
  for (const Link& l : d.terminate_links) {
    if (auto s = placement.server_of(l.src)) d.broadcast_servers.insert(*s);
    if (auto s = placement.server_of(l.dst)) d.broadcast_servers.insert(*s);
  }
  for (VmId vm : d.suspend_vms) {
    if (auto s = placement.server_of(vm)) d.broadcast_servers.insert(*s);
  }
  return d;
}

void apply_quarantine(const QuarantineDirective& directive, Placement& placement, LinkSet& links,
                      std::span<Vm> vms) {
  for (const Link& l : directive.terminate_links) links.erase(l);
  for (VmId vm : directive.suspend_vms) {
    vm_at(vms, vm).status = VmStatus::Suspended;
    placement.remove(vm);
  }
  std::erase_if(links, [&](const Link& l) {
    return directive.suspend_vms.contains(l.src) || directive.suspend_vms.contains(l.dst);
  });
}

}  // namespace oscmc
