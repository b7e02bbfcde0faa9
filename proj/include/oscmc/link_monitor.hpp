#pragma once

#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "oscmc/dc_model.hpp"

namespace oscmc {

class UnregisteredVm : public std::runtime_error {
 public:
  explicit UnregisteredVm(VmId id)
      : std::runtime_error("unregistered VM " + std::to_string(id.value)), id_(id) {}
  [[nodiscard]] VmId id() const { return id_; }

 private:
  VmId id_;
};

class IncompleteTelemetry : public std::runtime_error {
 public:
  explicit IncompleteTelemetry(VmId id)
      : std::runtime_error("incomplete telemetry for VM " + std::to_string(id.value)) {}
};

/// Authorized inter-communication log. Links are directed: an entry
/// src -> dst authorizes only that direction.
class Ivcl {
 public:
  void register_vm(VmId vm) { authorized_.try_emplace(vm); }
  void authorize(VmId src, VmId dst);
  [[nodiscard]] bool registered(VmId vm) const { return authorized_.contains(vm); }
  [[nodiscard]] bool is_authorized(VmId src, VmId dst) const;
  [[nodiscard]] const std::set<VmId>& authorized_from(VmId src) const;
  [[nodiscard]] const std::map<VmId, std::set<VmId>>& entries() const { return authorized_; }

 private:
  std::map<VmId, std::set<VmId>> authorized_;
};

/// Links observed by one server's monitor during an interval. Every link has
/// at least one endpoint hosted on `server`.
struct Vlam {
  ServerId server;
  std::vector<Link> links;
};

/// Builds one VLAM per server in `servers`. Links whose endpoints are both
/// unplaced are dropped.
std::vector<Vlam> build_vlams(const Placement& placement, std::span<const Server> servers,
                              const LinkSet& links);

/// Deduplicated union of every VLAM's links.
LinkSet observed_links(std::span<const Vlam> vlams);

struct LinkRelation {
  Link link;
  int value = 0;  // 1 = unauthorized
};

LinkRelation classify_link(const Link& link, const Ivcl& ivcl);

struct ColocationEvent {
  ServerId server;
  VmId src;
  VmId dst;
  friend auto operator<=>(const ColocationEvent&, const ColocationEvent&) = default;
};

/// origin and relay share `origin_server`; target sits on `target_server`.
struct CascadingEvent {
  VmId origin;
  VmId relay;
  VmId target;
  ServerId origin_server;
  ServerId target_server;
  friend auto operator<=>(const CascadingEvent&, const CascadingEvent&) = default;
};

struct VulnerabilityEvent {
  VmId vm;
  ServerId server;
  bool high_risk = false;
  friend auto operator<=>(const VulnerabilityEvent&, const VulnerabilityEvent&) = default;
};

std::vector<ColocationEvent> detect_colocation(const Placement& placement, std::span<const Vlam> vlams,
                                               const Ivcl& ivcl);

/// Pair relation used on each hop of a cascade: 1 when any observed link
/// between the two VMs, in either direction, is unauthorized.
std::vector<CascadingEvent> detect_cascading(const Placement& placement, std::span<const Vlam> vlams,
                                             const Ivcl& ivcl);

/// Per-VM availability measured over the last `covered_minutes`.
struct PerfSample {
  double tp_avl = 0.0;
  double bw_avl = 0.0;
  double covered_minutes = 0.0;
};

inline constexpr double kHighRiskScore = 7.0;

/// Emits an event for every placed VM whose throughput and bandwidth are both
/// below its guaranteed threshold across the interval.
std::vector<VulnerabilityEvent> detect_vulnerability(const std::map<VmId, PerfSample>& perf,
                                                     const std::map<VmId, GuaranteedThreshold>& thresholds,
                                                     const Placement& placement,
                                                     const std::map<ServerId, double>& vuln_scores,
                                                     double interval_minutes);

/// Breach counts per victim user: colocation victims are link destinations,
/// cascade victims are targets, vulnerability victims are the degraded VMs.
std::map<UserId, int> aggregate_breaches(std::span<const ColocationEvent> colocation,
                                         std::span<const CascadingEvent> cascading,
                                         std::span<const VulnerabilityEvent> vulnerability,
                                         const std::map<VmId, UserId>& vm_owner);

/// Observed links sourced by `vm` minus the ones it is authorized to hold.
LinkSet malicious_links(VmId vm, std::span<const Vlam> vlams, const Ivcl& ivcl);

struct ThreatReport {
  int interval = 0;
  std::vector<ColocationEvent> colocation_events;
  std::vector<CascadingEvent> cascading_events;
  std::vector<VulnerabilityEvent> vulnerability_events;
  std::map<UserId, int> theta_dc_per_user;
  std::set<VmId> malicious_vms;
  LinkSet malicious_links;
  std::map<UserId, double> coverage_per_attacker;

  [[nodiscard]] bool empty() const {
    return colocation_events.empty() && cascading_events.empty() && vulnerability_events.empty() &&
           malicious_vms.empty() && malicious_links.empty();
  }
};

/// Malicious links over a window divided by the attacker's VM count.
double attack_coverage(std::span<const VmId> attacker_vms, std::span<const ThreatReport> reports);

struct MonitorConfig {
  // A VM sourcing at least this many unauthorized links is declared malicious.
  int malicious_link_threshold = 1;
  double interval_minutes = 5.0;
};

/// Everything one detection pass can see. No user records, no ground truth.
struct MonitorSnapshot {
  int interval = 0;
  const Placement* placement = nullptr;
  std::span<const Vlam> vlams;
  const Ivcl* ivcl = nullptr;
  const std::map<VmId, PerfSample>* perf = nullptr;
  const std::map<VmId, GuaranteedThreshold>* thresholds = nullptr;
  const std::map<ServerId, double>* vuln_scores = nullptr;
  const std::map<VmId, UserId>* vm_owner = nullptr;
};

ThreatReport inspect(const MonitorSnapshot& snapshot, const MonitorConfig& config = {});

struct QuarantineDirective {
  LinkSet terminate_links;
  std::set<VmId> suspend_vms;
  std::set<ServerId> broadcast_servers;

  [[nodiscard]] bool empty() const {
    return terminate_links.empty() && suspend_vms.empty() && broadcast_servers.empty();
  }
};

QuarantineDirective quarantine(const ThreatReport& report, const Placement& placement,
                               std::span<const Vlam> vlams);

/// Applies a directive to a mutable view of the world: terminates listed
/// links, drops every link touching a suspended VM and unplaces it.
void apply_quarantine(const QuarantineDirective& directive, Placement& placement, LinkSet& links,
                      std::span<Vm> vms);

}  // namespace oscmc
