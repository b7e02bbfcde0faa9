#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "oscmc/dc_model.hpp"
#include "oscmc/link_monitor.hpp"
#include "oscmc/metrics.hpp"
#include "oscmc/predictor.hpp"
#include "oscmc/scenario.hpp"

namespace oscmc {

struct RunOptions {
  int workers = 1;  // results do not depend on this
};

/// Mutable world owned by one engine run.
struct SimState {
  std::vector<Server> servers;
  std::vector<Vm> vms;
  std::vector<User> users;
  std::map<VmId, UserId> vm_owner;
  std::set<VmId> attacker_vms;  // ground truth, drives injection only
  Ivcl ivcl;
  Placement placement;
  LinkSet persistent_links;  // injected malicious links still alive
};

/// Servers, users, VMs, IVCL and the initial placement for `policy`.
/// Throws PlacementInfeasible if the initial placement cannot be built.
SimState build_world(const Scenario& scenario, Policy policy);

/// New unauthorized links created by attacker VMs during interval `t`.
/// Draws are keyed by (seed, t, vm) so every policy sees the same stream.
std::vector<Link> inject_malicious_behavior(const Scenario& scenario, const SimState& state, int t);

/// Authorized traffic observed during interval `t`.
LinkSet benign_links(const Scenario& scenario, const SimState& state, int t);

/// Places each VM on its owner's most recently used server when it fits,
/// else first fit in server id order. Updates `history`.
Placement pssf_place(std::span<const Vm> vms, std::span<const Server> servers,
                     std::map<UserId, ServerId>& history, Placement current);

struct IntervalRecord {
  IntervalMetrics metrics;
  ThreatReport report;
  double observed_al_pct = 100.0;  // before quarantine
  double colocation_server_fraction = 0.0;
  CongestionValue congestion = CongestionValue::Normal;
  int active_vms = 0;
  int suspended_vms = 0;
  int terminated_vms = 0;
  int live_malicious_links = 0;  // after the commit phase
  std::vector<double> centroids;  // predicted-bandwidth clusters, OSC-MC only
  std::vector<int> cluster_sizes;
};

struct RunSummary {
  double final_al_pct = 100.0;
  double total_kwh = 0.0;
  double mean_ru_pct = 0.0;
  double mean_hogs = 0.0;
  int suspended_vms = 0;
  int terminated_vms = 0;
  int malicious_links_total = 0;  // distinct unauthorized links ever observed
  int realized_breaches = 0;      // malicious links alive for two full intervals
};

struct RunLog {
  std::string scenario;
  Policy policy = Policy::Oscmc;
  std::uint64_t seed = 0;
  std::vector<IntervalRecord> intervals;
  std::vector<VmId> suspended;  // in suspension order
  RunSummary summary;
};

RunLog run(const Scenario& scenario, Policy policy, const RunOptions& options = {});

/// Baseline without prediction, clustering or quarantine.
RunLog wosc_run(const Scenario& scenario, const RunOptions& options = {});

/// Runs fn(i) for i in [0, n) on up to `workers` threads. Each index must
/// write only its own output slot.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

}  // namespace oscmc
