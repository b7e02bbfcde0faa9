#include "oscmc/dc_model.hpp"

#include <stdexcept>

namespace oscmc {

GuaranteedThreshold default_threshold(const ResourceVector& demand, double fraction) {
  return GuaranteedThreshold{demand.bw * fraction, demand.bw * fraction};
}

Admission admit_vm(const Vm& vm, std::span<const Server> servers) {
  if (vm.status != VmStatus::Active) {
    throw std::invalid_argument("admit_vm: VM " + std::to_string(vm.id.value) + " is not active");
  }
  for (const Server& s : servers) {
    if (vm.demand.fits_within(s.capacity)) return {true, {}};
  }
  return {false, "demand exceeds every server capacity"};
}

void Placement::place(VmId vm, ServerId server, const ResourceVector& demand) {
  if (host_.contains(vm)) remove(vm);
  host_[vm] = server;
  demand_[vm] = demand;
  hosted_[server].insert(vm);
  load_[server] += demand;
}

void Placement::remove(VmId vm) {
  auto it = host_.find(vm);
  if (it == host_.end()) return;
  const ServerId server = it->second;
  const ResourceVector d = demand_.at(vm);
  host_.erase(it);
  demand_.erase(vm);
  auto& set = hosted_[server];
  set.erase(vm);
  if (set.empty()) {
    hosted_.erase(server);
    load_.erase(server);
  } else {
    load_[server] -= d;
  }
}

std::optional<ServerId> Placement::server_of(VmId vm) const {
  auto it = host_.find(vm);
  if (it == host_.end()) return std::nullopt;
  return it->second;
}

const std::set<VmId>& Placement::hosted(ServerId server) const {
  static const std::set<VmId> empty;
  auto it = hosted_.find(server);
  return it == hosted_.end() ? empty : it->second;
}

ResourceVector Placement::load(ServerId server) const {
  auto it = load_.find(server);
  return it == load_.end() ? ResourceVector{} : it->second;
}

bool Placement::fits(const Server& server, const ResourceVector& demand) const {
  return (load(server.id) + demand).fits_within(server.capacity);
}

bool satisfies_capacity(const Placement& placement, std::span<const Server> servers,
                        std::span<const Vm> vms) {
  for (const auto& [sid, hosted] : placement.inverse()) {
    ResourceVector sum;
    for (VmId v : hosted) sum += vm_at(vms, v).demand;
    if (!sum.fits_within(server_at(servers, sid).capacity)) return false;
  }
  return true;
}

void refresh_activity(std::span<Server> servers, const Placement& placement) {
  for (Server& s : servers) s.active = s.reserved_for_hogs || !placement.hosted(s.id).empty();
}

namespace {
template <class T, class IdT>
T& dense_at(std::span<T> items, IdT id, const char* what) {
  if (id.value == 0 || id.value > items.size()) {
    throw std::out_of_range(std::string("unknown ") + what + " id " + std::to_string(id.value));
  }
  return items[id.value - 1];
}
}  // namespace

const Vm& vm_at(std::span<const Vm> vms, VmId id) { return dense_at(vms, id, "VM"); }
Vm& vm_at(std::span<Vm> vms, VmId id) { return dense_at(vms, id, "VM"); }
const Server& server_at(std::span<const Server> servers, ServerId id) { return dense_at(servers, id, "server"); }
Server& server_at(std::span<Server> servers, ServerId id) { return dense_at(servers, id, "server"); }

}  // namespace oscmc
