#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <vector>

namespace oscmc {

// Strongly typed 1-based identifiers. Tag types keep VM, server and user ids
// from being mixed up at call sites.
template <class Tag>
struct Id {
  std::uint32_t value = 0;

  constexpr Id() = default;
  constexpr explicit Id(std::uint32_t v) : value(v) {}
  constexpr auto operator<=>(const Id&) const = default;
};

template <class Tag>
std::ostream& operator<<(std::ostream& os, Id<Tag> id) {
  return os << id.value;
}

struct VmTag {};
struct ServerTag {};
struct UserTag {};
using VmId = Id<VmTag>;
using ServerId = Id<ServerTag>;
using UserId = Id<UserTag>;

/// CPU in MIPS, memory in MB, bandwidth in abstract units.
struct ResourceVector {
  double cpu = 0.0;
  double mem = 0.0;
  double bw = 0.0;

  constexpr ResourceVector& operator+=(const ResourceVector& o) {
    cpu += o.cpu;
    mem += o.mem;
    bw += o.bw;
    return *this;
  }
  constexpr ResourceVector& operator-=(const ResourceVector& o) {
    cpu -= o.cpu;
    mem -= o.mem;
    bw -= o.bw;
    return *this;
  }
  friend constexpr ResourceVector operator+(ResourceVector a, const ResourceVector& b) { return a += b; }
  friend constexpr ResourceVector operator-(ResourceVector a, const ResourceVector& b) { return a -= b; }
  friend constexpr bool operator==(const ResourceVector&, const ResourceVector&) = default;

  /// Componentwise <=.
  [[nodiscard]] constexpr bool fits_within(const ResourceVector& cap) const {
    return cpu <= cap.cpu && mem <= cap.mem && bw <= cap.bw;
  }
  [[nodiscard]] constexpr bool non_negative() const { return cpu >= 0.0 && mem >= 0.0 && bw >= 0.0; }
};

struct PowerProfile {
  double idle = 70.0;
  double min = 105.0;
  double max = 250.0;
};

struct Server {
  ServerId id;
  ResourceVector capacity{2000.0, 2048.0, 10000.0};
  PowerProfile power;
  double vulnerability_score = 0.0;  // [0, 10]
  bool active = false;
  bool reserved_for_hogs = false;
};

struct User {
  UserId id;
  // Ground truth for evaluation and attack injection only. The link monitor
  // never receives User records.
  bool is_malicious_truth = false;
  std::set<VmId> vm_ids;
};

enum class VmStatus { Active, Suspended, Terminated };

struct GuaranteedThreshold {
  double tp_min = 0.0;
  double bw_min = 0.0;
};

struct Vm {
  VmId id;
  UserId owner;
  ResourceVector demand;
  VmStatus status = VmStatus::Active;
  GuaranteedThreshold guaranteed;
  std::size_t flavor = 0;
};

/// Thresholds at `fraction` of the VM's bandwidth demand; throughput is
/// measured in bandwidth units.
GuaranteedThreshold default_threshold(const ResourceVector& demand, double fraction = 0.10);

struct Admission {
  bool accepted = false;
  std::string reason;
};

/// Accepts the VM if at least one server could host it on an empty machine.
Admission admit_vm(const Vm& vm, std::span<const Server> servers);

/// VM -> server mapping with an inverse index and per-server reserved load.
/// Every mutation keeps the three views consistent; capacity is checked by
/// callers through `fits`.
class Placement {
 public:
  void place(VmId vm, ServerId server, const ResourceVector& demand);
  void remove(VmId vm);

  [[nodiscard]] std::optional<ServerId> server_of(VmId vm) const;
  [[nodiscard]] bool contains(VmId vm) const { return host_.contains(vm); }
  [[nodiscard]] const std::set<VmId>& hosted(ServerId server) const;
  [[nodiscard]] ResourceVector load(ServerId server) const;
  [[nodiscard]] bool fits(const Server& server, const ResourceVector& demand) const;
  [[nodiscard]] std::size_t size() const { return host_.size(); }
  [[nodiscard]] const std::map<VmId, ServerId>& assignments() const { return host_; }
  [[nodiscard]] const std::map<ServerId, std::set<VmId>>& inverse() const { return hosted_; }

  friend bool operator==(const Placement& a, const Placement& b) { return a.host_ == b.host_; }

 private:
  std::map<VmId, ServerId> host_;
  std::map<VmId, ResourceVector> demand_;
  std::map<ServerId, std::set<VmId>> hosted_;
  std::map<ServerId, ResourceVector> load_;
};

/// Componentwise capacity check over every server, recomputed from raw VM
/// demands rather than the cached per-server load.
bool satisfies_capacity(const Placement& placement, std::span<const Server> servers,
                        std::span<const Vm> vms);

/// Recomputes Server::active from the hosting sets and the reserve flag.
void refresh_activity(std::span<Server> servers, const Placement& placement);

struct Link {
  VmId src;
  VmId dst;
  int established_at = 0;
};

/// Orders and compares links by endpoints only.
struct LinkOrder {
  bool operator()(const Link& a, const Link& b) const {
    return std::tie(a.src, a.dst) < std::tie(b.src, b.dst);
  }
};
using LinkSet = std::set<Link, LinkOrder>;

inline bool same_endpoints(const Link& a, const Link& b) { return a.src == b.src && a.dst == b.dst; }

// Dense id lookup helpers. Ids are 1-based and equal position + 1.
const Vm& vm_at(std::span<const Vm> vms, VmId id);
Vm& vm_at(std::span<Vm> vms, VmId id);
const Server& server_at(std::span<const Server> servers, ServerId id);
Server& server_at(std::span<Server> servers, ServerId id);

}  // namespace oscmc

template <class Tag>
struct std::hash<oscmc::Id<Tag>> {
  std::size_t operator()(oscmc::Id<Tag> id) const noexcept { return std::hash<std::uint32_t>{}(id.value); }
};
