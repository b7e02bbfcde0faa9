#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "oscmc/dc_model.hpp"
#include "oscmc/predictor.hpp"

namespace oscmc {

struct ClusterAssignment {
  std::vector<double> centroids;
  std::vector<std::size_t> membership;  // cluster index per point
  double objective = 0.0;
  std::vector<double> objective_trace;  // after every Lloyd iteration of the kept restart
  int iterations = 0;

  [[nodiscard]] std::size_t top_cluster() const;
};

/// Sum of squared distances of each point to its assigned centroid.
double clustering_objective(std::span<const double> points, std::span<const double> centroids,
                            std::span<const std::size_t> membership);

struct KMeansOptions {
  int restarts = 10;
  int max_iterations = 100;
};

/// Lloyd's algorithm on scalar bandwidths, seeded initialization from
/// distinct values, best objective over restarts.
ClusterAssignment kmeans(std::span<const double> points, std::size_t clusters, std::uint64_t seed,
                         const KMeansOptions& options = {});

class PlacementInfeasible : public std::runtime_error {
 public:
  explicit PlacementInfeasible(VmId vm)
      : std::runtime_error("placement infeasible for VM " + std::to_string(vm.value)), vm_(vm) {}
  [[nodiscard]] VmId vm() const { return vm_; }

 private:
  VmId vm_;
};

struct PlacementRequest {
  VmId vm;
  ResourceVector demand;
  double predicted_bw = 0.0;
};

/// First-Fit Decreasing by predicted bandwidth (ties by VM id), scanning
/// `servers` in id order. VMs already present are re-placed.
Placement ffd_place(std::span<const PlacementRequest> vms, std::span<const Server> servers, Placement current);

/// Plain first fit in the given order.
Placement first_fit_place(std::span<const PlacementRequest> vms, std::span<const Server> servers,
                          Placement current);

struct RebalanceResult {
  Placement placement;
  std::vector<VmId> diverted;
  std::vector<VmId> residual_hogs;  // top-cluster VMs the reserved servers could not take
  std::vector<ServerId> emptied;
};

/// Reacts to the congestion signal: congestion diverts the highest-bandwidth
/// cluster to reserved servers, underload consolidates lightly used servers,
/// normal traffic leaves the placement alone. `vms` lists every placed VM
/// with the bandwidth the clusters were built from, in cluster point order.
RebalanceResult rebalance(const CongestionState& state, const Placement& placement,
                          std::span<const Server> servers, std::span<const PlacementRequest> vms,
                          const ClusterAssignment& clusters);

}  // namespace oscmc
