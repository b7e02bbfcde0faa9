#include "oscmc/allocator.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <random>

#include "oscmc/rng.hpp"

namespace oscmc {

std::size_t ClusterAssignment::top_cluster() const {
  std::vector<bool> used(centroids.size(), false);
  for (std::size_t m : membership) used[m] = true;
  std::size_t best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    if (used[c] && centroids[c] > best_value) {
      best_value = centroids[c];
      best = c;
    }
  }
  return best;
}

double clustering_objective(std::span<const double> points, std::span<const double> centroids,
                            std::span<const std::size_t> membership) {
  double g = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double d = points[i] - centroids[membership[i]];
    g += d * d;
  }
  return g;
}

namespace {

std::vector<std::size_t> assign(std::span<const double> points, const std::vector<double>& centroids) {
  std::vector<std::size_t> m(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.size(); ++c) {
      const double d = (points[i] - centroids[c]) * (points[i] - centroids[c]);
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    m[i] = best;
  }
  return m;
}

void update(std::span<const double> points, const std::vector<std::size_t>& membership,
            std::vector<double>& centroids) {
  std::vector<double> sum(centroids.size(), 0.0);
  std::vector<std::size_t> count(centroids.size(), 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    sum[membership[i]] += points[i];
    ++count[membership[i]];
  }
  // Empty clusters keep their previous centroid.
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    if (count[c] > 0) centroids[c] = sum[c] / static_cast<double>(count[c]);
  }
}

// Distinct points drawn with probability proportional to squared distance
// from the centroids picked so far (the first one uniformly).
std::vector<double> initial_centroids(std::span<const double> points, std::size_t k, std::mt19937_64& rng) {
  std::vector<double> distinct(points.begin(), points.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < k) {
    std::vector<double> pool(points.begin(), points.end());
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(k);
    return pool;
  }
  std::vector<double> chosen;
  chosen.push_back(distinct[std::uniform_int_distribution<std::size_t>(0, distinct.size() - 1)(rng)]);
  std::vector<double> weight(distinct.size());
  while (chosen.size() < k) {
    for (std::size_t i = 0; i < distinct.size(); ++i) {
      double d = std::numeric_limits<double>::infinity();
      for (double c : chosen) d = std::min(d, (distinct[i] - c) * (distinct[i] - c));
      weight[i] = d;
    }
    std::discrete_distribution<std::size_t> pick(weight.begin(), weight.end());
    chosen.push_back(distinct[pick(rng)]);
  }
  return chosen;
}

// At a Lloyd fixpoint a point can still lower the objective by switching
// clusters once the change in both means is accounted for. Moves are
// applied greedily; returns whether any point moved.
bool single_point_moves(std::span<const double> points, std::vector<std::size_t>& membership,
                        std::vector<double>& centroids) {
  std::vector<double> count(centroids.size(), 0.0);
  for (std::size_t m : membership) count[m] += 1.0;
  bool moved = false;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double x = points[i];
    const std::size_t a = membership[i];
    if (count[a] <= 1.0) continue;
    const double da = x - centroids[a];
    const double removal = count[a] / (count[a] - 1.0) * da * da;
    std::size_t best = a;
    double best_gain = 1e-12 * (1.0 + removal);
    for (std::size_t b = 0; b < centroids.size(); ++b) {
      if (b == a) continue;
      const double db = x - centroids[b];
      const double added = count[b] == 0.0 ? 0.0 : count[b] / (count[b] + 1.0) * db * db;
      if (removal - added > best_gain) {
        best_gain = removal - added;
        best = b;
      }
    }
    if (best == a) continue;
    centroids[a] = (centroids[a] * count[a] - x) / (count[a] - 1.0);
    centroids[best] = count[best] == 0.0 ? x : (centroids[best] * count[best] + x) / (count[best] + 1.0);
    count[a] -= 1.0;
    count[best] += 1.0;
    membership[i] = best;
    moved = true;
  }
  return moved;
}

}  // namespace

ClusterAssignment kmeans(std::span<const double> points, std::size_t clusters, std::uint64_t seed,
                         const KMeansOptions& options) {
  if (clusters == 0) throw std::invalid_argument("kmeans: at least one cluster required");
  if (clusters > points.size()) throw std::invalid_argument("more clusters than points");

  ClusterAssignment best;
  bool have_best = false;
  const int restarts = std::max(1, options.restarts);
  for (int r = 0; r < restarts; ++r) {
    std::mt19937_64 rng(stream_seed(seed, "kmeans", r));
    ClusterAssignment run;
    run.centroids = initial_centroids(points, clusters, rng);
    run.membership = assign(points, run.centroids);
    while (true) {
      update(points, run.membership, run.centroids);
      run.objective = clustering_objective(points, run.centroids, run.membership);
      run.objective_trace.push_back(run.objective);
      ++run.iterations;
      if (run.iterations >= options.max_iterations) break;
      auto next = assign(points, run.centroids);
      if (next != run.membership) {
        run.membership = std::move(next);
        continue;
      }
      if (!single_point_moves(points, run.membership, run.centroids)) break;
    }
    if (!have_best || run.objective < best.objective) {
      best = std::move(run);
      have_best = true;
    }
  }
  return best;
}

namespace {

std::vector<const Server*> by_id(std::span<const Server> servers) {
  std::vector<const Server*> out;
  out.reserve(servers.size());
  for (const Server& s : servers) out.push_back(&s);
  std::sort(out.begin(), out.end(), [](const Server* a, const Server* b) { return a->id < b->id; });
  return out;
}

bool decreasing_bw(const PlacementRequest& a, const PlacementRequest& b) {
  if (a.predicted_bw != b.predicted_bw) return a.predicted_bw > b.predicted_bw;
  return a.vm < b.vm;
}

Placement place_in_order(std::span<const PlacementRequest> ordered, std::span<const Server> servers,
                         Placement current) {
  const auto scan = by_id(servers);
  for (const PlacementRequest& r : ordered) {
    current.remove(r.vm);
    bool placed = false;
    for (const Server* s : scan) {
      if (current.fits(*s, r.demand)) {
        current.place(r.vm, s->id, r.demand);
        placed = true;
        break;
      }
    }
    if (!placed) throw PlacementInfeasible(r.vm);
  }
  return current;
}

double mean_utilization(const Placement& p, const Server& s) {
  const ResourceVector load = p.load(s.id);
  return (load.cpu / s.capacity.cpu + load.mem / s.capacity.mem + load.bw / s.capacity.bw) / 3.0;
}

}  // namespace

Placement ffd_place(std::span<const PlacementRequest> vms, std::span<const Server> servers, Placement current) {
  std::vector<PlacementRequest> ordered(vms.begin(), vms.end());
  std::sort(ordered.begin(), ordered.end(), decreasing_bw);
  return place_in_order(ordered, servers, std::move(current));
}

Placement first_fit_place(std::span<const PlacementRequest> vms, std::span<const Server> servers,
                          Placement current) {
  return place_in_order(vms, servers, std::move(current));
}

RebalanceResult rebalance(const CongestionState& state, const Placement& placement,
                          std::span<const Server> servers, std::span<const PlacementRequest> vms,
                          const ClusterAssignment& clusters) {
  RebalanceResult result{placement, {}, {}, {}};
  if (state.value == CongestionValue::Normal) return result;

  std::map<VmId, const PlacementRequest*> request;
  for (const auto& r : vms) request[r.vm] = &r;
  const auto scan = by_id(servers);

  if (state.value == CongestionValue::Congested) {
    if (clusters.membership.size() != vms.size()) {
      throw std::invalid_argument("rebalance: cluster membership does not match VM list");
    }
    const std::size_t top = clusters.top_cluster();
    std::vector<PlacementRequest> hogs;
    for (std::size_t i = 0; i < vms.size(); ++i) {
      if (clusters.membership[i] == top) hogs.push_back(vms[i]);
    }
    std::sort(hogs.begin(), hogs.end(), decreasing_bw);
    std::map<ServerId, bool> reserved;
    for (const Server* s : scan) reserved[s->id] = s->reserved_for_hogs;
    for (const auto& h : hogs) {
      const auto at = result.placement.server_of(h.vm);
      if (at && reserved[*at]) continue;
      bool moved = false;
      for (const Server* s : scan) {
        if (!s->reserved_for_hogs || !result.placement.fits(*s, h.demand)) continue;
        result.placement.place(h.vm, s->id, h.demand);
        result.diverted.push_back(h.vm);
        moved = true;
        break;
      }
      if (!moved) result.residual_hogs.push_back(h.vm);
    }
    return result;
  }

  // Underload: try to empty the least utilized ordinary servers onto other
  // already-active ordinary servers.
  std::vector<const Server*> candidates;
  for (const Server* s : scan) {
    if (!s->reserved_for_hogs && !result.placement.hosted(s->id).empty()) candidates.push_back(s);
  }
  std::stable_sort(candidates.begin(), candidates.end(), [&](const Server* a, const Server* b) {
    return mean_utilization(result.placement, *a) < mean_utilization(result.placement, *b);
  });
  std::set<ServerId> emptied;
  for (const Server* src : candidates) {
    const auto& hosted = result.placement.hosted(src->id);
    if (hosted.empty()) continue;
    std::vector<PlacementRequest> moving;
    for (VmId v : hosted) {
      auto it = request.find(v);
      if (it == request.end()) throw std::invalid_argument("rebalance: no demand for VM " + std::to_string(v.value));
      moving.push_back(*it->second);
    }
    std::sort(moving.begin(), moving.end(), decreasing_bw);
    // Moves are applied in place and undone if any VM cannot be rehomed.
    std::vector<const PlacementRequest*> done;
    bool ok = true;
    for (const auto& r : moving) {
      bool placed = false;
      for (const Server* dst : scan) {
        if (dst->id == src->id || dst->reserved_for_hogs || emptied.contains(dst->id)) continue;
        if (result.placement.hosted(dst->id).empty() || !result.placement.fits(*dst, r.demand)) continue;
        result.placement.place(r.vm, dst->id, r.demand);
        done.push_back(&r);
        placed = true;
        break;
      }
      if (!placed) {
        ok = false;
        break;
      }
    }
    if (ok) {
      emptied.insert(src->id);
      result.emptied.push_back(src->id);
    } else {
      for (const PlacementRequest* r : done) result.placement.place(r->vm, src->id, r->demand);
    }
  }
  return result;
}

}  // namespace oscmc
