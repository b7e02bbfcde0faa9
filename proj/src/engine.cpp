#include "oscmc/engine.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <deque>
#include <numeric>
#include <optional>
#include <random>
#include <thread>

#include <spdlog/spdlog.h>

#include "oscmc/allocator.hpp"
#include "oscmc/rng.hpp"
#include "oscmc/workload.hpp"

namespace oscmc {

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  const std::size_t threads = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, workers)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < n; i = next++) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  pool.clear();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

namespace {

double unit(std::mt19937_64& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

std::vector<Server> ordinary(std::span<const Server> servers) {
  std::vector<Server> out;
  for (const Server& s : servers) {
    if (!s.reserved_for_hogs) out.push_back(s);
  }
  return out;
}

std::vector<PlacementRequest> nominal_requests(std::span<const Vm> vms, const Placement& skip) {
  std::vector<PlacementRequest> out;
  for (const Vm& v : vms) {
    if (v.status != VmStatus::Active || skip.contains(v.id)) continue;
    out.push_back({v.id, v.demand, v.demand.bw});
  }
  return out;
}

}  // namespace

Placement pssf_place(std::span<const Vm> vms, std::span<const Server> servers,
                     std::map<UserId, ServerId>& history, Placement current) {
  std::vector<const Server*> scan;
  for (const Server& s : servers) scan.push_back(&s);
  std::sort(scan.begin(), scan.end(), [](const Server* a, const Server* b) { return a->id < b->id; });
  for (const Vm& vm : vms) {
    current.remove(vm.id);
    std::optional<ServerId> chosen;
    if (auto it = history.find(vm.owner); it != history.end()) {
      for (const Server* s : scan) {
        if (s->id == it->second && current.fits(*s, vm.demand)) chosen = s->id;
      }
    }
    if (!chosen) {
      for (const Server* s : scan) {
        if (current.fits(*s, vm.demand)) {
          chosen = s->id;
          break;
        }
      }
    }
    if (!chosen) throw PlacementInfeasible(vm.id);
    current.place(vm.id, *chosen, vm.demand);
    history[vm.owner] = *chosen;
  }
  return current;
}

SimState build_world(const Scenario& sc, Policy policy) {
  validate(sc);
  SimState st;

  for (int i = 1; i <= sc.servers; ++i) {
    Server s;
    s.id = ServerId(static_cast<std::uint32_t>(i));
    s.capacity = sc.server_capacity;
    s.power = sc.power;
    if (!sc.vulnerability.empty()) {
      s.vulnerability_score = sc.vulnerability[static_cast<std::size_t>(i - 1)];
    } else {
      std::mt19937_64 rng(stream_seed(sc.seed, "vulnerability", i));
      s.vulnerability_score = 10.0 * unit(rng);
    }
    s.reserved_for_hogs = policy == Policy::Oscmc && sc.reserved_every > 0 && i % sc.reserved_every == 0;
    st.servers.push_back(s);
  }

  const int m = sc.effective_users();
  for (int u = 1; u <= m; ++u) st.users.push_back(User{UserId(static_cast<std::uint32_t>(u)), false, {}});
  std::vector<UserId> owner(static_cast<std::size_t>(sc.vms));
  if (!sc.explicit_users.empty()) {
    for (const auto& [u, vms] : sc.explicit_users) {
      for (VmId v : vms) owner[v.value - 1] = u;
    }
  } else {
    // Balanced ownership in a seeded random order.
    for (int i = 0; i < sc.vms; ++i) owner[static_cast<std::size_t>(i)] = UserId(static_cast<std::uint32_t>(i % m + 1));
    std::mt19937_64 rng(stream_seed(sc.seed, "owners"));
    std::shuffle(owner.begin(), owner.end(), rng);
  }

  std::vector<UserId> bad = sc.malicious_users;
  if (bad.empty()) {
    std::vector<UserId> all;
    for (const User& u : st.users) all.push_back(u.id);
    std::mt19937_64 rng(stream_seed(sc.seed, "malicious-users"));
    std::shuffle(all.begin(), all.end(), rng);
    all.resize(static_cast<std::size_t>(sc.malicious_user_count()));
    bad = all;
  }
  for (UserId u : bad) st.users[u.value - 1].is_malicious_truth = true;

  for (int i = 1; i <= sc.vms; ++i) {
    Vm vm;
    vm.id = VmId(static_cast<std::uint32_t>(i));
    vm.owner = owner[static_cast<std::size_t>(i - 1)];
    switch (sc.flavor_policy) {
      case FlavorPolicy::First:
        vm.flavor = 0;
        break;
      case FlavorPolicy::Alternate:
        vm.flavor = static_cast<std::size_t>(i - 1) % sc.flavors.size();
        break;
      case FlavorPolicy::Random: {
        std::mt19937_64 rng(stream_seed(sc.seed, "flavor", i));
        vm.flavor = std::uniform_int_distribution<std::size_t>(0, sc.flavors.size() - 1)(rng);
        break;
      }
    }
    vm.demand = sc.flavors[vm.flavor];
    vm.guaranteed = default_threshold(vm.demand, sc.guarantee_pct / 100.0);
    if (!admit_vm(vm, st.servers).accepted) vm.status = VmStatus::Terminated;
    st.users[vm.owner.value - 1].vm_ids.insert(vm.id);
    st.vm_owner[vm.id] = vm.owner;
    if (st.users[vm.owner.value - 1].is_malicious_truth) st.attacker_vms.insert(vm.id);
    st.vms.push_back(vm);
  }

  // Authorized links: every ordered pair inside a user, a sampled share of
  // cross-user pairs, and every scripted benign link.
  for (const Vm& v : st.vms) st.ivcl.register_vm(v.id);
  for (const User& u : st.users) {
    for (VmId a : u.vm_ids) {
      for (VmId b : u.vm_ids) {
        if (a != b) st.ivcl.authorize(a, b);
      }
    }
  }
  if (sc.cross_grant_pct > 0.0) {
    for (const User& a : st.users) {
      for (const User& b : st.users) {
        if (a.id == b.id || a.vm_ids.empty() || b.vm_ids.empty()) continue;
        std::mt19937_64 rng(stream_seed(sc.seed, "ivcl", a.id.value, b.id.value));
        if (unit(rng) * 100.0 >= sc.cross_grant_pct) continue;
        auto pick = [&](const std::set<VmId>& set) {
          auto it = set.begin();
          std::advance(it, std::uniform_int_distribution<std::size_t>(0, set.size() - 1)(rng));
          return *it;
        };
        const VmId src = pick(a.vm_ids);
        st.ivcl.authorize(src, pick(b.vm_ids));
      }
    }
  }
  for (const auto& l : sc.scripted_links) st.ivcl.authorize(l.src, l.dst);

  for (const auto& [sid, vms] : sc.explicit_placement) {
    const Server& s = server_at(std::span<const Server>(st.servers), sid);
    for (VmId v : vms) {
      const Vm& vm = vm_at(std::span<const Vm>(st.vms), v);
      if (vm.status != VmStatus::Active) continue;
      if (!st.placement.fits(s, vm.demand)) throw PlacementInfeasible(v);
      st.placement.place(v, sid, vm.demand);
    }
  }
  const auto pool = ordinary(st.servers);
  const auto pending_requests = nominal_requests(st.vms, st.placement);
  switch (policy) {
    case Policy::Oscmc:
      st.placement = ffd_place(pending_requests, pool, std::move(st.placement));
      break;
    case Policy::Wosc:
      st.placement = first_fit_place(pending_requests, pool, std::move(st.placement));
      break;
    case Policy::Pssf: {
      std::map<UserId, ServerId> history;
      for (const auto& [v, s] : st.placement.assignments()) history[st.vm_owner.at(v)] = s;
      std::vector<Vm> pending;
      for (const Vm& v : st.vms) {
        if (v.status == VmStatus::Active && !st.placement.contains(v.id)) pending.push_back(v);
      }
      st.placement = pssf_place(pending, pool, history, std::move(st.placement));
      break;
    }
  }
  refresh_activity(st.servers, st.placement);
  return st;
}

std::vector<Link> inject_malicious_behavior(const Scenario& sc, const SimState& st, int t) {
  std::vector<Link> out;
  for (const auto& l : sc.scripted_attacks) {
    if (l.at == t) out.push_back({l.src, l.dst, t});
  }
  if (sc.attack_rate <= 0.0) return out;
  if (sc.burst_period > 0 && t % sc.burst_period != 0) return out;

  std::map<VmId, int> held;
  for (const Link& l : st.persistent_links) ++held[l.src];
  auto usable = [&](VmId src, VmId dst) {
    const Vm& d = st.vms[dst.value - 1];
    return d.status == VmStatus::Active && st.placement.contains(dst) && d.owner != st.vm_owner.at(src) &&
           !st.ivcl.is_authorized(src, dst) && !st.persistent_links.contains(Link{src, dst, 0});
  };
  for (VmId v : st.attacker_vms) {
    const Vm& vm = st.vms[v.value - 1];
    if (vm.status != VmStatus::Active || !st.placement.contains(v)) continue;
    std::mt19937_64 rng(stream_seed(sc.seed, "attack", t, v.value));
    if (unit(rng) >= sc.attack_rate) continue;
    int budget = sc.attack_max_links - held[v];
    const ServerId home = *st.placement.server_of(v);
    std::set<VmId> chosen;
    for (VmId w : st.placement.hosted(home)) {
      const bool take = unit(rng) < sc.attack_rate;
      if (budget > 0 && w != v && take && usable(v, w)) {
        chosen.insert(w);
        --budget;
      }
    }
    for (int k = 0; k < sc.attack_cross_targets; ++k) {
      const VmId w(static_cast<std::uint32_t>(std::uniform_int_distribution<int>(1, sc.vms)(rng)));
      if (budget <= 0 || w == v || chosen.contains(w) || !st.placement.contains(w)) continue;
      if (*st.placement.server_of(w) == home || !usable(v, w)) continue;
      chosen.insert(w);
      --budget;
    }
    for (VmId w : chosen) out.push_back({v, w, t});
  }
  return out;
}

LinkSet benign_links(const Scenario& sc, const SimState& st, int t) {
  LinkSet out;
  auto live = [&](VmId v) { return st.vms[v.value - 1].status == VmStatus::Active && st.placement.contains(v); };
  for (const auto& l : sc.scripted_links) {
    if (l.at <= t && live(l.src) && live(l.dst)) out.insert({l.src, l.dst, t});
  }
  if (sc.benign_link_pct <= 0.0) return out;
  for (const auto& [src, dsts] : st.ivcl.entries()) {
    if (!live(src)) continue;
    std::mt19937_64 rng(stream_seed(sc.seed, "benign", t, src.value));
    for (VmId dst : dsts) {
      if (unit(rng) * 100.0 < sc.benign_link_pct && live(dst)) out.insert({src, dst, t});
    }
  }
  return out;
}

namespace {

constexpr std::size_t kCpu = 0;
constexpr std::size_t kMem = 1;
constexpr std::size_t kBw = 2;

double component(const ResourceVector& r, std::size_t k) { return k == kCpu ? r.cpu : k == kMem ? r.mem : r.bw; }

struct Forecasting {
  // One model per (flavor, resource), with a flag for whether it has seen data.
  std::vector<std::array<PredictorModel, 3>> models;
  std::vector<std::array<bool, 3>> trained;
  std::vector<std::array<std::deque<double>, 3>> history;  // per VM
};

class Engine {
 public:
  Engine(const Scenario& sc, Policy policy, const RunOptions& opt)
      : sc_(sc), policy_(policy), opt_(opt), st_(build_world(sc, policy)) {
    std::vector<ResourceVector> nominal;
    for (const Vm& v : st_.vms) nominal.push_back(v.demand);
    if (sc_.trace_path.empty()) {
      synthetic_.emplace(sc_.seed, nominal, sc_.workload);
    } else {
      traces_ = ingest_traces(sc_.trace_path);
      trace_.emplace(traces_, st_.vms.size());
      spdlog::info("trace {}: {} rows, {} dropped", sc_.trace_path, traces_.rows, traces_.dropped);
    }
    fc_.models.resize(sc_.flavors.size());
    fc_.trained.assign(sc_.flavors.size(), {false, false, false});
    for (std::size_t f = 0; f < sc_.flavors.size(); ++f) {
      for (std::size_t k = 0; k < 3; ++k) {
        PredictorConfig cfg = sc_.predictor;
        cfg.seed = stream_seed(sc_.seed ^ sc_.predictor.seed, "model", f, k);
        fc_.models[f][k] = PredictorModel::make(cfg);
      }
    }
    fc_.history.resize(st_.vms.size());
    for (const Vm& v : st_.vms) predicted_[v.id] = v.demand;
    for (const Server& s : st_.servers) total_bw_capacity_ += s.capacity.bw;
    log_.scenario = sc_.name;
    log_.policy = policy_;
    log_.seed = sc_.seed;
  }

  RunLog run() {
    for (int t = 0; t < sc_.intervals; ++t) step(t);
    summarize();
    return std::move(log_);
  }

 private:
  bool live(VmId v) const {
    return st_.vms[v.value - 1].status == VmStatus::Active && st_.placement.contains(v);
  }

  void step(int t) {
    const std::vector<ResourceVector> usage = synthetic_ ? synthetic_->step(t) : trace_->step(t);

    for (const Link& l : inject_malicious_behavior(sc_, st_, t)) {
      if (live(l.src) && live(l.dst)) st_.persistent_links.insert(l);
    }
    LinkSet links = benign_links(sc_, st_, t);
    for (const Link& l : st_.persistent_links) links.insert(l);

    std::map<VmId, int> sourced;
    for (const Link& l : st_.persistent_links) ++sourced[l.src];
    std::map<VmId, ResourceVector> observed;
    for (const auto& [v, s] : st_.placement.assignments()) {
      ResourceVector u = usage[v.value - 1];
      if (auto it = sourced.find(v); it != sourced.end()) u.bw += sc_.attack_link_bw * it->second;
      observed[v] = u;
    }

    const auto vlams = build_vlams(st_.placement, st_.servers, links);
    const auto perf = performance(observed, links);
    std::map<VmId, GuaranteedThreshold> thresholds;
    for (const auto& [v, s] : st_.placement.assignments()) thresholds[v] = st_.vms[v.value - 1].guaranteed;
    std::map<ServerId, double> scores;
    for (const Server& s : st_.servers) scores[s.id] = s.vulnerability_score;

    MonitorSnapshot snap;
    snap.interval = t;
    snap.placement = &st_.placement;
    snap.vlams = vlams;
    snap.ivcl = &st_.ivcl;
    snap.perf = &perf;
    snap.thresholds = &thresholds;
    snap.vuln_scores = &scores;
    snap.vm_owner = &st_.vm_owner;
    MonitorConfig mcfg;
    mcfg.malicious_link_threshold = sc_.malicious_threshold;
    mcfg.interval_minutes = sc_.interval_minutes;
    ThreatReport report = inspect(snap, mcfg);

    IntervalRecord rec;
    rec.observed_al_pct = authorized_link_pct(links, st_.ivcl);
    for (const Link& l : report.malicious_links) ever_malicious_.insert(l);
    for (VmId v : report.malicious_vms) flagged_.insert(v);

    if (policy_ == Policy::Oscmc && !report.empty()) {
      const auto directive = quarantine(report, st_.placement, vlams);
      apply_quarantine(directive, st_.placement, st_.persistent_links, st_.vms);
      for (VmId v : directive.suspend_vms) log_.suspended.push_back(v);
      for (auto it = links.begin(); it != links.end();) {
        const bool cut = directive.terminate_links.contains(*it) || directive.suspend_vms.contains(it->src) ||
                         directive.suspend_vms.contains(it->dst);
        it = cut ? links.erase(it) : std::next(it);
      }
      refresh_activity(st_.servers, st_.placement);
    }

    for (const Link& l : st_.persistent_links) {
      if (t - l.established_at == 1) ++log_.summary.realized_breaches;
    }

    // Committed view of this interval.
    std::map<VmId, double> obs_bw;
    std::map<VmId, double> pred_bw;
    double obs_total = 0.0;
    double pred_total = 0.0;
    for (const auto& [v, s] : st_.placement.assignments()) {
      obs_bw[v] = observed.at(v).bw;
      pred_bw[v] = policy_ == Policy::Oscmc ? predicted_.at(v).bw : st_.vms[v.value - 1].demand.bw;
      obs_total += obs_bw[v];
      pred_total += pred_bw[v];
    }

    IntervalMetrics& m = rec.metrics;
    m.interval = t;
    for (const Server& s : st_.servers) {
      if (s.active) m.ru_per_server[s.id] = ru_server(s, st_.placement);
    }
    m.active_server_count = static_cast<int>(m.ru_per_server.size());
    m.ru_dc = m.active_server_count > 0 ? ru_dc(st_.servers, st_.placement) : 0.0;
    m.pw_dc = power_dc(st_.servers, m.ru_per_server);
    m.hog_count = count_hogs(obs_bw, pred_bw, sc_.hog_threshold);
    m.authorized_link_pct = authorized_link_pct(links, st_.ivcl);
    m.theta_col = static_cast<int>(report.colocation_events.size());
    m.theta_cas = static_cast<int>(report.cascading_events.size());
    m.theta_vul = static_cast<int>(report.vulnerability_events.size());
    m.malicious_links = static_cast<int>(report.malicious_links.size());
    m.malicious_vms_cum = static_cast<int>(flagged_.size());

    std::set<ServerId> col_servers;
    for (const auto& e : report.colocation_events) col_servers.insert(e.server);
    rec.colocation_server_fraction = static_cast<double>(col_servers.size()) / static_cast<double>(st_.servers.size());
    for (const Vm& v : st_.vms) {
      if (v.status == VmStatus::Active) ++rec.active_vms;
      if (v.status == VmStatus::Suspended) ++rec.suspended_vms;
      if (v.status == VmStatus::Terminated) ++rec.terminated_vms;
    }
    rec.live_malicious_links = 0;
    for (const Link& l : links) {
      if (!st_.ivcl.is_authorized(l.src, l.dst)) ++rec.live_malicious_links;
    }

    record_history(observed);
    if (policy_ == Policy::Oscmc) {
      if (sc_.retrain_every > 0 && t % sc_.retrain_every == 0) retrain(t);
      forecast();
      CongestionThresholds thr{sc_.congestion_threshold_pct / 100.0 * total_bw_capacity_, 1.0};
      const auto state = detect_congestion(obs_total, pred_total, 1.0, thr);
      rec.congestion = state.value;
      reallocate(state, t, rec);
    }

    rec.report = std::move(report);
    spdlog::debug("{} t={} al={} hogs={} ru={}", to_string(policy_), t, m.authorized_link_pct, m.hog_count, m.ru_dc);
    log_.intervals.push_back(std::move(rec));
  }

  std::map<VmId, PerfSample> performance(const std::map<VmId, ResourceVector>& observed, const LinkSet& links) const {
    std::map<ServerId, double> server_bw;
    for (const auto& [v, s] : st_.placement.assignments()) server_bw[s] += observed.at(v).bw;
    std::map<VmId, double> exposure;
    for (const Link& l : links) {
      const auto a = st_.placement.server_of(l.src);
      const auto b = st_.placement.server_of(l.dst);
      if (!a || !b || *a != *b || st_.ivcl.is_authorized(l.src, l.dst)) continue;
      const double score = st_.servers[a->value - 1].vulnerability_score;
      if (score >= kHighRiskScore) exposure[l.dst] = std::max(exposure[l.dst], score);
    }
    std::map<VmId, PerfSample> perf;
    for (const auto& [v, s] : st_.placement.assignments()) {
      const Vm& vm = st_.vms[v.value - 1];
      const double cap = st_.servers[s.value - 1].capacity.bw;
      const double total = server_bw[s];
      double share = total > cap ? cap / total : 1.0;
      if (auto it = exposure.find(v); it != exposure.end()) share *= 1.0 - it->second / 10.0;
      const double bw = vm.demand.bw * share;
      perf[v] = PerfSample{bw, bw, sc_.interval_minutes};
    }
    return perf;
  }

  void record_history(const std::map<VmId, ResourceVector>& observed) {
    const auto cap = static_cast<std::size_t>(std::max(sc_.history_length, 1));
    for (const auto& [v, u] : observed) {
      auto& h = fc_.history[v.value - 1];
      for (std::size_t k = 0; k < 3; ++k) {
        h[k].push_back(component(u, k));
        if (h[k].size() > cap) h[k].pop_front();
      }
    }
  }

  void retrain(int t) {
    const std::size_t window = sc_.predictor.window;
    const std::size_t tasks = sc_.flavors.size() * 3;
    parallel_for(tasks, opt_.workers, [&](std::size_t task) {
      const std::size_t f = task / 3;
      const std::size_t k = task % 3;
      std::vector<WindowSample> samples;
      for (const Vm& vm : st_.vms) {
        if (vm.flavor != f || !live(vm.id)) continue;
        const auto& h = fc_.history[vm.id.value - 1][k];
        if (h.size() <= window) continue;
        const std::vector<double> series(h.begin(), h.end());
        for (auto& w : make_windows(series, window)) samples.push_back(std::move(w));
      }
      if (samples.empty()) return;
      const auto limit = static_cast<std::size_t>(std::max(sc_.predictor_max_samples, 1));
      if (samples.size() > limit) {
        std::mt19937_64 rng(stream_seed(sc_.seed, "windows", t, f, k));
        std::shuffle(samples.begin(), samples.end(), rng);
        samples.resize(limit);
      }
      fc_.models[f][k] = train(fc_.models[f][k], samples, sc_.predictor.epochs).model;
      fc_.trained[f][k] = true;
    });
  }

  void forecast() {
    const std::size_t window = sc_.predictor.window;
    std::vector<VmId> ids;
    for (const auto& [v, s] : st_.placement.assignments()) ids.push_back(v);
    std::vector<ResourceVector> out(ids.size());
    parallel_for(ids.size(), opt_.workers, [&](std::size_t i) {
      const Vm& vm = st_.vms[ids[i].value - 1];
      const auto& h = fc_.history[ids[i].value - 1];
      std::array<double, 3> p{};
      for (std::size_t k = 0; k < 3; ++k) {
        if (h[k].empty()) {
          p[k] = component(vm.demand, k);
        } else if (h[k].size() < window || !fc_.trained[vm.flavor][k]) {
          p[k] = h[k].back();  // persistence until a model exists
        } else {
          const std::vector<double> recent(h[k].end() - static_cast<std::ptrdiff_t>(window), h[k].end());
          p[k] = oscmc::predict(fc_.models[vm.flavor][k], recent);
        }
      }
      out[i] = {p[0], p[1], p[2]};
    });
    for (std::size_t i = 0; i < ids.size(); ++i) predicted_[ids[i]] = out[i];
  }

  void reallocate(const CongestionState& state, int t, IntervalRecord& rec) {
    std::vector<PlacementRequest> requests;
    std::vector<double> points;
    for (const auto& [v, s] : st_.placement.assignments()) {
      requests.push_back({v, st_.vms[v.value - 1].demand, predicted_.at(v).bw});
      points.push_back(predicted_.at(v).bw);
    }
    if (requests.empty()) return;
    const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(std::max(sc_.clusters, 1)), points.size());
    KMeansOptions ko;
    ko.restarts = sc_.kmeans_restarts;
    const auto clusters = kmeans(points, n, stream_seed(sc_.seed, "kmeans-interval", t), ko);
    rec.centroids = clusters.centroids;
    rec.cluster_sizes.assign(n, 0);
    for (std::size_t c : clusters.membership) ++rec.cluster_sizes[c];
    if (t == 0 || state.value == CongestionValue::Normal) return;
    auto result = rebalance(state, st_.placement, st_.servers, requests, clusters);
    spdlog::debug("rebalance t={} diverted={} emptied={}", t, result.diverted.size(), result.emptied.size());
    st_.placement = std::move(result.placement);
    refresh_activity(st_.servers, st_.placement);
  }

  void summarize() {
    RunSummary& s = log_.summary;
    if (!log_.intervals.empty()) {
      s.final_al_pct = log_.intervals.back().metrics.authorized_link_pct;
      double ru = 0.0;
      double hogs = 0.0;
      for (const auto& r : log_.intervals) {
        s.total_kwh += r.metrics.pw_dc * (sc_.interval_minutes / 60.0) / 1000.0;
        ru += r.metrics.ru_dc;
        hogs += r.metrics.hog_count;
      }
      const auto n = static_cast<double>(log_.intervals.size());
      s.mean_ru_pct = 100.0 * ru / n;
      s.mean_hogs = hogs / n;
      s.suspended_vms = log_.intervals.back().suspended_vms;
      s.terminated_vms = log_.intervals.back().terminated_vms;
    }
    s.malicious_links_total = static_cast<int>(ever_malicious_.size());
  }

  const Scenario& sc_;
  Policy policy_;
  RunOptions opt_;
  SimState st_;
  std::optional<SyntheticWorkload> synthetic_;
  TraceSet traces_;
  std::optional<TraceWorkload> trace_;
  Forecasting fc_;
  std::map<VmId, ResourceVector> predicted_;  // for the current interval
  double total_bw_capacity_ = 0.0;
  LinkSet ever_malicious_;
  std::set<VmId> flagged_;
  RunLog log_;
};

}  // namespace

RunLog run(const Scenario& scenario, Policy policy, const RunOptions& options) {
  Engine engine(scenario, policy, options);
  return engine.run();
}

RunLog wosc_run(const Scenario& scenario, const RunOptions& options) { return run(scenario, Policy::Wosc, options); }

}  // namespace oscmc
