#include <doctest.h>

#include <algorithm>
#include <random>

#include "harness.hpp"
#include "oracles.hpp"
#include "oscmc/engine.hpp"
#include "oscmc/link_monitor.hpp"

using namespace oscmc;

namespace {

struct Illustration {
  SimState st;
  LinkSet links;
  std::vector<Vlam> vlams;
};

Illustration illustration() {
  const Scenario sc = load_scenario("illustration");
  Illustration il{build_world(sc, Policy::Oscmc), {}, {}};
  for (const auto& l : sc.scripted_links) il.links.insert({l.src, l.dst, 0});
  for (const auto& l : sc.scripted_attacks) il.links.insert({l.src, l.dst, 0});
  il.vlams = build_vlams(il.st.placement, il.st.servers, il.links);
  return il;
}

oracle::Instance as_instance(const Illustration& il) {
  oracle::Instance in;
  in.servers = il.st.servers;
  in.vms = il.st.vms;
  in.placement = il.st.placement;
  in.ivcl = il.st.ivcl;
  in.links = il.links;
  in.owner = il.st.vm_owner;
  return in;
}

VmId V(std::uint32_t v) { return VmId(v); }

}  // namespace

TEST_CASE("classification follows the directed allowlist") {
  Ivcl ivcl;
  ivcl.authorize(V(1), V(3));
  ivcl.register_vm(V(8));
  CHECK(classify_link({V(1), V(3), 0}, ivcl).value == 0);
  CHECK(classify_link({V(3), V(1), 0}, ivcl).value == 1);
  CHECK(classify_link({V(8), V(1), 0}, ivcl).value == 1);
  CHECK_THROWS_WITH_AS(classify_link({V(1), V(42), 0}, ivcl), "unregistered VM 42", UnregisteredVm);
}

TEST_CASE("illustration attacker links are all unauthorized") {
  const auto il = illustration();
  for (const auto& l : load_scenario("illustration").scripted_attacks) {
    CHECK(classify_link({l.src, l.dst, 0}, il.st.ivcl).value == 1);
  }
}

TEST_CASE("illustration colocation hits exactly servers 1, 3 and 5") {
  const auto il = illustration();
  const auto events = detect_colocation(il.st.placement, il.vlams, il.st.ivcl);
  std::set<std::uint32_t> servers;
  for (const auto& e : events) servers.insert(e.server.value);
  CHECK(servers == std::set<std::uint32_t>{1, 3, 5});
  CHECK(static_cast<double>(servers.size()) / il.st.servers.size() == doctest::Approx(0.6));
}

TEST_CASE("illustration cascades reach every benign user") {
  const auto il = illustration();
  const auto events = detect_cascading(il.st.placement, il.vlams, il.st.ivcl);
  REQUIRE_FALSE(events.empty());
  std::set<std::uint32_t> reached;
  for (const auto& e : events) reached.insert(il.st.vm_owner.at(e.target).value);
  for (std::uint32_t u : {1u, 2u, 4u}) CHECK(reached.count(u) == 1);
}

TEST_CASE("illustration breach counts land on the benign users") {
  const auto il = illustration();
  const auto report = harness::inspect_instance(as_instance(il));
  for (std::uint32_t u : {1u, 2u, 4u}) CHECK(report.theta_dc_per_user.at(UserId(u)) > 0);
  CHECK(report.malicious_vms == std::set<VmId>{V(8), V(9), V(10), V(11)});
  const std::vector<VmId> attackers{V(8), V(9), V(10), V(11)};
  const double cov = attack_coverage(attackers, std::span<const ThreatReport>(&report, 1));
  CHECK(cov >= 1.0);
  CHECK(cov == doctest::Approx(11.0 / 4.0));
  CHECK(report.coverage_per_attacker.at(UserId(3)) == doctest::Approx(11.0 / 4.0));
}

TEST_CASE("illustration quarantine suspends the four attackers and cuts their links") {
  auto il = illustration();
  const auto report = harness::inspect_instance(as_instance(il));
  const auto d = quarantine(report, il.st.placement, il.vlams);
  CHECK(d.suspend_vms == std::set<VmId>{V(8), V(9), V(10), V(11)});
  for (const Link& l : report.malicious_links) CHECK(d.terminate_links.count(l) == 1);
  apply_quarantine(d, il.st.placement, il.links, il.st.vms);
  for (std::uint32_t v = 8; v <= 11; ++v) {
    CHECK(il.st.vms[v - 1].status == VmStatus::Suspended);
    CHECK_FALSE(il.st.placement.contains(V(v)));
  }
  for (const Link& l : il.links) CHECK(il.st.ivcl.is_authorized(l.src, l.dst));
}

TEST_CASE("clean traffic produces no events") {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 50; ++k) {
    auto in = oracle::random_instance(rng);
    for (const Link& l : in.links) in.ivcl.authorize(l.src, l.dst);
    const auto r = harness::inspect_instance(in);
    CHECK(r.colocation_events.empty());
    CHECK(r.cascading_events.empty());
    CHECK(r.malicious_links.empty());
    CHECK(r.empty());
  }
}

TEST_CASE("a single server admits no cascading path") {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 20; ++k) {
    auto in = oracle::random_instance(rng, 10, 1);
    const auto vlams = build_vlams(in.placement, in.servers, in.links);
    CHECK(detect_cascading(in.placement, vlams, in.ivcl).empty());
  }
}

TEST_CASE("detectors agree with brute-force enumeration on random instances") {
  std::mt19937_64 rng(2024);
  for (int k = 0; k < 200; ++k) {
    const auto in = oracle::random_instance(rng, 10, 3);
    const auto vlams = build_vlams(in.placement, in.servers, in.links);

    std::set<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>> col;
    for (const auto& e : detect_colocation(in.placement, vlams, in.ivcl)) {
      col.insert({e.server.value, e.src.value, e.dst.value});
    }
    CHECK(col == oracle::colocation(in));

    std::set<oracle::Triple> cas;
    for (const auto& e : detect_cascading(in.placement, vlams, in.ivcl)) {
      cas.insert({e.origin.value, e.relay.value, e.target.value, e.origin_server.value, e.target_server.value});
    }
    CHECK(cas == oracle::cascading(in));

    for (const Vm& v : in.vms) {
      std::set<std::pair<std::uint32_t, std::uint32_t>> got;
      for (const Link& l : malicious_links(v.id, vlams, in.ivcl)) got.insert({l.src.value, l.dst.value});
      CHECK(got == oracle::malicious(in, v.id));
    }
  }
}

TEST_CASE("every link in a VLAM touches that server") {
  std::mt19937_64 rng(9);
  for (int k = 0; k < 50; ++k) {
    const auto in = oracle::random_instance(rng);
    for (const Vlam& v : build_vlams(in.placement, in.servers, in.links)) {
      for (const Link& l : v.links) {
        CHECK((in.placement.server_of(l.src) == v.server || in.placement.server_of(l.dst) == v.server));
      }
    }
  }
}

TEST_CASE("vulnerability needs both throughput and bandwidth below threshold") {
  Placement p;
  p.place(V(1), ServerId(1), {1, 1, 1000});
  const std::map<VmId, GuaranteedThreshold> th{{V(1), {100, 100}}};
  const std::map<ServerId, double> low{{ServerId(1), 3.0}};
  const std::map<ServerId, double> high{{ServerId(1), 7.0}};
  auto run = [&](double tp, double bw, const std::map<ServerId, double>& scores) {
    const std::map<VmId, PerfSample> perf{{V(1), {tp, bw, 5.0}}};
    return detect_vulnerability(perf, th, p, scores, 5.0);
  };
  CHECK(run(150, 150, low).empty());
  CHECK(run(150, 50, low).empty());
  CHECK(run(50, 150, low).empty());
  const auto ev = run(50, 50, low);
  REQUIRE(ev.size() == 1);
  CHECK_FALSE(ev[0].high_risk);
  CHECK(run(50, 50, high)[0].high_risk);
  // exactly at the threshold is not below it
  CHECK(run(100, 100, low).empty());
}

TEST_CASE("vulnerability detection rejects missing or short telemetry") {
  Placement p;
  p.place(V(1), ServerId(1), {1, 1, 1000});
  const std::map<VmId, GuaranteedThreshold> th{{V(1), {100, 100}}};
  const std::map<ServerId, double> scores;
  CHECK_THROWS_AS(detect_vulnerability({}, th, p, scores, 5.0), IncompleteTelemetry);
  const std::map<VmId, PerfSample> shortp{{V(1), {1, 1, 2.5}}};
  CHECK_THROWS_WITH(detect_vulnerability(shortp, th, p, scores, 5.0), "incomplete telemetry for VM 1");
}

TEST_CASE("breach aggregation counts events per victim owner") {
  const std::map<VmId, UserId> owner{{V(1), UserId(1)}, {V(2), UserId(1)}, {V(3), UserId(2)}, {V(4), UserId(3)}};
  auto zeros = aggregate_breaches({}, {}, {}, owner);
  for (const auto& [u, n] : zeros) CHECK(n == 0);
  CHECK(zeros.size() == 3);

  const std::vector<ColocationEvent> col{{ServerId(1), V(4), V(1)}, {ServerId(1), V(4), V(2)}};
  const std::vector<CascadingEvent> cas{{V(3), V(4), V(2), ServerId(1), ServerId(2)}};
  const auto theta = aggregate_breaches(col, cas, {}, owner);
  CHECK(theta.at(UserId(1)) == 3);
  CHECK(theta.at(UserId(2)) == 0);
  int total = 0;
  for (const auto& [u, n] : theta) total += n;
  CHECK(total == 3);
}

TEST_CASE("malicious links are observed minus authorized") {
  Ivcl ivcl;
  ivcl.authorize(V(1), V(2));
  ivcl.register_vm(V(3));
  ivcl.register_vm(V(4));
  const std::vector<Vlam> vlams{{ServerId(1), {{V(1), V(2), 0}, {V(1), V(3), 0}}}, {ServerId(2), {{V(1), V(4), 0}}}};
  const auto bad = malicious_links(V(1), vlams, ivcl);
  CHECK(bad.size() == 2);
  CHECK(bad.count({V(1), V(3), 0}) == 1);
  CHECK(bad.count({V(1), V(4), 0}) == 1);
  ivcl.authorize(V(1), V(3));
  ivcl.authorize(V(1), V(4));
  CHECK(malicious_links(V(1), vlams, ivcl).empty());
}

TEST_CASE("attack coverage arithmetic") {
  const std::vector<VmId> attackers{V(1), V(2), V(3), V(4)};
  CHECK(attack_coverage(attackers, {}) == 0.0);
  ThreatReport r;
  for (std::uint32_t d = 10; d < 16; ++d) r.malicious_links.insert({V(1 + d % 2), V(d), 0});
  r.malicious_links.insert({V(50), V(60), 0});  // someone else's link
  CHECK(attack_coverage(attackers, std::span<const ThreatReport>(&r, 1)) == doctest::Approx(1.5));
  CHECK_THROWS_WITH_AS(attack_coverage({}, {}), doctest::Contains("undefined coverage"), std::domain_error);
}

TEST_CASE("empty report gives an empty directive") {
  Placement p;
  CHECK(quarantine(ThreatReport{}, p, {}).empty());
}

TEST_CASE("broadcast set covers every server hosting an endpoint") {
  std::mt19937_64 rng(77);
  for (int k = 0; k < 50; ++k) {
    const auto in = oracle::random_instance(rng);
    const auto vlams = build_vlams(in.placement, in.servers, in.links);
    const auto r = harness::inspect_instance(in);
    const auto d = quarantine(r, in.placement, vlams);
    for (const Link& l : d.terminate_links) {
      CHECK(d.broadcast_servers.count(*in.placement.server_of(l.src)) == 1);
      CHECK(d.broadcast_servers.count(*in.placement.server_of(l.dst)) == 1);
    }
  }
}

TEST_CASE("re-detection after quarantine is empty") {
  std::mt19937_64 rng(31337);
  for (int k = 0; k < 200; ++k) {
    auto in = oracle::random_instance(rng);
    const auto vlams = build_vlams(in.placement, in.servers, in.links);
    const auto r = harness::inspect_instance(in);
    apply_quarantine(quarantine(r, in.placement, vlams), in.placement, in.links, in.vms);
    CHECK(harness::inspect_instance(in).empty());
    for (const Vm& v : in.vms) {
      if (v.status != VmStatus::Suspended) continue;
      for (const Link& l : in.links) CHECK((l.src != v.id && l.dst != v.id));
    }
  }
}

TEST_CASE("higher thresholds flag fewer VMs but keep every malicious link") {
  std::mt19937_64 rng(8);
  for (int k = 0; k < 50; ++k) {
    const auto in = oracle::random_instance(rng);
    const auto r1 = harness::inspect_instance(in, 1);
    const auto r3 = harness::inspect_instance(in, 3);
    CHECK(r3.malicious_vms.size() <= r1.malicious_vms.size());
    CHECK(std::includes(r1.malicious_vms.begin(), r1.malicious_vms.end(), r3.malicious_vms.begin(),
                        r3.malicious_vms.end()));
    CHECK(r1.malicious_links.size() == r3.malicious_links.size());
  }
}

TEST_CASE("authorizing a link never increases any count") {
  std::mt19937_64 rng(123);
  for (int k = 0; k < 100; ++k) {
    auto in = oracle::random_instance(rng);
    const auto before = harness::inspect_instance(in);
    if (in.links.empty()) continue;
    auto it = in.links.begin();
    std::advance(it, std::uniform_int_distribution<std::size_t>(0, in.links.size() - 1)(rng));
    in.ivcl.authorize(it->src, it->dst);
    const auto after = harness::inspect_instance(in);
    CHECK(after.colocation_events.size() <= before.colocation_events.size());
    CHECK(after.cascading_events.size() <= before.cascading_events.size());
    CHECK(after.malicious_links.size() <= before.malicious_links.size());
  }
}

TEST_CASE("reports do not depend on ground-truth flags") {
  // The monitor takes no user records, so two worlds that differ only in
  // which user is marked malicious give identical reports.
  Scenario sc = load_scenario("illustration");
  const auto a = build_world(sc, Policy::Oscmc);
  sc.malicious_users = {UserId(1)};
  const auto b = build_world(sc, Policy::Oscmc);
  LinkSet links;
  for (const auto& l : sc.scripted_attacks) links.insert({l.src, l.dst, 0});
  auto report = [&](const SimState& st) {
    oracle::Instance in;
    in.servers = st.servers;
    in.vms = st.vms;
    in.placement = st.placement;
    in.ivcl = st.ivcl;
    in.links = links;
    in.owner = st.vm_owner;
    return harness::inspect_instance(in);
  };
  const auto ra = report(a);
  const auto rb = report(b);
  CHECK(ra.colocation_events == rb.colocation_events);
  CHECK(ra.cascading_events == rb.cascading_events);
  CHECK(ra.malicious_vms == rb.malicious_vms);
  CHECK(ra.theta_dc_per_user == rb.theta_dc_per_user);
}
