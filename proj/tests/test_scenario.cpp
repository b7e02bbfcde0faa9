#include <doctest.h>

#include <fstream>

#include "harness.hpp"
#include "oscmc/scenario.hpp"

using namespace oscmc;

TEST_CASE("every preset parses and validates") {
  for (const auto& name : preset_names()) {
    CAPTURE(name);
    const Scenario s = load_scenario(name);
    CHECK(s.name == name);
    CHECK_NOTHROW(validate(s));
  }
  CHECK(preset_text("nope").empty());
}

TEST_CASE("size presets scale servers with VMs") {
  const Scenario s = load_scenario("xi500");
  CHECK(s.vms == 500);
  CHECK(s.servers == 250);
  CHECK(s.malicious_pct == 20.0);
  CHECK(s.effective_users() == 166);
  CHECK(s.malicious_user_count() == 33);
}

TEST_CASE("illustration preset contents") {
  const Scenario s = load_scenario("illustration");
  CHECK(s.servers == 5);
  CHECK(s.vms == 15);
  CHECK(s.effective_users() == 4);
  CHECK(s.malicious_users == std::vector<UserId>{UserId(3)});
  CHECK(s.explicit_placement.at(ServerId(1)) == std::vector<VmId>{VmId(1), VmId(3), VmId(11)});
  CHECK(s.vulnerability == std::vector<double>{2, 5, 8, 3, 6});
  CHECK(s.scripted_attacks.size() == 11);
}

TEST_CASE("keys, comments and overrides") {
  const Scenario s = parse_scenario(R"(
    name = tiny   # trailing comment
    servers = 2
    vms = 4
    flavor = 100 100 100
    flavor = 200 200 200
    power = 60 100 200
    predictor.window = 3
    predictor.lr = 0.1
    workload.burst_pct = 0
    attack = 1>2 @4
  )");
  CHECK(s.name == "tiny");
  CHECK(s.flavors.size() == 2);
  CHECK(s.flavors[1].bw == 200.0);
  CHECK(s.power.idle == 60.0);
  CHECK(s.predictor.window == 3);
  CHECK(s.predictor.learning_rate == 0.1);
  CHECK(s.workload.burst_pct == 0.0);
  REQUIRE(s.scripted_attacks.size() == 1);
  CHECK(s.scripted_attacks[0].at == 4);
}

TEST_CASE("defaults match the documented values") {
  const Scenario s = parse_scenario("servers = 1\nvms = 1\n");
  CHECK(s.hog_threshold == 0.5);
  CHECK(s.congestion_threshold_pct == 10.0);
  CHECK(s.malicious_threshold == 1);
  CHECK(s.clusters == 3);
  CHECK(s.kmeans_restarts == 10);
  CHECK(s.predictor.window == 6);
  CHECK(s.predictor.learning_rate == 0.05);
  CHECK(s.predictor.epochs == 200);
  CHECK(s.power.idle == 70.0);
  CHECK(s.power.min == 105.0);
  CHECK(s.power.max == 250.0);
  CHECK(s.effective_users() == 1);
  CHECK(s.malicious_user_count() == 0);
}

TEST_CASE("explicit users set the VM count") {
  const Scenario s = parse_scenario("servers = 1\nuser = 1: 1 2\nuser = 2: 3\n");
  CHECK(s.vms == 3);
  CHECK(s.effective_users() == 2);
}

TEST_CASE("malformed input names the line") {
  CHECK_THROWS_WITH_AS(parse_scenario("servers = 1\nvms = two\n"), "line 2: expected a number, got 'two'",
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_scenario("servers 1\n"), "line 1: expected 'key = value'", ConfigError);
  CHECK_THROWS_WITH_AS(parse_scenario("colour = red\n"), "line 1: unknown key 'colour'", ConfigError);
  CHECK_THROWS_WITH_AS(parse_scenario("servers = 1\nvms = 2\nattack = 1-2\n"), "line 3: expected 'src>dst'",
                       ConfigError);
  CHECK_THROWS_AS(parse_scenario("flavor_policy = sometimes\n"), ConfigError);
}

TEST_CASE("validation rejects inconsistent scenarios") {
  auto bad = [](const std::string& text, const std::string& what) {
    CAPTURE(text);
    CHECK_THROWS_WITH_AS(parse_scenario(text), doctest::Contains(what.c_str()), ConfigError);
  };
  bad("servers = 0\nvms = 1\n", "servers must be >= 1");
  bad("servers = 1\nvms = 0\n", "vms must be >= 1");
  bad("servers = 1\nvms = 1\nmalicious_pct = 120\n", "malicious_pct must be in [0, 100]");
  bad("servers = 1\nvms = 1\nattack_rate = 2\n", "attack_rate must be in [0, 1]");
  bad("servers = 2\nvms = 1\nvulnerability = 3\n", "one score per server");
  bad("servers = 1\nvms = 1\nvulnerability = 11\n", "[0, 10]");
  bad("servers = 1\nvms = 1\npower = 100 90 200\n", "idle <= min <= max");
  bad("servers = 1\nvms = 3\nuser = 1: 1 2\n", "own every VM exactly once");
  bad("servers = 1\nvms = 2\nuser = 1: 1 1\nuser = 2: 2\n", "listed twice");
  bad("servers = 1\nvms = 2\nuser = 2: 1 2\n", "contiguous");
  bad("servers = 1\nvms = 2\nplace = 3: 1\n", "unknown server");
  bad("servers = 1\nvms = 2\nlink = 1>1\n", "endpoints must differ");
  bad("servers = 1\nvms = 2\nlink = 1>5\n", "unknown VM");
  bad("servers = 1\nvms = 2\nmalicious_users = 4\n", "does not exist");
  bad("servers = 1\nvms = 2\nhistory_length = 3\n", "history_length");
}

TEST_CASE("scenario files load from disk") {
  const auto dir = harness::scratch_dir("scenario");
  {
    std::ofstream f(dir / "s.scn");
    f << "name = disk\nservers = 3\nvms = 6\n";
  }
  CHECK(load_scenario((dir / "s.scn").string()).name == "disk");
  CHECK_THROWS_WITH_AS(load_scenario((dir / "missing.scn").string()), doctest::Contains("scenario not found"),
                       ConfigError);
}

TEST_CASE("policy names round trip") {
  for (Policy p : {Policy::Oscmc, Policy::Pssf, Policy::Wosc}) CHECK(parse_policy(to_string(p)) == p);
  CHECK_THROWS_WITH_AS(parse_policy("best"), "unknown policy 'best' (expected oscmc, pssf or wosc)", ConfigError);
}

TEST_CASE("shipped scenario files parse") {
  const auto dir = harness::data_dir().parent_path().parent_path() / "scenarios";
  int n = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.path().extension() != ".scn") continue;
    CAPTURE(e.path().string());
    CHECK_NOTHROW(load_scenario(e.path().string()));
    ++n;
  }
  CHECK(n >= 3);
  const Scenario file = load_scenario((dir / "illustration.scn").string());
  const Scenario preset = load_scenario("illustration");
  CHECK(file.explicit_placement == preset.explicit_placement);
  CHECK(file.scripted_attacks.size() == preset.scripted_attacks.size());
}
