#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "oscmc/dc_model.hpp"
#include "oscmc/predictor.hpp"

namespace oscmc {

/// Malformed or invalid scenario/configuration input.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Policy { Oscmc, Pssf, Wosc };

std::string to_string(Policy p);
Policy parse_policy(const std::string& name);

enum class FlavorPolicy { Random, First, Alternate };

struct ScriptedLink {
  VmId src;
  VmId dst;
  int at = 0;
};

struct WorkloadConfig {
  double level_lo = 0.4;  // initial usage as a fraction of nominal demand
  double level_hi = 0.8;
  double walk_sigma = 0.03;
  double level_floor = 0.1;
  double level_cap = 1.0;
  double burst_pct = 5.0;  // chance per interval that an idle VM starts a burst
  int burst_min_len = 3;
  int burst_max_len = 8;
  double burst_mult_lo = 2.0;
  double burst_mult_hi = 3.5;
};

struct Scenario {
  std::string name = "custom";
  int servers = 0;
  int vms = 0;
  int users = 0;  // 0: one third of the VM count
  double malicious_pct = 0.0;
  std::vector<UserId> malicious_users;  // explicit list overrides malicious_pct
  int intervals = 50;
  std::uint64_t seed = 1;

  ResourceVector server_capacity{2000.0, 2048.0, 10000.0};
  PowerProfile power;
  std::vector<ResourceVector> flavors{{500.0, 512.0, 1000.0}, {1000.0, 1024.0, 1000.0}};
  FlavorPolicy flavor_policy = FlavorPolicy::Random;
  std::vector<double> vulnerability;  // empty: uniform random in [0, 10]
  int reserved_every = 10;            // one hog server per this many servers, 0 disables

  double cross_grant_pct = 5.0;
  double benign_link_pct = 20.0;
  double attack_rate = 0.5;
  int attack_cross_targets = 2;
  double attack_link_bw = 500.0;
  int attack_max_links = 8;
  int burst_period = 10;

  double hog_threshold = 0.5;
  double congestion_threshold_pct = 10.0;
  int malicious_threshold = 1;
  double guarantee_pct = 10.0;
  double interval_minutes = 5.0;

  int clusters = 3;
  int kmeans_restarts = 10;
  PredictorConfig predictor;
  int predictor_max_samples = 256;
  int retrain_every = 1;
  int history_length = 48;

  WorkloadConfig workload;
  std::string trace_path;  // empty: synthetic workload

  std::map<UserId, std::vector<VmId>> explicit_users;
  std::map<ServerId, std::vector<VmId>> explicit_placement;
  std::vector<ScriptedLink> scripted_links;    // authorized traffic, every interval
  std::vector<ScriptedLink> scripted_attacks;  // injected once at `at`

  [[nodiscard]] int effective_users() const;
  [[nodiscard]] int malicious_user_count() const;
};

/// Parses the key = value scenario text format (see docs/formats.md).
Scenario parse_scenario(const std::string& text);

/// Resolves a preset name or reads a scenario file.
Scenario load_scenario(const std::string& path_or_preset);

/// Throws ConfigError on violated invariants.
void validate(const Scenario& scenario);

/// Built-in scenario text for a preset, empty if unknown.
std::string preset_text(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace oscmc
