#include "oscmc/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace oscmc {

std::string to_string(Policy p) {
  switch (p) {
    case Policy::Oscmc:
      return "oscmc";
    case Policy::Pssf:
      return "pssf";
    case Policy::Wosc:
      return "wosc";
  }
  return "unknown";
}

Policy parse_policy(const std::string& name) {
  if (name == "oscmc") return Policy::Oscmc;
  if (name == "pssf") return Policy::Pssf;
  if (name == "wosc") return Policy::Wosc;
  throw ConfigError("unknown policy '" + name + "' (expected oscmc, pssf or wosc)");
}

int Scenario::effective_users() const {
  if (!explicit_users.empty()) return static_cast<int>(explicit_users.size());
  if (users > 0) return users;
  return std::max(1, vms / 3);
}

int Scenario::malicious_user_count() const {
  if (!malicious_users.empty()) return static_cast<int>(malicious_users.size());
  if (malicious_pct <= 0.0) return 0;
  const int m = effective_users();
  const auto n = static_cast<int>(std::llround(m * malicious_pct / 100.0));
  return std::clamp(n, 1, m);
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

struct LineError {
  int line;
  std::string message;
};

template <class T>
T number(const std::string& token, int line) {
  T value{};
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ConfigError("line " + std::to_string(line) + ": expected a number, got '" + token + "'");
  }
  return value;
}

std::vector<std::string> words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

template <class T>
std::vector<T> numbers(const std::string& s, int line) {
  std::vector<T> out;
  for (const auto& w : words(s)) out.push_back(number<T>(w, line));
  return out;
}

ResourceVector triple(const std::string& s, int line) {
  const auto v = numbers<double>(s, line);
  if (v.size() != 3) throw ConfigError("line " + std::to_string(line) + ": expected three values cpu mem bw");
  return {v[0], v[1], v[2]};
}

// "<id>: a b c"
template <class Key>
std::pair<Key, std::vector<VmId>> keyed_list(const std::string& s, int line) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw ConfigError("line " + std::to_string(line) + ": expected '<id>: <vm ids>'");
  const auto key = number<std::uint32_t>(trim(s.substr(0, colon)), line);
  std::vector<VmId> vms;
  for (auto v : numbers<std::uint32_t>(s.substr(colon + 1), line)) vms.emplace_back(v);
  return {Key(key), vms};
}

// "a>b" optionally followed by "@t"
ScriptedLink link_spec(const std::string& s, int line) {
  const auto parts = words(s);
  if (parts.empty() || parts.size() > 2) throw ConfigError("line " + std::to_string(line) + ": expected 'src>dst [@t]'");
  const auto gt = parts[0].find('>');
  if (gt == std::string::npos) throw ConfigError("line " + std::to_string(line) + ": expected 'src>dst'");
  ScriptedLink l;
  l.src = VmId(number<std::uint32_t>(parts[0].substr(0, gt), line));
  l.dst = VmId(number<std::uint32_t>(parts[0].substr(gt + 1), line));
  if (parts.size() == 2) {
    if (parts[1].empty() || parts[1][0] != '@') throw ConfigError("line " + std::to_string(line) + ": expected '@t'");
    l.at = number<int>(parts[1].substr(1), line);
  }
  return l;
}

using Setter = std::function<void(Scenario&, const std::string&, int)>;

template <class T>
Setter field(T Scenario::*member) {
  return [member](Scenario& s, const std::string& v, int line) { s.*member = number<T>(v, line); };
}

template <class T>
Setter predictor_field(T PredictorConfig::*member) {
  return [member](Scenario& s, const std::string& v, int line) { s.predictor.*member = number<T>(v, line); };
}

template <class T>
Setter workload_field(T WorkloadConfig::*member) {
  return [member](Scenario& s, const std::string& v, int line) { s.workload.*member = number<T>(v, line); };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"name", [](Scenario& s, const std::string& v, int) { s.name = v; }},
      {"servers", field(&Scenario::servers)},
      {"vms", field(&Scenario::vms)},
      {"users", field(&Scenario::users)},
      {"malicious_pct", field(&Scenario::malicious_pct)},
      {"intervals", field(&Scenario::intervals)},
      {"seed", field(&Scenario::seed)},
      {"reserved_every", field(&Scenario::reserved_every)},
      {"cross_grant_pct", field(&Scenario::cross_grant_pct)},
      {"benign_link_pct", field(&Scenario::benign_link_pct)},
      {"attack_rate", field(&Scenario::attack_rate)},
      {"attack_cross_targets", field(&Scenario::attack_cross_targets)},
      {"attack_link_bw", field(&Scenario::attack_link_bw)},
      {"attack_max_links", field(&Scenario::attack_max_links)},
      {"burst_period", field(&Scenario::burst_period)},
      {"hog_threshold", field(&Scenario::hog_threshold)},
      {"congestion_threshold_pct", field(&Scenario::congestion_threshold_pct)},
      {"malicious_threshold", field(&Scenario::malicious_threshold)},
      {"guarantee_pct", field(&Scenario::guarantee_pct)},
      {"interval_minutes", field(&Scenario::interval_minutes)},
      {"clusters", field(&Scenario::clusters)},
      {"kmeans_restarts", field(&Scenario::kmeans_restarts)},
      {"predictor_max_samples", field(&Scenario::predictor_max_samples)},
      {"retrain_every", field(&Scenario::retrain_every)},
      {"history_length", field(&Scenario::history_length)},
      {"predictor.window", predictor_field(&PredictorConfig::window)},
      {"predictor.hidden", predictor_field(&PredictorConfig::hidden)},
      {"predictor.lr", predictor_field(&PredictorConfig::learning_rate)},
      {"predictor.epochs", predictor_field(&PredictorConfig::epochs)},
      {"workload.level_lo", workload_field(&WorkloadConfig::level_lo)},
      {"workload.level_hi", workload_field(&WorkloadConfig::level_hi)},
      {"workload.walk_sigma", workload_field(&WorkloadConfig::walk_sigma)},
      {"workload.burst_pct", workload_field(&WorkloadConfig::burst_pct)},
      {"workload.burst_min_len", workload_field(&WorkloadConfig::burst_min_len)},
      {"workload.burst_max_len", workload_field(&WorkloadConfig::burst_max_len)},
      {"workload.burst_mult_lo", workload_field(&WorkloadConfig::burst_mult_lo)},
      {"workload.burst_mult_hi", workload_field(&WorkloadConfig::burst_mult_hi)},
      {"trace", [](Scenario& s, const std::string& v, int) { s.trace_path = v == "synthetic" ? "" : v; }},
      {"server_capacity", [](Scenario& s, const std::string& v, int l) { s.server_capacity = triple(v, l); }},
      {"power",
       [](Scenario& s, const std::string& v, int l) {
         const auto p = numbers<double>(v, l);
         if (p.size() != 3) throw ConfigError("line " + std::to_string(l) + ": power expects idle min max");
         s.power = {p[0], p[1], p[2]};
       }},
      {"flavor_policy",
       [](Scenario& s, const std::string& v, int l) {
         if (v == "random") {
           s.flavor_policy = FlavorPolicy::Random;
         } else if (v == "first") {
           s.flavor_policy = FlavorPolicy::First;
         } else if (v == "alternate") {
           s.flavor_policy = FlavorPolicy::Alternate;
         } else {
           throw ConfigError("line " + std::to_string(l) + ": unknown flavor_policy '" + v + "'");
         }
       }},
      {"vulnerability",
       [](Scenario& s, const std::string& v, int l) {
         s.vulnerability = v == "random" ? std::vector<double>{} : numbers<double>(v, l);
       }},
      {"malicious_users",
       [](Scenario& s, const std::string& v, int l) {
         s.malicious_users.clear();
         for (auto u : numbers<std::uint32_t>(v, l)) s.malicious_users.emplace_back(u);
       }},
      {"user",
       [](Scenario& s, const std::string& v, int l) {
         auto [u, vms] = keyed_list<UserId>(v, l);
         s.explicit_users[u] = vms;
       }},
      {"place",
       [](Scenario& s, const std::string& v, int l) {
         auto [sid, vms] = keyed_list<ServerId>(v, l);
         s.explicit_placement[sid] = vms;
       }},
      {"link", [](Scenario& s, const std::string& v, int l) { s.scripted_links.push_back(link_spec(v, l)); }},
      {"attack", [](Scenario& s, const std::string& v, int l) { s.scripted_attacks.push_back(link_spec(v, l)); }},
  };
  return table;
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  Scenario s;
  bool custom_flavors = false;
  std::istringstream in(text);
  int line_no = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "flavor") {
      if (!custom_flavors) s.flavors.clear();
      custom_flavors = true;
      s.flavors.push_back(triple(value, line_no));
      continue;
    }
    auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    it->second(s, value, line_no);
  }
  if (!s.explicit_users.empty() && s.vms == 0) {
    for (const auto& [u, vms] : s.explicit_users) s.vms += static_cast<int>(vms.size());
  }
  validate(s);
  return s;
}

void validate(const Scenario& s) {
  auto fail = [](const std::string& m) { throw ConfigError("invalid scenario: " + m); };
  if (s.servers < 1) fail("servers must be >= 1");
  if (s.vms < 1) fail("vms must be >= 1");
  if (s.intervals < 1) fail("intervals must be >= 1");
  if (s.effective_users() < 1) fail("users must be >= 1");
  for (auto [name, v] : {std::pair{"malicious_pct", s.malicious_pct}, {"cross_grant_pct", s.cross_grant_pct},
                         {"benign_link_pct", s.benign_link_pct}, {"congestion_threshold_pct", s.congestion_threshold_pct},
                         {"guarantee_pct", s.guarantee_pct}, {"workload.burst_pct", s.workload.burst_pct}}) {
    if (v < 0.0 || v > 100.0) fail(std::string(name) + " must be in [0, 100]");
  }
  if (s.attack_rate < 0.0 || s.attack_rate > 1.0) fail("attack_rate must be in [0, 1]");
  if (s.flavors.empty()) fail("at least one VM flavor is required");
  for (const auto& f : s.flavors) {
    if (!f.non_negative()) fail("flavor demands must be non-negative");
  }
  if (!s.server_capacity.non_negative()) fail("server capacity must be non-negative");
  if (!(s.power.idle <= s.power.min && s.power.min <= s.power.max)) fail("power must satisfy idle <= min <= max");
  if (!s.vulnerability.empty()) {
    if (static_cast<int>(s.vulnerability.size()) != s.servers) fail("vulnerability needs one score per server");
    for (double v : s.vulnerability) {
      if (v < 0.0 || v > 10.0) fail("vulnerability scores must be in [0, 10]");
    }
  }
  if (s.clusters < 1) fail("clusters must be >= 1");
  if (s.predictor.window < 1 || s.predictor.hidden < 1) fail("predictor shape must be >= 1");
  if (s.history_length < static_cast<int>(s.predictor.window) + 1) fail("history_length must exceed predictor.window");
  if (s.interval_minutes <= 0.0) fail("interval_minutes must be positive");
  if (s.workload.burst_min_len < 1 || s.workload.burst_max_len < s.workload.burst_min_len) fail("bad burst lengths");
  if (s.workload.level_lo > s.workload.level_hi) fail("workload.level_lo must be <= workload.level_hi");
  if (s.workload.burst_mult_lo > s.workload.burst_mult_hi) fail("workload.burst_mult_lo must be <= burst_mult_hi");

  const int m = s.effective_users();
  for (UserId u : s.malicious_users) {
    if (u.value < 1 || static_cast<int>(u.value) > m) fail("malicious user " + std::to_string(u.value) + " does not exist");
  }
  if (!s.explicit_users.empty()) {
    std::set<VmId> seen;
    std::uint32_t expect = 1;
    for (const auto& [u, vms] : s.explicit_users) {
      if (u.value != expect++) fail("user ids must be contiguous from 1");
      for (VmId v : vms) {
        if (v.value < 1 || static_cast<int>(v.value) > s.vms || !seen.insert(v).second) {
          fail("VM " + std::to_string(v.value) + " listed twice or out of range");
        }
      }
    }
    if (static_cast<int>(seen.size()) != s.vms) fail("explicit users must own every VM exactly once");
  }
  if (!s.explicit_placement.empty()) {
    std::set<VmId> seen;
    for (const auto& [sid, vms] : s.explicit_placement) {
      if (sid.value < 1 || static_cast<int>(sid.value) > s.servers) fail("placement names unknown server");
      for (VmId v : vms) {
        if (v.value < 1 || static_cast<int>(v.value) > s.vms || !seen.insert(v).second) {
          fail("placement lists VM " + std::to_string(v.value) + " twice or out of range");
        }
      }
    }
  }
  for (const auto* list : {&s.scripted_links, &s.scripted_attacks}) {
    for (const auto& l : *list) {
      if (l.src == l.dst) fail("scripted link endpoints must differ");
      if (l.src.value < 1 || l.dst.value < 1 || static_cast<int>(std::max(l.src.value, l.dst.value)) > s.vms) {
        fail("scripted link references unknown VM");
      }
    }
  }
}

std::vector<std::string> preset_names() { return {"illustration", "xi200", "xi500", "xi800", "xi1100"}; }

std::string preset_text(const std::string& name) {
  if (name == "illustration") {
    return R"(# Five servers, four users, user 3 owns the malicious VMs 8..11.
name = illustration
servers = 5
vms = 15
intervals = 3
seed = 1
flavor_policy = first
reserved_every = 0
cross_grant_pct = 0
benign_link_pct = 0
attack_rate = 0
vulnerability = 2 5 8 3 6
user = 1: 1 2 3 4
user = 2: 5 6 7
user = 3: 8 9 10 11
user = 4: 12 13 14 15
malicious_users = 3
place = 1: 1 3 11
place = 2: 2 7 12
place = 3: 5 6 8
place = 4: 4 9 14
place = 5: 13 10 15
# inter-dependent traffic, authorized within each user
link = 1>3
link = 3>1
link = 1>2
link = 2>4
link = 5>6
link = 6>7
link = 12>13
link = 13>14
link = 14>15
link = 8>9
link = 9>10
# attacker 11 on server 1
attack = 11>1
attack = 11>3
attack = 11>2
# attacker 8 on server 3
attack = 8>5
attack = 8>6
attack = 8>7
# attacker 10 on server 5
attack = 10>13
attack = 10>15
attack = 10>14
# attacker 9 on server 4 only reaches off-server VMs
attack = 9>12
attack = 9>2
)";
  }
  static const std::map<std::string, int> sizes = {{"xi200", 200}, {"xi500", 500}, {"xi800", 800}, {"xi1100", 1100}};
  auto it = sizes.find(name);
  if (it == sizes.end()) return {};
  const int q = it->second;
  std::ostringstream out;
  out << "# Synthetic bursty workload, " << q << " VMs.\n"
      << "name = " << name << "\n"
      << "vms = " << q << "\n"
      << "servers = " << q / 2 << "\n"
      << "malicious_pct = 20\n"
      << "intervals = 50\n"
      << "seed = 1\n";
  return out.str();
}

Scenario load_scenario(const std::string& path_or_preset) {
  if (auto text = preset_text(path_or_preset); !text.empty()) return parse_scenario(text);
  std::ifstream in(path_or_preset);
  if (!in) throw ConfigError("scenario not found: " + path_or_preset);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

}  // namespace oscmc
