#include "oscmc/workload.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "oscmc/rng.hpp"

namespace oscmc {

SyntheticWorkload::SyntheticWorkload(std::uint64_t seed, std::vector<ResourceVector> nominal, WorkloadConfig config)
    : seed_(seed), nominal_(std::move(nominal)), config_(config), state_(nominal_.size()) {
  for (std::size_t i = 0; i < state_.size(); ++i) {
    std::mt19937_64 rng(stream_seed(seed_, "workload-init", i));
    std::uniform_real_distribution<double> level(config_.level_lo, config_.level_hi);
    state_[i].level = {level(rng), level(rng), level(rng)};
  }
}

std::vector<ResourceVector> SyntheticWorkload::step(int t) {
  if (t != next_t_) throw std::logic_error("SyntheticWorkload::step called out of order");
  ++next_t_;
  std::vector<ResourceVector> out(state_.size());
  for (std::size_t i = 0; i < state_.size(); ++i) {
    std::mt19937_64 rng(stream_seed(seed_, "workload", t, i));
    std::normal_distribution<double> walk(0.0, config_.walk_sigma);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    VmState& s = state_[i];
    auto drift = [&](double x) { return std::clamp(x + walk(rng), config_.level_floor, config_.level_cap); };
    s.level = {drift(s.level.cpu), drift(s.level.mem), drift(s.level.bw)};

    const double start = unit(rng);
    const double len_draw = unit(rng);
    const double mult_draw = unit(rng);
    if (s.burst_left == 0 && start < config_.burst_pct / 100.0) {
      const int span = config_.burst_max_len - config_.burst_min_len + 1;
      s.burst_left = config_.burst_min_len + std::min(span - 1, static_cast<int>(len_draw * span));
      s.burst_mult = config_.burst_mult_lo + mult_draw * (config_.burst_mult_hi - config_.burst_mult_lo);
    }
    double mult = 1.0;
    if (s.burst_left > 0) {
      mult = s.burst_mult;
      --s.burst_left;
    }
    const ResourceVector& n = nominal_[i];
    out[i] = {n.cpu * s.level.cpu, n.mem * s.level.mem, n.bw * s.level.bw * mult};
  }
  return out;
}

std::size_t TraceSet::resampled() const {
  std::size_t n = 0;
  for (const auto& [id, s] : series) n += s.size();
  return n;
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n\"");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n\"");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(trim(cell));
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

struct RawRow {
  double t;
  ResourceVector usage;
};

void resample(std::map<std::string, std::vector<RawRow>>& raw, TraceSet& out) {
  for (auto& [id, rows] : raw) {
    std::stable_sort(rows.begin(), rows.end(), [](const RawRow& a, const RawRow& b) { return a.t < b.t; });
    const double t0 = rows.front().t;
    std::vector<ResourceVector> sum;
    std::vector<int> count;
    for (const RawRow& r : rows) {
      const auto slot = static_cast<std::size_t>(std::floor((r.t - t0) / kTraceCadenceSeconds));
      if (slot >= sum.size()) {
        sum.resize(slot + 1);
        count.resize(slot + 1, 0);
      }
      sum[slot] += r.usage;
      ++count[slot];
    }
    auto& series = out.series[id];
    series.resize(sum.size());
    for (std::size_t i = 0; i < sum.size(); ++i) {
      if (count[i] > 0) {
        const double n = count[i];
        series[i] = {sum[i].cpu / n, sum[i].mem / n, sum[i].bw / n};
      } else {
        series[i] = series[i - 1];  // slot 0 always has data
      }
    }
  }
}

const char* kSchema[] = {"timestamp", "vm_id", "cpu_usage_mips", "mem_usage_mb", "net_bw_used"};

TraceSet ingest_schema(std::istream& in, const std::string& header) {
  const auto cols = split(header, ',');
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    const bool known = std::find(std::begin(kSchema), std::end(kSchema), cols[i]) != std::end(kSchema);
    if (!known) throw TraceFormatError("trace header: unrecognized column '" + cols[i] + "'");
    index[cols[i]] = i;
  }
  for (const char* c : kSchema) {
    if (!index.contains(c)) throw TraceFormatError(std::string("trace header: missing column '") + c + "'");
  }
  TraceSet out;
  std::map<std::string, std::vector<RawRow>> raw;
  for (std::string line; std::getline(in, line);) {
    if (trim(line).empty()) continue;
    ++out.rows;
    const auto cells = split(line, ',');
    if (cells.size() != cols.size()) {
      ++out.dropped;
      continue;
    }
    RawRow r{};
    const std::string& id = cells[index["vm_id"]];
    if (id.empty() || !parse_double(cells[index["timestamp"]], r.t) ||
        !parse_double(cells[index["cpu_usage_mips"]], r.usage.cpu) ||
        !parse_double(cells[index["mem_usage_mb"]], r.usage.mem) ||
        !parse_double(cells[index["net_bw_used"]], r.usage.bw)) {
      ++out.dropped;
      continue;
    }
    raw[id].push_back(r);
  }
  resample(raw, out);
  return out;
}

TraceSet ingest_bitbrains(std::istream& in, const std::string& header, const std::string& vm_id) {
  const auto cols = split(header, ';');
  auto find = [&](const std::string& name) {
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (cols[i] == name) return i;
    }
    throw TraceFormatError("bitbrains header: missing column '" + name + "'");
  };
  const std::size_t ts = find("Timestamp [ms]");
  const std::size_t cpu = find("CPU usage [MHZ]");
  const std::size_t mem = find("Memory usage [KB]");
  const std::size_t rx = find("Network received throughput [KB/s]");
  const std::size_t tx = find("Network transmitted throughput [KB/s]");

  TraceSet out;
  std::map<std::string, std::vector<RawRow>> raw;
  for (std::string line; std::getline(in, line);) {
    if (trim(line).empty()) continue;
    ++out.rows;
    const auto cells = split(line, ';');
    RawRow r{};
    double mem_kb = 0.0;
    double rx_v = 0.0;
    double tx_v = 0.0;
    if (cells.size() != cols.size() || !parse_double(cells[ts], r.t) || !parse_double(cells[cpu], r.usage.cpu) ||
        !parse_double(cells[mem], mem_kb) || !parse_double(cells[rx], rx_v) || !parse_double(cells[tx], tx_v)) {
      ++out.dropped;
      continue;
    }
    // The published files label the column [ms] but mostly store epoch
    // seconds; treat implausibly large values as milliseconds.
    if (r.t > 1e11) r.t /= 1000.0;
    r.usage.mem = mem_kb / 1024.0;
    r.usage.bw = rx_v + tx_v;
    raw[vm_id].push_back(r);
  }
  resample(raw, out);
  return out;
}

}  // namespace

TraceSet ingest_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw TraceFormatError("cannot open trace " + path.string());
  std::string header;
  if (!std::getline(in, header)) throw TraceFormatError("trace " + path.string() + " is empty");
  if (header.find("Timestamp [ms]") != std::string::npos) return ingest_bitbrains(in, header, path.stem().string());
  return ingest_schema(in, header);
}

TraceSet ingest_traces(const std::filesystem::path& path) {
  if (!std::filesystem::is_directory(path)) return ingest_trace(path);
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(path)) {
    if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  TraceSet all;
  for (const auto& f : files) {
    TraceSet one = ingest_trace(f);
    all.rows += one.rows;
    all.dropped += one.dropped;
    for (auto& [id, s] : one.series) all.series[id] = std::move(s);
  }
  return all;
}

TraceWorkload::TraceWorkload(const TraceSet& traces, std::size_t vm_count) {
  std::vector<const std::vector<ResourceVector>*> pool;
  for (const auto& [id, s] : traces.series) {
    if (!s.empty()) pool.push_back(&s);
  }
  if (pool.empty()) throw TraceFormatError("trace contains no usable samples");
  for (std::size_t i = 0; i < vm_count; ++i) assigned_.push_back(pool[i % pool.size()]);
}

std::vector<ResourceVector> TraceWorkload::step(int t) const {
  std::vector<ResourceVector> out;
  out.reserve(assigned_.size());
  for (const auto* s : assigned_) out.push_back((*s)[static_cast<std::size_t>(t) % s->size()]);
  return out;
}

}  // namespace oscmc
