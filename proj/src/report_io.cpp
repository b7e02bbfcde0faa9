#include "oscmc/report_io.hpp"

#include <array>
#include <charconv>
#include <type_traits>
#include <fstream>
#include <sstream>

namespace oscmc {

std::string format_number(double x) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  if (ec != std::errc()) throw std::runtime_error("cannot format number");
  return std::string(buf.data(), ptr);
}

namespace {

struct Row {
  std::ostream& out;
  bool first = true;

  template <class T>
  Row& operator<<(const T& v) {
    if (!first) out << ',';
    first = false;
    if constexpr (std::is_floating_point_v<T>) {
      out << format_number(v);
    } else {
      out << v;
    }
    return *this;
  }
  ~Row() { out << '\n'; }
};

std::vector<std::string> cells(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

template <class T>
T parse(const std::string& s, int line) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ReportFormatError("line " + std::to_string(line) + ": bad number '" + s + "'");
  }
  return v;
}

void expect_header(std::istream& in, const char* header) {
  std::string line;
  if (!std::getline(in, line) || line != header) throw ReportFormatError(std::string("expected header: ") + header);
}

}  // namespace

void write_metrics_csv(std::ostream& out, const RunLog& log) {
  out << kMetricsHeader << '\n';
  for (const auto& r : log.intervals) {
    const auto& m = r.metrics;
    Row(out) << m.interval << 100.0 * m.ru_dc << m.pw_dc << m.hog_count << m.authorized_link_pct
             << m.active_server_count << m.theta_col << m.theta_cas << m.theta_vul << m.malicious_vms_cum;
  }
}

void write_events_csv(std::ostream& out, const RunLog& log) {
  out << kEventsHeader << '\n';
  for (const auto& r : log.intervals) {
    const int t = r.metrics.interval;
    for (const auto& e : r.report.colocation_events) {
      Row(out) << t << "col" << e.src.value << e.dst.value << e.server.value;
    }
    for (const auto& e : r.report.cascading_events) {
      Row(out) << t << "cas" << e.relay.value << e.target.value
               << std::to_string(e.origin_server.value) + ">" + std::to_string(e.target_server.value);
    }
    for (const auto& e : r.report.vulnerability_events) {
      Row(out) << t << "vul" << "" << e.vm.value << e.server.value;
    }
  }
}

void write_clusters_csv(std::ostream& out, const RunLog& log) {
  out << "interval,cluster,centroid_bw,members\n";
  for (const auto& r : log.intervals) {
    for (std::size_t c = 0; c < r.centroids.size(); ++c) {
      Row(out) << r.metrics.interval << c << r.centroids[c] << r.cluster_sizes[c];
    }
  }
}

void write_summary(std::ostream& out, const RunLog& log) {
  const auto& s = log.summary;
  out << "scenario: " << log.scenario << '\n'
      << "policy: " << to_string(log.policy) << '\n'
      << "seed: " << log.seed << '\n'
      << "intervals: " << log.intervals.size() << '\n'
      << "final_authorized_link_pct: " << format_number(s.final_al_pct) << '\n'
      << "total_energy_kwh: " << format_number(s.total_kwh) << '\n'
      << "mean_ru_pct: " << format_number(s.mean_ru_pct) << '\n'
      << "mean_hogs: " << format_number(s.mean_hogs) << '\n'
      << "suspended_vms: " << s.suspended_vms << '\n'
      << "terminated_vms: " << s.terminated_vms << '\n'
      << "malicious_links_total: " << s.malicious_links_total << '\n'
      << "realized_breaches: " << s.realized_breaches << '\n';
  out << "suspended:";
  for (VmId v : log.suspended) out << " V" << v.value;
  out << '\n';
}

void write_run(const std::filesystem::path& dir, const RunLog& log) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
    return f;
  };
  {
    auto f = open("metrics.csv");
    write_metrics_csv(f, log);
  }
  {
    auto f = open("events.csv");
    write_events_csv(f, log);
  }
  {
    auto f = open("clusters.csv");
    write_clusters_csv(f, log);
  }
  auto f = open("summary.txt");
  write_summary(f, log);
}

std::vector<MetricsRow> read_metrics_csv(std::istream& in) {
  expect_header(in, kMetricsHeader);
  std::vector<MetricsRow> rows;
  int n = 1;
  for (std::string line; std::getline(in, line);) {
    ++n;
    if (line.empty()) continue;
    const auto c = cells(line);
    if (c.size() != 10) throw ReportFormatError("line " + std::to_string(n) + ": expected 10 fields");
    MetricsRow r;
    r.interval = parse<int>(c[0], n);
    r.ru_dc_pct = parse<double>(c[1], n);
    r.pw_dc_watts = parse<double>(c[2], n);
    r.hogs = parse<int>(c[3], n);
    r.authorized_link_pct = parse<double>(c[4], n);
    r.active_servers = parse<int>(c[5], n);
    r.theta_col = parse<int>(c[6], n);
    r.theta_cas = parse<int>(c[7], n);
    r.theta_vul = parse<int>(c[8], n);
    r.malicious_vms_cum = parse<int>(c[9], n);
    rows.push_back(r);
  }
  return rows;
}

std::vector<MetricsRow> read_metrics_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_metrics_csv(in);
}

std::vector<EventRow> read_events_csv(std::istream& in) {
  expect_header(in, kEventsHeader);
  std::vector<EventRow> rows;
  int n = 1;
  for (std::string line; std::getline(in, line);) {
    ++n;
    if (line.empty()) continue;
    const auto c = cells(line);
    if (c.size() != 5) throw ReportFormatError("line " + std::to_string(n) + ": expected 5 fields");
    rows.push_back({parse<int>(c[0], n), c[1], c[2], c[3], c[4]});
  }
  return rows;
}

}  // namespace oscmc
