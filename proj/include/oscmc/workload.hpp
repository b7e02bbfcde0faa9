#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "oscmc/dc_model.hpp"
#include "oscmc/scenario.hpp"

namespace oscmc {

/// Per-VM usage as a bounded random walk around a base level with occasional
/// bandwidth bursts. Every VM advances on every call regardless of status, so
/// the stream is identical across policies that share a seed.
class SyntheticWorkload {
 public:
  SyntheticWorkload(std::uint64_t seed, std::vector<ResourceVector> nominal, WorkloadConfig config);

  /// Usage for interval `t`; must be called with t = 0, 1, 2, ...
  std::vector<ResourceVector> step(int t);

 private:
  struct VmState {
    ResourceVector level;  // fraction of nominal
    int burst_left = 0;
    double burst_mult = 1.0;
  };

  std::uint64_t seed_;
  std::vector<ResourceVector> nominal_;
  WorkloadConfig config_;
  std::vector<VmState> state_;
  int next_t_ = 0;
};

class TraceFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Usage series resampled to the 5-minute cadence, keyed by trace VM id.
struct TraceSet {
  std::map<std::string, std::vector<ResourceVector>> series;
  std::size_t rows = 0;
  std::size_t dropped = 0;

  /// Rows accepted from the file(s).
  [[nodiscard]] std::size_t samples() const { return rows - dropped; }
  /// Total points across the resampled series, gaps included.
  [[nodiscard]] std::size_t resampled() const;
};

inline constexpr double kTraceCadenceSeconds = 300.0;

/// Reads either the documented CSV schema
///   timestamp,vm_id,cpu_usage_mips,mem_usage_mb,net_bw_used
/// or a raw Bitbrains per-VM file (semicolon separated, VM id taken from the
/// file stem). Malformed rows are dropped and counted.
TraceSet ingest_trace(const std::filesystem::path& path);

/// Directory of raw Bitbrains files, or a single file.
TraceSet ingest_traces(const std::filesystem::path& path);

/// Replays a trace: scenario VM i follows series (i mod N), wrapping in time.
class TraceWorkload {
 public:
  TraceWorkload(const TraceSet& traces, std::size_t vm_count);
  std::vector<ResourceVector> step(int t) const;

 private:
  std::vector<const std::vector<ResourceVector>*> assigned_;
};

}  // namespace oscmc
