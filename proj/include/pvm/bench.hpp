#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "pvm/errors.hpp"
#include "pvm/pipeline.hpp"

namespace pvm {

/// Statistics over K measured wall-clock runs (monotonic timer). One
/// warm-up invocation happens first and is excluded.
struct TimingStats {
  std::size_t runs = 0;
  double mean_s = 0.0;
  double std_s = 0.0;
  double min_s = 0.0;
  double max_s = 0.0;
  std::vector<double> samples_s;
};

inline TimingStats time_stage(const std::function<void()>& thunk, int repetitions) {
  if (repetitions < 1) throw InvalidArgument("time_stage: repetitions must be >= 1");
  thunk();  // warm-up, excluded from statistics

  TimingStats stats;
  stats.runs = static_cast<std::size_t>(repetitions);
  stats.samples_s.reserve(stats.runs);
  for (int k = 0; k < repetitions; ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    thunk();
    const auto t1 = std::chrono::steady_clock::now();
    stats.samples_s.push_back(std::chrono::duration<double>(t1 - t0).count());
  }

  stats.min_s = stats.samples_s[0];
  stats.max_s = stats.samples_s[0];
  double sum = 0.0;
  for (double s : stats.samples_s) {
    sum += s;
    stats.min_s = std::min(stats.min_s, s);
    stats.max_s = std::max(stats.max_s, s);
  }
  stats.mean_s = sum / static_cast<double>(stats.runs);
  double var = 0.0;
  for (double s : stats.samples_s) var += (s - stats.mean_s) * (s - stats.mean_s);
  stats.std_s = std::sqrt(var / static_cast<double>(stats.runs));
  return stats;
}

struct Workload {
  std::string name;
  std::vector<Segment> segments;
};

/// One benchmarked (workload, mode) combination. Counts are exact and
/// deterministic; the *_mean_s columns average over the measured runs.
struct BenchRow {
  std::string workload;
  RunMode mode = RunMode::PvmCached;
  std::size_t segments = 0;
  std::size_t speaker_changes = 0;
  std::size_t aux_runs = 0;
  std::size_t tts_runs = 0;
  double aux_mean_s = 0.0;
  double tts_mean_s = 0.0;
  double total_mean_s = 0.0;  // wall clock including orchestration overhead
};

struct BenchOptions {
  int reps = 10;
  /// Run workloads on parallel threads. Requires a backend that permits
  /// cross-stream invocation; timers stay isolated per workload because
  /// each run_stream measures its own stages. Counts are unaffected;
  /// durations on a loaded machine are not comparable to serial runs.
  bool parallel_workloads = false;
};

namespace detail {

inline BenchRow bench_one(VoiceMatcher& matcher, TtsBackend& tts, const Workload& workload,
                          RunMode mode, const std::string& target_language, int reps) {
  run_stream(matcher, tts, workload.segments, target_language, mode);  // warm-up

  BenchRow row;
  row.workload = workload.name;
  row.mode = mode;
  double aux_total = 0.0, tts_total = 0.0, wall_total = 0.0;
  for (int k = 0; k < reps; ++k) {
    const StreamResult result = run_stream(matcher, tts, workload.segments, target_language, mode);
    aux_total += result.stats.aux_seconds;
    tts_total += result.stats.tts_seconds;
    wall_total += result.stats.total_seconds;
    row.segments = result.stats.segments;
    row.speaker_changes = result.stats.speaker_changes;
    row.aux_runs = result.stats.aux_runs;
    row.tts_runs = result.stats.tts_runs;
  }
  row.aux_mean_s = aux_total / reps;
  row.tts_mean_s = tts_total / reps;
  row.total_mean_s = wall_total / reps;
  return row;
}

}  // namespace detail

/// Runs every workload under every mode, one warm-up run plus `reps`
/// measured runs each, timing the aux and TTS stages separately.
/// Single-threaded by default to stabilize timings.
inline std::vector<BenchRow> bench_pipeline(VoiceMatcher& matcher, TtsBackend& tts,
                                            const std::vector<Workload>& workloads,
                                            const std::vector<RunMode>& modes,
                                            const std::string& target_language,
                                            const BenchOptions& options) {
  if (options.reps < 1) throw InvalidArgument("bench_pipeline: reps must be >= 1");
  if (modes.empty() || workloads.empty()) return {};

  std::vector<BenchRow> rows(workloads.size() * modes.size());
  if (!options.parallel_workloads) {
    std::size_t slot = 0;
    for (const Workload& workload : workloads) {
      for (RunMode mode : modes) {
        rows[slot++] = detail::bench_one(matcher, tts, workload, mode, target_language, options.reps);
      }
    }
    return rows;
  }

  if (!tts.supports_parallel_streams()) {
    throw InvalidArgument(
        "bench_pipeline: this TTS backend does not permit parallel stream invocation");
  }
  std::vector<std::thread> threads;
  threads.reserve(workloads.size());
  for (std::size_t w = 0; w < workloads.size(); ++w) {
    threads.emplace_back([&, w] {
      for (std::size_t m = 0; m < modes.size(); ++m) {
        rows[w * modes.size() + m] = detail::bench_one(matcher, tts, workloads[w], modes[m],
                                                       target_language, options.reps);
      }
    });
  }
  for (auto& t : threads) t.join();
  return rows;
}

inline std::vector<BenchRow> bench_pipeline(VoiceMatcher& matcher, TtsBackend& tts,
                                            const std::vector<Workload>& workloads,
                                            const std::vector<RunMode>& modes,
                                            const std::string& target_language, int reps) {
  BenchOptions options;
  options.reps = reps;
  return bench_pipeline(matcher, tts, workloads, modes, target_language, options);
}

inline constexpr const char* kBenchCsvHeader =
    "workload,mode,segments,speaker_changes,aux_runs,tts_runs,aux_mean_s,tts_mean_s";

inline std::string bench_rows_to_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream out;
  out << kBenchCsvHeader << "\n";
  for (const BenchRow& row : rows) {
    out << row.workload << "," << to_string(row.mode) << "," << row.segments << ","
        << row.speaker_changes << "," << row.aux_runs << "," << row.tts_runs << ","
        << std::scientific << std::setprecision(6) << row.aux_mean_s << "," << row.tts_mean_s
        << "\n";
    out.unsetf(std::ios::floatfield);
  }
  return out.str();
}

inline void write_bench_csv(const std::filesystem::path& path, const std::vector<BenchRow>& rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw InvalidArgument("cannot write '" + path.string() + "'");
  out << bench_rows_to_csv(rows);
}

/// Ordinary least squares y = slope*x + intercept with the R^2 goodness.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

inline LinearFit linear_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw InvalidArgument("linear_fit: need at least 2 aligned points");
  }
  const double n = static_cast<double>(xs.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0) throw InvalidArgument("linear_fit: x values are all identical");

  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (syy == 0.0) {
    fit.r2 = 1.0;  // constant y is matched exactly by the fitted line
  } else {
    double ss_res = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double e = ys[i] - (fit.slope * xs[i] + fit.intercept);
      ss_res += e * e;
    }
    fit.r2 = 1.0 - ss_res / syy;
  }
  return fit;
}

}  // namespace pvm
