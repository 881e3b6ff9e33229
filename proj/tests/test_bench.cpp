#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <thread>
#include <vector>

#include "helpers.hpp"
#include "pvm/bench.hpp"

using namespace pvm;
using pvmtest::make_entry;
using pvmtest::make_sine;

namespace {

MatchResult canned_match() {
  MatchResult match;
  match.code = {Gender::Male, Emotion::Neutral};
  match.preset = make_entry("bench_preset", "fr", match.code);
  return match;
}

std::vector<Segment> make_stream(const std::vector<std::string>& speakers) {
  std::vector<Segment> segments;
  for (std::size_t i = 0; i < speakers.size(); ++i) {
    Segment segment;
    segment.speaker_tag = speakers[i];
    segment.audio = make_sine(220.0, 0.01);
    segment.text = "t" + std::to_string(i);
    segments.push_back(segment);
  }
  return segments;
}

}  // namespace

TEST_CASE("time_stage measures a sleeping thunk within loose bounds", "[bench]") {
  const TimingStats stats =
      time_stage([] { std::this_thread::sleep_for(std::chrono::milliseconds(50)); }, 5);
  REQUIRE(stats.runs == 5);
  REQUIRE(stats.mean_s >= 0.045);
  REQUIRE(stats.mean_s <= 0.200);
  REQUIRE(stats.min_s <= stats.mean_s);
  REQUIRE(stats.mean_s <= stats.max_s);
}

TEST_CASE("a single repetition has zero standard deviation", "[bench]") {
  const TimingStats stats = time_stage([] {}, 1);
  REQUIRE(stats.runs == 1);
  REQUIRE(stats.std_s == 0.0);
}

TEST_CASE("a failing thunk aborts with no partial report", "[bench]") {
  int calls = 0;
  REQUIRE_THROWS_AS(time_stage(
                        [&] {
                          ++calls;
                          throw InvalidArgument("thunk exploded");
                        },
                        5),
                    InvalidArgument);
  REQUIRE(calls == 1);  // died during warm-up, nothing was measured
  REQUIRE_THROWS_AS(time_stage([] {}, 0), InvalidArgument);
}

TEST_CASE("bench rows report the counting law per mode", "[bench]") {
  StubMatcher matcher(canned_match());
  MockTtsBackend tts;
  const std::vector<Workload> workloads = {{"w5", make_stream({"A", "A", "B", "B", "A"})}};

  const auto rows = bench_pipeline(matcher, tts, workloads,
                                   {RunMode::PvmCached, RunMode::PerUtterancePostprocess}, "fr", 2);
  REQUIRE(rows.size() == 2);
  REQUIRE(rows[0].mode == RunMode::PvmCached);
  REQUIRE(rows[0].aux_runs == 3);
  REQUIRE(rows[0].tts_runs == 5);
  REQUIRE(rows[0].speaker_changes == 2);
  REQUIRE(rows[1].mode == RunMode::PerUtterancePostprocess);
  REQUIRE(rows[1].aux_runs == 5);

  SECTION("counts are bit-identical across repeated benches") {
    const auto again = bench_pipeline(matcher, tts, workloads,
                                      {RunMode::PvmCached, RunMode::PerUtterancePostprocess}, "fr", 2);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      REQUIRE(again[i].aux_runs == rows[i].aux_runs);
      REQUIRE(again[i].tts_runs == rows[i].tts_runs);
      REQUIRE(again[i].segments == rows[i].segments);
      REQUIRE(again[i].speaker_changes == rows[i].speaker_changes);
    }
  }

  SECTION("csv rendering carries the pinned header") {
    const std::string csv_text = bench_rows_to_csv(rows);
    REQUIRE(csv_text.rfind("workload,mode,segments,speaker_changes,aux_runs,tts_runs,"
                           "aux_mean_s,tts_mean_s\n", 0) == 0);
    REQUIRE(csv_text.find("w5,pvm-cached,5,2,3,5,") != std::string::npos);
    REQUIRE(csv_text.find("w5,baseline,5,2,5,5,") != std::string::npos);
  }
}

TEST_CASE("with a constant-cost aux stub, cached aux time undercuts the baseline", "[bench]") {
  StubMatcher matcher(canned_match(), std::chrono::milliseconds(2));
  MockTtsBackend tts;
  const std::vector<Workload> workloads = {{"w", make_stream({"A", "A", "A", "B", "B", "B"})}};

  const auto rows = bench_pipeline(matcher, tts, workloads,
                                   {RunMode::PvmCached, RunMode::PerUtterancePostprocess}, "fr", 3);
  REQUIRE(rows[0].aux_runs == 2);
  REQUIRE(rows[1].aux_runs == 6);
  REQUIRE(rows[0].aux_mean_s < rows[1].aux_mean_s);
}

TEST_CASE("aux and tts intervals never overlap within a segment", "[bench][property]") {
  StubMatcher matcher(canned_match(), std::chrono::milliseconds(1));
  MockTtsBackend tts;
  const StreamResult result = run_stream(matcher, tts, make_stream({"A", "B", "B", "C"}), "fr",
                                         RunMode::PvmCached);
  for (const SegmentOutput& output : result.outputs) {
    REQUIRE(output.tts_interval.end_s >= output.tts_interval.begin_s);
    if (output.aux_interval) {
      REQUIRE(output.aux_interval->end_s >= output.aux_interval->begin_s);
      REQUIRE(output.aux_interval->end_s <= output.tts_interval.begin_s);
    }
  }
}

TEST_CASE("an empty mode list produces an empty report", "[bench]") {
  StubMatcher matcher(canned_match());
  MockTtsBackend tts;
  const std::vector<Workload> workloads = {{"w", make_stream({"A"})}};
  REQUIRE(bench_pipeline(matcher, tts, workloads, {}, "fr", 1).empty());
}

TEST_CASE("parallel workload execution preserves every count", "[bench][parallel]") {
  StubMatcher matcher(canned_match());
  MockTtsBackend tts;
  std::vector<Workload> workloads;
  for (int w = 0; w < 4; ++w) {
    std::vector<std::string> speakers;
    for (int i = 0; i < 4 + w; ++i) speakers.push_back(i % 2 == 0 ? "A" : "B");
    workloads.push_back({"w" + std::to_string(w), make_stream(speakers)});
  }
  const std::vector<RunMode> modes = {RunMode::PvmCached, RunMode::PerUtterancePostprocess};

  const auto serial = bench_pipeline(matcher, tts, workloads, modes, "fr", 2);
  BenchOptions options;
  options.reps = 2;
  options.parallel_workloads = true;
  const auto parallel = bench_pipeline(matcher, tts, workloads, modes, "fr", options);

  REQUIRE(parallel.size() == serial.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    REQUIRE(parallel[i].workload == serial[i].workload);
    REQUIRE(parallel[i].mode == serial[i].mode);
    REQUIRE(parallel[i].aux_runs == serial[i].aux_runs);
    REQUIRE(parallel[i].tts_runs == serial[i].tts_runs);
    REQUIRE(parallel[i].speaker_changes == serial[i].speaker_changes);
  }
}

TEST_CASE("parallel benching demands a parallel-safe backend", "[bench][parallel]") {
  class SerialOnlyTts : public TtsBackend {
   public:
    AudioClip synthesize(const PresetVoiceEntry& preset, const std::string& text,
                         const std::string& language) override {
      return mock_.synthesize(preset, text, language);
    }
    bool supports_parallel_streams() const override { return false; }

   private:
    MockTtsBackend mock_;
  };

  StubMatcher matcher(canned_match());
  SerialOnlyTts tts;
  const std::vector<Workload> workloads = {{"w", make_stream({"A", "B"})}};
  BenchOptions options;
  options.parallel_workloads = true;
  REQUIRE_THROWS_AS(bench_pipeline(matcher, tts, workloads, {RunMode::PvmCached}, "fr", options),
                    InvalidArgument);
}

TEST_CASE("linear_fit recovers exact lines", "[bench]") {
  const std::vector<double> xs = {1.0, 2.0, 3.0, 4.0};
  const std::vector<double> ys = {3.0, 5.0, 7.0, 9.0};
  const LinearFit fit = linear_fit(xs, ys);
  REQUIRE(fit.slope == Catch::Approx(2.0));
  REQUIRE(fit.intercept == Catch::Approx(1.0));
  REQUIRE(fit.r2 == Catch::Approx(1.0));

  REQUIRE_THROWS_AS(linear_fit({1.0}, {2.0}), InvalidArgument);
  REQUIRE_THROWS_AS(linear_fit({1.0, 1.0}, {2.0, 3.0}), InvalidArgument);
}

TEST_CASE("bench csv writes to disk", "[bench]") {
  pvmtest::TempDir dir("bench_csv");
  StubMatcher matcher(canned_match());
  MockTtsBackend tts;
  const std::vector<Workload> workloads = {{"w", make_stream({"A", "B"})}};
  const auto rows = bench_pipeline(matcher, tts, workloads, {RunMode::PvmCached}, "fr", 1);
  write_bench_csv(dir.path() / "report.csv", rows);
  const auto parsed = csv::read_file(dir.path() / "report.csv");
  REQUIRE(parsed.size() == 2);
  REQUIRE(parsed[0].size() == 8);
}
