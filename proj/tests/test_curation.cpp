#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <set>

#include "helpers.hpp"
#include "pvm/curation.hpp"

using namespace pvm;
using pvmtest::make_sine;
using pvmtest::TempDir;

namespace {

namespace fs = std::filesystem;

/// Writes a keepable clip (440 Hz at -21.5 dBFS) under the given name.
void write_keepable(const fs::path& path, double freq = 440.0, double dbfs = -21.5) {
  fs::create_directories(path.parent_path());
  write_wav(path, with_rms_dbfs(make_sine(freq, 1.0), dbfs));
}

std::size_t count_layout_files(const fs::path& out) {
  std::size_t total = 0;
  for (Gender g : kGenders) {
    for (Emotion e : kEmotions) {
      for (const auto& it : fs::directory_iterator(out / dir_name(g) / dir_name(e))) {
        if (it.path().extension() == ".wav") ++total;
      }
    }
  }
  return total;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("scanning an empty directory yields nothing", "[curation]") {
  TempDir dir("scan_empty");
  const ScanResult result = scan_corpus(dir.path(), CorpusLayout::RavdessStyle);
  REQUIRE(result.samples.empty());
  REQUIRE(result.scanned == 0);
  REQUIRE(result.rejected_label == 0);
}

TEST_CASE("scan rejects unparsable names and keeps the rest", "[curation]") {
  TempDir dir("scan_mixed");
  write_keepable(dir.path() / "03-01-03-02-01-01-01.wav");  // male happy strong
  write_keepable(dir.path() / "03-01-04-01-02-01-02.wav");  // female sad normal
  write_keepable(dir.path() / "03-01-05-02-01-01-12.wav");  // female angry strong
  write_keepable(dir.path() / "lecture_recording.wav");     // unparsable

  const ScanResult result = scan_corpus(dir.path(), CorpusLayout::RavdessStyle);
  REQUIRE(result.scanned == 4);
  REQUIRE(result.samples.size() == 3);
  REQUIRE(result.rejected_label == 1);

  // lexicographic path order
  REQUIRE(result.samples[0].gender == Gender::Male);
  REQUIRE(result.samples[0].emotion == Emotion::Happy);
  REQUIRE(result.samples[0].intensity == Intensity::Strong);
  REQUIRE(result.samples[1].intensity == Intensity::Normal);
  REQUIRE(result.samples[2].gender == Gender::Female);  // actor 12 is even
  REQUIRE(result.samples[2].emotion == Emotion::Angry);
  REQUIRE(result.samples[2].language == "en");
  REQUIRE(result.samples[2].corpus == "ravdess");
}

TEST_CASE("scan folds calm into neutral and drops out-of-set emotions", "[curation]") {
  TempDir dir("scan_calm");
  write_keepable(dir.path() / "03-01-02-02-01-01-03.wav");  // calm -> Neutral
  write_keepable(dir.path() / "03-01-06-02-01-01-03.wav");  // fearful: outside the set

  const ScanResult result = scan_corpus(dir.path(), CorpusLayout::RavdessStyle);
  REQUIRE(result.samples.size() == 1);
  REQUIRE(result.samples[0].emotion == Emotion::Neutral);
  REQUIRE(result.rejected_label == 1);
}

TEST_CASE("flat-manifest corpora parse their CSV labels", "[curation]") {
  TempDir dir("scan_flat");
  write_keepable(dir.path() / "a.wav");
  write_keepable(dir.path() / "b.wav");
  std::ofstream(dir.path() / "manifest.csv")
      << "path,corpus,language,gender,emotion,intensity\n"
      << "a.wav,localset,en,Female,Sad,Strong\n"
      << "b.wav,localset,en,Male,Happy,Normal\n"
      << "c.wav,localset,en,Male,Confused,Normal\n";  // bad emotion -> rejected

  const ScanResult result = scan_corpus(dir.path(), CorpusLayout::FlatManifest);
  REQUIRE(result.scanned == 3);
  REQUIRE(result.samples.size() == 2);
  REQUIRE(result.rejected_label == 1);
  REQUIRE(result.samples[0].path.filename() == "a.wav");
  REQUIRE(result.samples[0].gender == Gender::Female);
}

TEST_CASE("filter decisions follow the pitch and loudness bands", "[curation][filter]") {
  const FilterPolicy policy;

  SECTION("in-band file is kept") {
    const FilterDecision d = filter_sample(with_rms_dbfs(make_sine(440.0, 1.0), -21.5), policy);
    REQUIRE(d.keep);
    REQUIRE(d.reason == FilterDecision::Reason::None);
    REQUIRE(d.pitch_hz.has_value());
    REQUIRE(*d.pitch_hz == Catch::Approx(440.0).margin(2.0));
    REQUIRE(d.rms_dbfs == Catch::Approx(-21.5).margin(0.01));
  }

  SECTION("a 50 Hz tone in the loudness band is rejected for pitch") {
    const FilterDecision d = filter_sample(with_rms_dbfs(make_sine(50.0, 1.0), -21.5), policy);
    REQUIRE_FALSE(d.keep);
    REQUIRE(d.reason == FilterDecision::Reason::Pitch);
  }

  SECTION("a quiet 440 Hz tone is rejected for loudness") {
    const FilterDecision d = filter_sample(with_rms_dbfs(make_sine(440.0, 1.0), -30.0), policy);
    REQUIRE_FALSE(d.keep);
    REQUIRE(d.reason == FilterDecision::Reason::Loudness);
    REQUIRE(d.rms_dbfs == Catch::Approx(-30.0).margin(0.01));
  }

  SECTION("a loud 440 Hz tone is rejected for loudness too") {
    const FilterDecision d = filter_sample(with_rms_dbfs(make_sine(440.0, 1.0), -10.0), policy);
    REQUIRE_FALSE(d.keep);
    REQUIRE(d.reason == FilterDecision::Reason::Loudness);
  }

  SECTION("pitch is checked before loudness") {
    const FilterDecision d = filter_sample(with_rms_dbfs(make_sine(50.0, 1.0), -30.0), policy);
    REQUIRE(d.reason == FilterDecision::Reason::Pitch);
  }
}

TEST_CASE("the filter is a pure predicate", "[curation][filter][property]") {
  const AudioClip clip = with_rms_dbfs(make_sine(300.0, 1.0), -22.0);
  const FilterPolicy policy;
  const FilterDecision a = filter_sample(clip, policy);
  const FilterDecision b = filter_sample(clip, policy);
  REQUIRE(a.keep == b.keep);
  REQUIRE(a.reason == b.reason);
  REQUIRE(a.rms_dbfs == b.rms_dbfs);
  REQUIRE(a.pitch_hz == b.pitch_hz);
}

TEST_CASE("a single kept sample lands in its gender-emotion directory", "[curation][layout]") {
  TempDir dir("layout_one");
  const fs::path src = dir.path() / "src" / "03-01-04-02-01-01-02.wav";  // female sad strong
  write_keepable(src);

  LabeledSample sample;
  sample.path = src;
  sample.language = "en";
  sample.gender = Gender::Female;
  sample.emotion = Emotion::Sad;
  sample.intensity = Intensity::Strong;
  sample.corpus = "ravdess";

  const fs::path out = dir.path() / "out";
  const CurationReport report = build_gender_dependent_layout({sample}, out, {});
  REQUIRE(report.kept == 1);
  REQUIRE(report.kept_per_class.at("Female-Sad") == 1);
  REQUIRE(fs::exists(out / "female" / "sad" / "03-01-04-02-01-01-02.wav"));

  const auto rows = csv::read_file(out / "manifest.csv");
  REQUIRE(rows.size() == 2);  // header + 1 placement
  REQUIRE(rows[0] == csv::parse_row(kCurationManifestHeader));
  REQUIRE(rows[1][8] == "keep");
}

TEST_CASE("zero kept samples still creates all ten directories", "[curation][layout]") {
  TempDir dir("layout_zero");
  const fs::path out = dir.path() / "out";
  const CurationReport report = build_gender_dependent_layout({}, out, {});
  REQUIRE(report.kept == 0);
  int dirs = 0;
  for (Gender g : kGenders) {
    for (Emotion e : kEmotions) {
      REQUIRE(fs::is_directory(out / dir_name(g) / dir_name(e)));
      REQUIRE(fs::is_empty(out / dir_name(g) / dir_name(e)));
      ++dirs;
    }
  }
  REQUIRE(dirs == 10);
}

TEST_CASE("a mixed fixture honors the counting conservation law", "[curation][layout]") {
  TempDir dir("layout_mixed");
  const fs::path src = dir.path() / "src";
  std::vector<LabeledSample> samples;

  auto add = [&](const std::string& name, Gender g, Emotion e, double freq, double dbfs) {
    const fs::path p = src / name;
    write_keepable(p, freq, dbfs);
    LabeledSample sample;
    sample.path = p;
    sample.language = "en";
    sample.gender = g;
    sample.emotion = e;
    sample.intensity = Intensity::Strong;
    sample.corpus = "fixture";
    samples.push_back(sample);
  };

  // 8 keepable, 1 pitch reject (50 Hz), 1 loudness reject (-30 dBFS)
  add("k1.wav", Gender::Male, Emotion::Happy, 220.0, -21.5);
  add("k2.wav", Gender::Male, Emotion::Angry, 220.0, -21.0);
  add("k3.wav", Gender::Male, Emotion::Sad, 330.0, -22.5);
  add("k4.wav", Gender::Male, Emotion::Disgust, 330.0, -20.5);
  add("k5.wav", Gender::Female, Emotion::Happy, 440.0, -21.5);
  add("k6.wav", Gender::Female, Emotion::Angry, 440.0, -21.5);
  add("k7.wav", Gender::Female, Emotion::Sad, 550.0, -22.0);
  add("k8.wav", Gender::Female, Emotion::Neutral, 550.0, -20.1);
  add("r_pitch.wav", Gender::Male, Emotion::Neutral, 50.0, -21.5);
  add("r_loud.wav", Gender::Female, Emotion::Disgust, 440.0, -30.0);

  const fs::path out = dir.path() / "out";
  const CurationReport report = build_gender_dependent_layout(samples, out, {});
  REQUIRE(report.scanned == 10);
  REQUIRE(report.kept == 8);
  REQUIRE(report.rejected_pitch == 1);
  REQUIRE(report.rejected_loudness == 1);
  REQUIRE(report.rejected_label == 0);
  REQUIRE(report.kept + report.rejected_pitch + report.rejected_loudness + report.rejected_label ==
          report.scanned);
  REQUIRE(count_layout_files(out) == 8);

  SECTION("every kept sample appears in exactly one cell") {
    std::size_t from_report = 0;
    for (const auto& [cell, count] : report.kept_per_class) from_report += count;
    REQUIRE(from_report == 8);
  }

  SECTION("reruns produce byte-identical manifests") {
    const fs::path out2 = dir.path() / "out2";
    build_gender_dependent_layout(samples, out2, {});
    REQUIRE(slurp(out / "manifest.csv") == slurp(out2 / "manifest.csv"));
  }

  SECTION("spectrogram export mirrors the layout") {
    StftConfig config;
    config.mel_bands = 32;  // keep the fixture fast
    const ExportResult exported = export_spectrograms(out, config);
    REQUIRE(exported.written == 8);
    REQUIRE(exported.skipped == 0);
    REQUIRE(fs::exists(out / "female" / "sad" / "k7.png"));

    const ExportResult again = export_spectrograms(out, config);
    REQUIRE(again.written == 8);  // idempotent rerun overwrites

    // plant a corrupt wav inside the layout
    std::ofstream(out / "male" / "happy" / "broken.wav") << "zzz";
    const ExportResult with_corrupt = export_spectrograms(out, config);
    REQUIRE(with_corrupt.written == 8);
    REQUIRE(with_corrupt.skipped == 1);
  }
}

TEST_CASE("intensity gating rejects normal-intensity files when required", "[curation][layout]") {
  TempDir dir("layout_intensity");
  const fs::path src = dir.path() / "src" / "a.wav";
  write_keepable(src);

  LabeledSample sample;
  sample.path = src;
  sample.language = "en";
  sample.gender = Gender::Male;
  sample.emotion = Emotion::Happy;
  sample.intensity = Intensity::Normal;
  sample.corpus = "ravdess";

  FilterPolicy policy;
  policy.require_strong_intensity = true;
  const CurationReport report = build_gender_dependent_layout({sample}, dir.path() / "out", policy);
  REQUIRE(report.kept == 0);
  REQUIRE(report.rejected_label == 1);
}

TEST_CASE("unreadable audio counts as a label rejection", "[curation][layout]") {
  TempDir dir("layout_corrupt");
  const fs::path src = dir.path() / "bad.wav";
  std::ofstream(src) << "not a wav";

  LabeledSample sample;
  sample.path = src;
  sample.language = "en";
  sample.gender = Gender::Male;
  sample.emotion = Emotion::Happy;
  sample.intensity = Intensity::Strong;
  sample.corpus = "fixture";

  const CurationReport report = build_gender_dependent_layout({sample}, dir.path() / "out", {});
  REQUIRE(report.kept == 0);
  REQUIRE(report.rejected_label == 1);
}

TEST_CASE("scan_corpus validates its inputs", "[curation]") {
  REQUIRE_THROWS_AS(scan_corpus("/no/such/root/anywhere", CorpusLayout::RavdessStyle),
                    InvalidArgument);
  REQUIRE_THROWS_AS(parse_corpus_layout("zip-archive"), InvalidArgument);
}

TEST_CASE("an unwritable destination fails the layout build", "[curation][layout]") {
  TempDir dir("layout_unwritable");
  std::ofstream(dir.path() / "occupied") << "a file, not a directory";
  REQUIRE_THROWS_AS(build_gender_dependent_layout({}, dir.path() / "occupied", {}),
                    InvalidArgument);
}
