#pragma once

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pvm/errors.hpp"
#include "pvm/types.hpp"

namespace pvm {

/// Consent metadata for one preset speaker. Revoked entries stay in the
/// library for audit history but are never returned by lookup.
struct ConsentRecord {
  std::string speaker_id;
  std::string consent_date;  // ISO-8601
  std::string scope;
  bool revoked = false;

  friend bool operator==(const ConsentRecord&, const ConsentRecord&) = default;
};

struct PresetVoiceEntry {
  std::string id;
  std::string language;  // lowercase ISO-639-1
  FeatureCode code;
  std::string audio_path;
  ConsentRecord consent;
  std::optional<double> quality_score;  // in [0, 5] when present

  friend bool operator==(const PresetVoiceEntry&, const PresetVoiceEntry&) = default;
};

struct LanguageCoverage {
  std::string language;
  std::vector<FeatureCode> missing_cells;  // cells with no usable entry
};

struct CoverageReport {
  bool ok = false;
  std::vector<LanguageCoverage> per_language;
  std::vector<std::string> missing_audio;  // entry ids whose audio file is absent
};

/// Language-partitioned feature codebook: (language, gender, emotion) cells
/// mapping to consented preset voices. Build once, then read-only.
class PresetLibrary {
 public:
  /// Throws on duplicate ids or missing consent fields. Entries that are
  /// already revoked are accepted and recorded in warnings().
  void add_entry(const PresetVoiceEntry& entry) {
    if (entry.id.empty()) throw InvalidArgument("add_entry: entry id must be non-empty");
    if (by_id_.count(entry.id)) throw InvalidArgument("add_entry: duplicate entry id '" + entry.id + "'");
    if (entry.consent.speaker_id.empty() || entry.consent.consent_date.empty()) {
      throw InvalidArgument("add_entry: entry '" + entry.id +
                            "' lacks consent speaker_id/consent_date");
    }
    if (entry.quality_score && (*entry.quality_score < 0.0 || *entry.quality_score > 5.0)) {
      throw InvalidArgument("add_entry: entry '" + entry.id + "' quality_score outside [0, 5]");
    }
    if (entry.consent.revoked) {
      warnings_.push_back("entry '" + entry.id + "' was inserted already revoked");
    }
    by_id_[entry.id] = entries_.size();
    index_[cell_key(entry.language, entry.code)].push_back(entries_.size());
    entries_.push_back(entry);
  }

  /// Deterministic cell lookup: highest quality_score among non-revoked
  /// entries wins, ties broken by lexicographically smallest id. Entries
  /// without a score rank below any scored entry.
  const PresetVoiceEntry& lookup(const std::string& language, const FeatureCode& code) const {
    if (!language_present(language)) throw UnknownLanguage(language);
    const auto it = index_.find(cell_key(language, code));
    const PresetVoiceEntry* best = nullptr;
    if (it != index_.end()) {
      for (std::size_t idx : it->second) {
        const PresetVoiceEntry& candidate = entries_[idx];
        if (candidate.consent.revoked) continue;
        if (!best || ranks_higher(candidate, *best)) best = &candidate;
      }
    }
    if (!best) throw MissingPreset(language, code.str());
    return *best;
  }

  /// Reports, per required language, which of the 10 gender-emotion cells
  /// have no usable entry, and which entries point at absent audio files.
  CoverageReport validate(const std::vector<std::string>& required_languages) const {
    CoverageReport report;
    report.ok = true;
    for (const std::string& language : required_languages) {
      LanguageCoverage coverage;
      coverage.language = language;
      for (Gender g : kGenders) {
        for (Emotion e : kEmotions) {
          const FeatureCode code{g, e};
          const auto it = index_.find(cell_key(language, code));
          bool usable = false;
          if (it != index_.end()) {
            for (std::size_t idx : it->second) {
              if (!entries_[idx].consent.revoked) {
                usable = true;
                break;
              }
            }
          }
          if (!usable) coverage.missing_cells.push_back(code);
        }
      }
      if (!coverage.missing_cells.empty()) report.ok = false;
      report.per_language.push_back(std::move(coverage));
    }
    for (const PresetVoiceEntry& entry : entries_) {
      if (!std::filesystem::exists(resolve_audio_path(entry))) {
        report.missing_audio.push_back(entry.id);
        report.ok = false;
      }
    }
    return report;
  }

  const std::vector<PresetVoiceEntry>& entries() const { return entries_; }
  const std::vector<std::string>& warnings() const { return warnings_; }
  std::size_t size() const { return entries_.size(); }

  bool language_present(const std::string& language) const {
    for (const auto& e : entries_) {
      if (e.language == language) return true;
    }
    return false;
  }

  /// Directory against which relative audio paths resolve (the manifest's
  /// directory after load_library, empty for in-memory libraries).
  const std::filesystem::path& base_dir() const { return base_dir_; }
  void set_base_dir(std::filesystem::path dir) { base_dir_ = std::move(dir); }

  std::filesystem::path resolve_audio_path(const PresetVoiceEntry& entry) const {
    const std::filesystem::path p(entry.audio_path);
    if (p.is_absolute() || base_dir_.empty()) return p;
    return base_dir_ / p;
  }

  friend bool operator==(const PresetLibrary& a, const PresetLibrary& b) {
    return a.entries_ == b.entries_;
  }

 private:
  static std::string cell_key(const std::string& language, const FeatureCode& code) {
    return language + "/" + code.str();
  }

  static bool ranks_higher(const PresetVoiceEntry& a, const PresetVoiceEntry& b) {
    const double qa = a.quality_score.value_or(-1.0);
    const double qb = b.quality_score.value_or(-1.0);
    if (qa != qb) return qa > qb;
    return a.id < b.id;
  }

  std::vector<PresetVoiceEntry> entries_;
  std::map<std::string, std::size_t> by_id_;
  std::map<std::string, std::vector<std::size_t>> index_;
  std::vector<std::string> warnings_;
  std::filesystem::path base_dir_;
};

inline constexpr const char* kLibraryManifestVersion = "pvm-lib/1";

namespace detail {

inline std::string require_string(const nlohmann::json& j, const std::string& where,
                                  const char* field) {
  if (!j.contains(field) || !j[field].is_string()) {
    throw ManifestError(where + ": missing or non-string field '" + std::string(field) + "'");
  }
  return j[field].get<std::string>();
}

}  // namespace detail

inline void save_library(const std::filesystem::path& path, const PresetLibrary& lib) {
  nlohmann::json doc;
  doc["version"] = kLibraryManifestVersion;
  doc["entries"] = nlohmann::json::array();
  for (const PresetVoiceEntry& entry : lib.entries()) {
    nlohmann::json j;
    j["id"] = entry.id;
    j["language"] = entry.language;
    j["code"] = entry.code.str();
    j["audio_path"] = entry.audio_path;
    j["consent"] = {{"speaker_id", entry.consent.speaker_id},
                    {"consent_date", entry.consent.consent_date},
                    {"scope", entry.consent.scope},
                    {"revoked", entry.consent.revoked}};
    if (entry.quality_score) j["quality_score"] = *entry.quality_score;
    doc["entries"].push_back(std::move(j));
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ManifestError("cannot write '" + path.string() + "'");
  out << doc.dump(2) << "\n";
}

/// Loads a "pvm-lib/1" manifest. Structural problems (bad version, unknown
/// enum text, missing fields) are errors naming the offending field;
/// dangling audio paths are warnings only.
inline PresetLibrary load_library(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ManifestError("cannot open '" + path.string() + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ManifestError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
  if (!doc.contains("version") || doc["version"] != kLibraryManifestVersion) {
    throw ManifestError("'" + path.string() + "': version must be '" +
                        std::string(kLibraryManifestVersion) + "'");
  }
  if (!doc.contains("entries") || !doc["entries"].is_array()) {
    throw ManifestError("'" + path.string() + "': missing 'entries' array");
  }

  PresetLibrary lib;
  lib.set_base_dir(path.has_parent_path() ? path.parent_path() : std::filesystem::path("."));
  std::size_t idx = 0;
  for (const auto& j : doc["entries"]) {
    const std::string where = "entries[" + std::to_string(idx) + "]";
    PresetVoiceEntry entry;
    entry.id = detail::require_string(j, where, "id");
    entry.language = detail::require_string(j, where, "language");
    const std::string code_text = detail::require_string(j, where, "code");
    try {
      entry.code = parse_feature_code(code_text);
    } catch (const InvalidArgument& e) {
      throw ManifestError(where + ".code: " + e.what());
    }
    entry.audio_path = detail::require_string(j, where, "audio_path");
    if (!j.contains("consent") || !j["consent"].is_object()) {
      throw ManifestError(where + ": missing 'consent' object");
    }
    const auto& consent = j["consent"];
    entry.consent.speaker_id = detail::require_string(consent, where + ".consent", "speaker_id");
    entry.consent.consent_date = detail::require_string(consent, where + ".consent", "consent_date");
    entry.consent.scope = consent.value("scope", std::string{});
    entry.consent.revoked = consent.value("revoked", false);
    if (j.contains("quality_score")) {
      if (!j["quality_score"].is_number()) {
        throw ManifestError(where + ".quality_score: must be a number");
      }
      entry.quality_score = j["quality_score"].get<double>();
    }
    try {
      lib.add_entry(entry);
    } catch (const InvalidArgument& e) {
      throw ManifestError(where + ": " + e.what());
    }
    ++idx;
  }
  return lib;
}

}  // namespace pvm
