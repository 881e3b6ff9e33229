#pragma once

#include <array>
#include <cctype>
#include <string>
#include <string_view>

#include "pvm/errors.hpp"

namespace pvm {

enum class Gender { Male, Female };

/// Five-emotion label set used across curation, classification and the
/// preset codebook. Calm-style labels in source corpora fold into Neutral.
enum class Emotion { Happy, Angry, Sad, Disgust, Neutral };

inline constexpr std::array<Gender, 2> kGenders = {Gender::Male, Gender::Female};
inline constexpr std::array<Emotion, 5> kEmotions = {
    Emotion::Happy, Emotion::Angry, Emotion::Sad, Emotion::Disgust, Emotion::Neutral};

inline std::string to_string(Gender g) {
  return g == Gender::Male ? "Male" : "Female";
}

inline std::string to_string(Emotion e) {
  switch (e) {
    case Emotion::Happy: return "Happy";
    case Emotion::Angry: return "Angry";
    case Emotion::Sad: return "Sad";
    case Emotion::Disgust: return "Disgust";
    case Emotion::Neutral: return "Neutral";
  }
  return "Neutral";
}

namespace detail {

inline std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace detail

/// Case-insensitive parse; throws InvalidArgument on anything outside the set.
inline Gender parse_gender(std::string_view text) {
  const std::string s = detail::ascii_lower(text);
  if (s == "male") return Gender::Male;
  if (s == "female") return Gender::Female;
  throw InvalidArgument("unknown gender '" + std::string(text) + "'");
}

inline Emotion parse_emotion(std::string_view text) {
  const std::string s = detail::ascii_lower(text);
  if (s == "happy") return Emotion::Happy;
  if (s == "angry") return Emotion::Angry;
  if (s == "sad") return Emotion::Sad;
  if (s == "disgust") return Emotion::Disgust;
  if (s == "neutral" || s == "calm") return Emotion::Neutral;
  throw InvalidArgument("unknown emotion '" + std::string(text) + "'");
}

/// The (gender, emotion) pair produced by the two-stage classifier and used
/// as the codebook key fragment.
struct FeatureCode {
  Gender gender = Gender::Male;
  Emotion emotion = Emotion::Neutral;

  /// Canonical text form, e.g. "Female-Sad".
  std::string str() const { return to_string(gender) + "-" + to_string(emotion); }

  friend bool operator==(const FeatureCode& a, const FeatureCode& b) {
    return a.gender == b.gender && a.emotion == b.emotion;
  }
  friend bool operator!=(const FeatureCode& a, const FeatureCode& b) { return !(a == b); }
};

/// Parses the canonical "<Gender>-<Emotion>" form (case-insensitive).
inline FeatureCode parse_feature_code(std::string_view text) {
  const auto dash = text.find('-');
  if (dash == std::string_view::npos) {
    throw InvalidArgument("feature code '" + std::string(text) +
                          "' is not of the form <Gender>-<Emotion>");
  }
  return FeatureCode{parse_gender(text.substr(0, dash)), parse_emotion(text.substr(dash + 1))};
}

/// Lowercase directory names used by the gender-partitioned dataset layout.
inline std::string dir_name(Gender g) { return detail::ascii_lower(to_string(g)); }
inline std::string dir_name(Emotion e) { return detail::ascii_lower(to_string(e)); }

}  // namespace pvm
