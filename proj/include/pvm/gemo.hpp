#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pvm/audio.hpp"
#include "pvm/dsp.hpp"
#include "pvm/errors.hpp"
#include "pvm/features.hpp"
#include "pvm/softmax.hpp"
#include "pvm/types.hpp"

namespace pvm {

inline std::vector<std::string> gender_label_names() {
  return {to_string(Gender::Male), to_string(Gender::Female)};
}

inline std::vector<std::string> emotion_label_names() {
  std::vector<std::string> out;
  for (Emotion e : kEmotions) out.push_back(to_string(e));
  return out;
}

/// The two-stage classifier set: a gender model plus one emotion model per
/// gender. The emotion models must share one label set and ordering.
struct GemoModelSet {
  SoftmaxModel gender;
  SoftmaxModel male_emotion;
  SoftmaxModel female_emotion;

  void validate() const {
    if (gender.class_labels != gender_label_names()) {
      throw InvalidArgument("GemoModelSet: gender model labels must be [Male, Female]");
    }
    if (male_emotion.class_labels != emotion_label_names() ||
        female_emotion.class_labels != male_emotion.class_labels) {
      throw InvalidArgument(
          "GemoModelSet: emotion models must share the canonical five-emotion label order");
    }
  }
};

/// Which classifiers actually ran during one hierarchical classification.
struct ClassifierTrace {
  bool gender_ran = false;
  bool male_emotion_ran = false;
  bool female_emotion_ran = false;
};

struct HierarchicalResult {
  FeatureCode code;
  std::vector<double> gender_probabilities;
  std::vector<double> emotion_probabilities;
  ClassifierTrace trace;
};

/// Stage 1 classifies gender; the input is then routed to exactly one
/// gender-dependent emotion classifier and the two labels are concatenated.
inline HierarchicalResult classify_features(const GemoModelSet& models, const FeatureVector& x) {
  models.validate();
  HierarchicalResult result;

  const Prediction gender_pred = predict(models.gender, x);
  result.trace.gender_ran = true;
  result.gender_probabilities = gender_pred.probabilities;
  result.code.gender = parse_gender(gender_pred.label);

  const SoftmaxModel& emotion_model =
      result.code.gender == Gender::Male ? models.male_emotion : models.female_emotion;
  const Prediction emotion_pred = predict(emotion_model, x);
  if (result.code.gender == Gender::Male) {
    result.trace.male_emotion_ran = true;
  } else {
    result.trace.female_emotion_ran = true;
  }
  result.emotion_probabilities = emotion_pred.probabilities;
  result.code.emotion = parse_emotion(emotion_pred.label);
  return result;
}

inline HierarchicalResult classify_hierarchical(const GemoModelSet& models, const AudioClip& clip,
                                                const StftConfig& config = {}) {
  return classify_features(models, extract_features(mel_spectrogram(clip, config)));
}

// Conventional on-disk layout for a trained model set.
inline constexpr const char* kGenderModelFile = "gender.smx";
inline constexpr const char* kMaleEmotionModelFile = "male-emotion.smx";
inline constexpr const char* kFemaleEmotionModelFile = "female-emotion.smx";

inline void save_model_set(const std::filesystem::path& dir, const GemoModelSet& models) {
  models.validate();
  std::filesystem::create_directories(dir);
  save_model(dir / kGenderModelFile, models.gender);
  save_model(dir / kMaleEmotionModelFile, models.male_emotion);
  save_model(dir / kFemaleEmotionModelFile, models.female_emotion);
}

inline GemoModelSet load_model_set(const std::filesystem::path& dir) {
  GemoModelSet models;
  models.gender = load_model(dir / kGenderModelFile);
  models.male_emotion = load_model(dir / kMaleEmotionModelFile);
  models.female_emotion = load_model(dir / kFemaleEmotionModelFile);
  models.validate();
  return models;
}

}  // namespace pvm
