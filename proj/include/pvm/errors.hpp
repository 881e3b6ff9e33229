#pragma once

#include <stdexcept>
#include <string>

namespace pvm {

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A precondition on an operation's inputs was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// WAV file could not be parsed or written.
class WavError : public Error {
 public:
  using Error::Error;
};

/// PNG buffer could not be parsed.
class PngError : public Error {
 public:
  using Error::Error;
};

/// A persisted manifest (library JSON, stream/curation CSV) is malformed.
class ManifestError : public Error {
 public:
  using Error::Error;
};

/// A serialized classifier model file is malformed.
class ModelFormatError : public Error {
 public:
  using Error::Error;
};

/// No usable (non-revoked) preset exists for the requested cell.
class MissingPreset : public Error {
 public:
  MissingPreset(const std::string& language, const std::string& code)
      : Error("no preset voice available for (" + language + ", " + code + ")"),
        language_(language),
        code_(code) {}

  const std::string& language() const { return language_; }
  const std::string& code() const { return code_; }

 private:
  std::string language_;
  std::string code_;
};

/// The requested target language has no entries at all in the library.
class UnknownLanguage : public Error {
 public:
  explicit UnknownLanguage(const std::string& language)
      : Error("language '" + language + "' is not present in the preset library"),
        language_(language) {}

  const std::string& language() const { return language_; }

 private:
  std::string language_;
};

/// External TTS command exited with a nonzero status.
class ExternalFailure : public Error {
 public:
  ExternalFailure(int exit_code, const std::string& diagnostics)
      : Error("external TTS command failed with exit code " + std::to_string(exit_code) +
              (diagnostics.empty() ? "" : ": " + diagnostics)),
        exit_code_(exit_code) {}

  int exit_code() const { return exit_code_; }

 private:
  int exit_code_;
};

/// External TTS command did not finish within the configured deadline.
class ExternalTimeout : public Error {
 public:
  using Error::Error;
};

/// External TTS command finished but produced no readable output file.
class ExternalOutputError : public Error {
 public:
  using Error::Error;
};

}  // namespace pvm
