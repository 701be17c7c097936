#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "sqeval/audio.hpp"

// Deterministic synthetic stand-ins for the clean-speech and noise corpora.
namespace sqeval::testing {

struct SpeechVoice {
  double f0_hz = 120.0;
  std::uint64_t seed = 1;
};

/// Speech-like clip: harmonic voiced segments with formant shaping,
/// syllabic envelope, short pauses, fricative bursts, and `pad_seconds` of
/// digital silence on each side. Peak about 0.5; already on the PCM16 grid.
[[nodiscard]] AudioClip synth_speech(const SpeechVoice& voice, double seconds, double pad_seconds = 0.25);

/// Stationary pinkish noise with a low hum, RMS about 0.1, on the PCM16 grid.
[[nodiscard]] AudioClip synth_noise(std::uint64_t seed, double seconds);

[[nodiscard]] AudioClip sine(double frequency_hz, double amplitude, double seconds, int rate = kFullbandRate);

/// Two male-like and two female-like voices.
[[nodiscard]] std::vector<AudioClip> speech_fixtures(double seconds);

/// Unique scratch directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  [[nodiscard]] const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace sqeval::testing
