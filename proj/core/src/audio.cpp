#include "sqeval/audio.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sqeval/error.hpp"

namespace sqeval {

void require_fullband(const AudioClip& clip, std::string_view what) {
  if (clip.sample_rate != kFullbandRate) {
    throw InputError(std::string(what) + ": unsupported sample rate " + std::to_string(clip.sample_rate) +
                     " Hz (expected 48000; no resampling is performed)");
  }
  if (clip.channels != 1) {
    throw InputError(std::string(what) + ": expected mono audio, got " + std::to_string(clip.channels) +
                     " channels");
  }
  if (!std::all_of(clip.samples.begin(), clip.samples.end(), [](double x) { return std::isfinite(x); })) {
    throw InputError(std::string(what) + ": non-finite sample");
  }
}

AudioClip scaled(const AudioClip& clip, double gain) {
  AudioClip out = clip;
  for (double& x : out.samples) x *= gain;
  return out;
}

double peak_abs(std::span<const double> samples) noexcept {
  double p = 0.0;
  for (double x : samples) p = std::max(p, std::abs(x));
  return p;
}

double rms_level_db(std::span<const double> samples) noexcept {
  if (samples.empty()) return -std::numeric_limits<double>::infinity();
  double energy = 0.0;
  for (double x : samples) energy += x * x;
  return 10.0 * std::log10(energy / static_cast<double>(samples.size()));
}

double db_to_gain(double db) noexcept { return std::pow(10.0, db / 20.0); }

double gain_to_db(double gain) noexcept { return 20.0 * std::log10(gain); }

}  // namespace sqeval
