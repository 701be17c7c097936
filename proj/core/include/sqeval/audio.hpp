#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace sqeval {

inline constexpr int kFullbandRate = 48000;

/// Mono PCM audio held as doubles in [-1, 1].
struct AudioClip {
  std::vector<double> samples;
  int sample_rate = kFullbandRate;
  int channels = 1;

  [[nodiscard]] std::size_t size() const noexcept { return samples.size(); }
  [[nodiscard]] bool empty() const noexcept { return samples.empty(); }
  [[nodiscard]] double duration_seconds() const noexcept {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
  [[nodiscard]] std::span<const double> view() const noexcept { return samples; }

  friend bool operator==(const AudioClip&, const AudioClip&) = default;
};

/// Throws InputError unless the clip is 48 kHz mono with finite samples.
/// `what` names the clip in the error message.
void require_fullband(const AudioClip& clip, std::string_view what);

[[nodiscard]] AudioClip scaled(const AudioClip& clip, double gain);

[[nodiscard]] double peak_abs(std::span<const double> samples) noexcept;

/// 10*log10(mean square), relative to a unit-amplitude RMS. -inf for silence.
[[nodiscard]] double rms_level_db(std::span<const double> samples) noexcept;

[[nodiscard]] double db_to_gain(double db) noexcept;
[[nodiscard]] double gain_to_db(double gain) noexcept;

}  // namespace sqeval
