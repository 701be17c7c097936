#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "sqeval/audio.hpp"

namespace sqeval {

/// Real-to-complex FFT of a fixed length. Spectra hold n/2 + 1 bins.
/// Instances are not shareable across threads; construction is thread-safe.
class RealFft {
 public:
  explicit RealFft(std::size_t n);
  ~RealFft();
  RealFft(RealFft&&) noexcept;
  RealFft& operator=(RealFft&&) noexcept;
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  [[nodiscard]] std::size_t size() const noexcept;
  [[nodiscard]] std::size_t bins() const noexcept { return size() / 2 + 1; }

  void forward(std::span<const double> in, std::span<std::complex<double>> out);
  /// Unnormalized inverse: inverse(forward(x)) == n * x.
  void inverse(std::span<const std::complex<double>> in, std::span<double> out);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// IEC 61672 A-weighting magnitude in dB, normalized to 0 dB at 1 kHz.
[[nodiscard]] double a_weighting_db(double frequency_hz) noexcept;

/// Periodic Hann window; sqrt of it is used for analysis and synthesis.
[[nodiscard]] std::vector<double> hann_periodic(std::size_t n);
[[nodiscard]] std::vector<double> sqrt_hann(std::size_t n);

struct StftGeometry {
  std::size_t frame = 1536;
  std::size_t hop = 768;

  /// 32 ms frames at 50% overlap for the given rate.
  [[nodiscard]] static StftGeometry from_ms(double frame_ms, double hop_ms, int sample_rate);
};

using Spectrogram = std::vector<std::vector<std::complex<double>>>;

/// sqrt-Hann STFT with hop = frame/2. The signal is zero padded so that
/// istft(stft(x), x.size()) reconstructs x up to rounding.
class Stft {
 public:
  explicit Stft(StftGeometry geometry);

  [[nodiscard]] const StftGeometry& geometry() const noexcept { return geometry_; }
  [[nodiscard]] Spectrogram analyze(std::span<const double> signal);
  [[nodiscard]] std::vector<double> synthesize(const Spectrogram& frames, std::size_t length);

 private:
  StftGeometry geometry_;
  std::vector<double> window_;
  RealFft fft_;
};

/// Mean frame-wise log-spectral distance in dB between two equal-length
/// clips: Hann-windowed 32 ms frames, 50% hop, power floor 1e-10.
[[nodiscard]] double log_spectral_distance(const AudioClip& reference, const AudioClip& test);

inline constexpr double kLsdPowerFloor = 1e-10;

}  // namespace sqeval
