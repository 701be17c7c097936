#include "sqeval/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>

#include <fftw3.h>

#include "sqeval/error.hpp"

namespace sqeval {
namespace {

// FFTW's planner is not re-entrant; execution on distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct RealFft::Impl {
  std::size_t n = 0;
  double* real = nullptr;
  fftw_complex* spectrum = nullptr;
  fftw_plan forward_plan = nullptr;
  fftw_plan inverse_plan = nullptr;

  explicit Impl(std::size_t size) : n(size) {
    std::lock_guard lock(planner_mutex());
    real = fftw_alloc_real(n);
    spectrum = fftw_alloc_complex(n / 2 + 1);
    const int len = static_cast<int>(n);
    forward_plan = fftw_plan_dft_r2c_1d(len, real, spectrum, FFTW_ESTIMATE);
    inverse_plan = fftw_plan_dft_c2r_1d(len, spectrum, real, FFTW_ESTIMATE);
  }

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward_plan);
    fftw_destroy_plan(inverse_plan);
    fftw_free(real);
    fftw_free(spectrum);
  }

  Impl(const Impl&) = delete;
  Impl& operator=(const Impl&) = delete;
};

RealFft::RealFft(std::size_t n) {
  if (n == 0) throw InputError("FFT length must be positive");
  impl_ = std::make_unique<Impl>(n);
}

RealFft::~RealFft() = default;
RealFft::RealFft(RealFft&&) noexcept = default;
RealFft& RealFft::operator=(RealFft&&) noexcept = default;

std::size_t RealFft::size() const noexcept { return impl_->n; }

void RealFft::forward(std::span<const double> in, std::span<std::complex<double>> out) {
  const std::size_t n = impl_->n;
  std::copy_n(in.begin(), std::min(n, in.size()), impl_->real);
  std::fill(impl_->real + std::min(n, in.size()), impl_->real + n, 0.0);
  fftw_execute(impl_->forward_plan);
  for (std::size_t k = 0; k < bins(); ++k) out[k] = {impl_->spectrum[k][0], impl_->spectrum[k][1]};
}

void RealFft::inverse(std::span<const std::complex<double>> in, std::span<double> out) {
  // c2r destroys its input, so the spectrum is staged in the owned buffer.
  for (std::size_t k = 0; k < bins(); ++k) {
    impl_->spectrum[k][0] = in[k].real();
    impl_->spectrum[k][1] = in[k].imag();
  }
  fftw_execute(impl_->inverse_plan);
  std::copy_n(impl_->real, impl_->n, out.begin());
}

double a_weighting_db(double frequency_hz) noexcept {
  const auto response = [](double f) {
    const double f2 = f * f;
    const double num = 12194.0 * 12194.0 * f2 * f2;
    const double den = (f2 + 20.6 * 20.6) * std::sqrt((f2 + 107.7 * 107.7) * (f2 + 737.9 * 737.9)) *
                       (f2 + 12194.0 * 12194.0);
    return num / den;
  };
  static const double at_1k = response(1000.0);
  if (frequency_hz <= 0.0) return -std::numeric_limits<double>::infinity();
  return 20.0 * std::log10(response(frequency_hz) / at_1k);
}

std::vector<double> hann_periodic(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n)));
  }
  return w;
}

std::vector<double> sqrt_hann(std::size_t n) {
  auto w = hann_periodic(n);
  for (double& x : w) x = std::sqrt(x);
  return w;
}

StftGeometry StftGeometry::from_ms(double frame_ms, double hop_ms, int sample_rate) {
  const auto frame = static_cast<std::size_t>(std::lround(frame_ms * sample_rate / 1000.0));
  const auto hop = static_cast<std::size_t>(std::lround(hop_ms * sample_rate / 1000.0));
  if (frame < 2 || frame % 2 != 0 || hop * 2 != frame) {
    throw ConfigError("STFT geometry must use even frames with 50% overlap");
  }
  return {frame, hop};
}

Stft::Stft(StftGeometry geometry) : geometry_(geometry), window_(sqrt_hann(geometry.frame)), fft_(geometry.frame) {
  if (geometry.hop * 2 != geometry.frame) throw ConfigError("STFT hop must be half the frame");
}

Spectrogram Stft::analyze(std::span<const double> signal) {
  const std::size_t n = geometry_.frame;
  const std::size_t hop = geometry_.hop;
  // Leading pad of n - hop puts every input sample under two frames.
  std::vector<double> padded(n - hop + signal.size() + n, 0.0);
  std::copy(signal.begin(), signal.end(), padded.begin() + static_cast<std::ptrdiff_t>(n - hop));

  Spectrogram frames;
  std::vector<double> buf(n);
  for (std::size_t start = 0; start + n <= padded.size(); start += hop) {
    for (std::size_t i = 0; i < n; ++i) buf[i] = padded[start + i] * window_[i];
    auto& spec = frames.emplace_back(fft_.bins());
    fft_.forward(buf, spec);
  }
  return frames;
}

std::vector<double> Stft::synthesize(const Spectrogram& frames, std::size_t length) {
  const std::size_t n = geometry_.frame;
  const std::size_t hop = geometry_.hop;
  std::vector<double> padded(n - hop + length + n, 0.0);
  std::vector<double> buf(n);
  const double norm = 1.0 / static_cast<double>(n);
  std::size_t start = 0;
  for (const auto& spec : frames) {
    if (start + n > padded.size()) break;
    fft_.inverse(spec, buf);
    for (std::size_t i = 0; i < n; ++i) padded[start + i] += buf[i] * norm * window_[i];
    start += hop;
  }
  const auto first = padded.begin() + static_cast<std::ptrdiff_t>(n - hop);
  return {first, first + static_cast<std::ptrdiff_t>(length)};
}

double log_spectral_distance(const AudioClip& reference, const AudioClip& test) {
  if (reference.size() != test.size()) throw InputError("log-spectral distance needs equal-length clips");
  if (reference.empty()) throw InputError("log-spectral distance of empty clips");

  const auto geometry = StftGeometry::from_ms(32.0, 16.0, reference.sample_rate);
  const std::size_t n = geometry.frame;
  const auto window = hann_periodic(n);
  RealFft fft(n);
  std::vector<double> a(n), b(n);
  std::vector<std::complex<double>> fa(fft.bins()), fb(fft.bins());

  const std::size_t len = reference.size();
  const std::size_t frames = len <= n ? 1 : (len - n) / geometry.hop + 1;
  double total = 0.0;
  for (std::size_t f = 0; f < frames; ++f) {
    const std::size_t start = f * geometry.hop;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t idx = start + i;
      a[i] = idx < len ? reference.samples[idx] * window[i] : 0.0;
      b[i] = idx < len ? test.samples[idx] * window[i] : 0.0;
    }
    fft.forward(a, fa);
    fft.forward(b, fb);
    double acc = 0.0;
    for (std::size_t k = 0; k < fft.bins(); ++k) {
      const double d = 10.0 * std::log10((std::norm(fa[k]) + kLsdPowerFloor) / (std::norm(fb[k]) + kLsdPowerFloor));
      acc += d * d;
    }
    total += std::sqrt(acc / static_cast<double>(fft.bins()));
  }
  return total / static_cast<double>(frames);
}

}  // namespace sqeval
