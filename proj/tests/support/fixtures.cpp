#include "fixtures.hpp"

#include <atomic>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "sqeval/wav.hpp"

namespace sqeval::testing {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Sum of three formant bumps; shapes harmonic amplitudes.
double formant_gain(double f, double shift) {
  const double centers[] = {600.0 * shift, 1400.0 * shift, 2600.0 * shift};
  const double widths[] = {150.0, 250.0, 400.0};
  const double heights[] = {1.0, 0.6, 0.3};
  double g = 0.02;
  for (int i = 0; i < 3; ++i) g += heights[i] * std::exp(-0.5 * std::pow((f - centers[i]) / widths[i], 2.0));
  return g;
}

}  // namespace

AudioClip synth_speech(const SpeechVoice& voice, double seconds, double pad_seconds) {
  const int rate = kFullbandRate;
  const auto body = static_cast<std::size_t>(seconds * rate);
  const auto pad = static_cast<std::size_t>(pad_seconds * rate);
  std::mt19937_64 rng(voice.seed);

  // Syllable plan: alternating voiced syllables (150-300 ms), occasional
  // fricatives (60-120 ms) and pauses (80-300 ms).
  struct Segment {
    std::size_t start, length;
    int type;  // 0 voiced, 1 fricative, 2 pause
    double shift;
  };
  std::vector<Segment> plan;
  std::size_t t = 0;
  while (t < body) {
    const double r = uniform(rng);
    Segment s{t, 0, r < 0.65 ? 0 : (r < 0.8 ? 1 : 2), 0.85 + 0.3 * uniform(rng)};
    const double ms = s.type == 0 ? 150 + 150 * uniform(rng) : (s.type == 1 ? 60 + 60 * uniform(rng) : 80 + 220 * uniform(rng));
    s.length = std::min<std::size_t>(static_cast<std::size_t>(ms * rate / 1000.0), body - t);
    plan.push_back(s);
    t += s.length;
  }

  std::vector<double> x(body, 0.0);
  double phase = 0.0;
  double lp = 0.0;
  for (const auto& s : plan) {
    if (s.type == 2) continue;
    const int harmonics = static_cast<int>(7000.0 / voice.f0_hz);
    // Harmonic weights are frozen per syllable at the nominal f0.
    std::vector<double> amplitude(static_cast<std::size_t>(harmonics) + 1, 0.0);
    for (int k = 1; k <= harmonics; ++k) {
      amplitude[static_cast<std::size_t>(k)] = formant_gain(k * voice.f0_hz, s.shift) / std::sqrt(k);
    }
    for (std::size_t i = 0; i < s.length; ++i) {
      const double u = static_cast<double>(i) / static_cast<double>(s.length);
      const double env = std::sin(std::numbers::pi * u);
      const double time = static_cast<double>(s.start + i) / rate;
      if (s.type == 0) {
        const double f0 = voice.f0_hz * (1.0 + 0.08 * std::sin(kTwoPi * 2.3 * time) + 0.04 * (u - 0.5));
        phase += kTwoPi * f0 / rate;
        if (phase > kTwoPi) phase -= kTwoPi;
        // sin(k*phase) by the Chebyshev recurrence.
        const double c2 = 2.0 * std::cos(phase);
        double s_prev = 0.0;
        double s_cur = std::sin(phase);
        double v = 0.0;
        for (int k = 1; k <= harmonics; ++k) {
          v += amplitude[static_cast<std::size_t>(k)] * s_cur;
          const double s_next = c2 * s_cur - s_prev;
          s_prev = s_cur;
          s_cur = s_next;
        }
        x[s.start + i] = 0.12 * env * v;
      } else {
        const double w = 2.0 * uniform(rng) - 1.0;
        const double hp = w - lp;  // crude high-pass
        lp = 0.7 * lp + 0.3 * w;
        x[s.start + i] = 0.15 * env * hp;
      }
    }
  }

  const double peak = peak_abs(x);
  AudioClip clip;
  clip.samples.assign(pad, 0.0);
  for (double v : x) clip.samples.push_back(0.5 * v / peak);
  clip.samples.insert(clip.samples.end(), pad, 0.0);
  return wav::quantize_pcm16(clip);
}

AudioClip synth_noise(std::uint64_t seed, double seconds) {
  const int rate = kFullbandRate;
  const auto n = static_cast<std::size_t>(seconds * rate);
  std::mt19937_64 rng(seed);
  // Paul Kellet's pink filter on white noise.
  double b0 = 0, b1 = 0, b2 = 0, b3 = 0, b4 = 0, b5 = 0, b6 = 0;
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = 2.0 * uniform(rng) - 1.0;
    b0 = 0.99886 * b0 + w * 0.0555179;
    b1 = 0.99332 * b1 + w * 0.0750759;
    b2 = 0.96900 * b2 + w * 0.1538520;
    b3 = 0.86650 * b3 + w * 0.3104856;
    b4 = 0.55000 * b4 + w * 0.5329522;
    b5 = -0.7616 * b5 - w * 0.0168980;
    const double pink = b0 + b1 + b2 + b3 + b4 + b5 + b6 + w * 0.5362;
    b6 = w * 0.115926;
    x[i] = pink + 0.3 * std::sin(kTwoPi * 100.0 * static_cast<double>(i) / rate);
  }
  double ss = 0.0;
  for (double v : x) ss += v * v;
  const double gain = 0.1 / std::sqrt(ss / static_cast<double>(n));
  AudioClip clip;
  for (double v : x) clip.samples.push_back(v * gain);
  return wav::quantize_pcm16(clip);
}

AudioClip sine(double frequency_hz, double amplitude, double seconds, int rate) {
  AudioClip clip;
  clip.sample_rate = rate;
  const auto n = static_cast<std::size_t>(seconds * rate);
  clip.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    clip.samples[i] = amplitude * std::sin(kTwoPi * frequency_hz * static_cast<double>(i) / rate);
  }
  return clip;
}

std::vector<AudioClip> speech_fixtures(double seconds) {
  return {synth_speech({110.0, 11}, seconds), synth_speech({130.0, 12}, seconds),
          synth_speech({205.0, 13}, seconds), synth_speech({235.0, 14}, seconds)};
}

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  std::random_device rd;
  path_ = std::filesystem::temp_directory_path() /
          ("sqeval-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

}  // namespace sqeval::testing
