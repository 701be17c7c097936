#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sqeval/audio.hpp"

// Reference-condition synthesis for fullband P.835 tests: A-weighted SNR
// mixing and four graded levels of Wiener-type spectral-subtraction
// speech distortion, combined into the twelve conditions i01..i12.
namespace sqeval::refcond {

struct ConditionSpec {
  std::string id;
  std::optional<int> ns_level;     // 1 (strongest) .. 4 (mildest)
  std::optional<double> snr_db_a;  // A-weighted speech-to-noise ratio

  friend bool operator==(const ConditionSpec&, const ConditionSpec&) = default;
};

/// The twelve reference conditions, i01..i12, in table order.
[[nodiscard]] const std::array<ConditionSpec, 12>& reference_conditions();

/// Looks up i01..i12. Throws InputError for unknown ids.
[[nodiscard]] const ConditionSpec& find_condition(std::string_view id);

/// Throws ConfigError unless `spec` is exactly one of the twelve rows.
void validate(const ConditionSpec& spec);

/// STFT Wiener-gain distortion parameters.
///
/// Per bin, the a-posteriori SNR is taken against a virtual noise PSD equal
/// to the clip's long-term power spectrum shifted by `noise_reference_db`
/// and multiplied by `over_subtraction`. The a-priori SNR follows the
/// decision-directed rule with weight `smoothing`, and the applied gain is
/// max(xi / (1 + xi), gain_floor).
struct DistortionParams {
  double over_subtraction = 1.0;
  double gain_floor = 1.0;
  double frame_ms = 32.0;
  double hop_ms = 16.0;
  double smoothing = 0.98;
  double noise_reference_db = -25.0;

  /// Level presets 1..4; level 1 is the harshest.
  [[nodiscard]] static DistortionParams preset(int level);
  /// Gain identically 1: the chain reduces to STFT analysis/resynthesis.
  [[nodiscard]] static DistortionParams identity();

  void validate() const;
};

/// Active level in dB (re unit RMS) over 20 ms frames whose energy lies
/// within 35 dB of the loudest frame. Throws NoActiveSpeechError for
/// empty or all-zero clips.
[[nodiscard]] double active_speech_level(const AudioClip& clip);

inline constexpr double kActivityThresholdDb = 35.0;
inline constexpr double kActivityFrameMs = 20.0;

/// Whole-clip frequency-domain A-weighting. 48 kHz only.
[[nodiscard]] AudioClip a_weight(const AudioClip& clip);

/// active_speech_level(a_weight(speech)).
[[nodiscard]] double a_weighted_speech_level(const AudioClip& speech);

/// Total RMS level of a_weight(noise). Throws InputError for silence.
[[nodiscard]] double a_weighted_noise_level(const AudioClip& noise);

struct MixResult {
  AudioClip mixture;
  /// The two addends of `mixture`, post-mix scale included.
  AudioClip speech_component;
  AudioClip noise_component;
  /// Linear gain applied to the noise segment before the post-mix scale.
  double noise_gain = 1.0;
  /// 1 unless the mixture peaked above 1 and was scaled to kClipPeak.
  double post_mix_scale = 1.0;

  [[nodiscard]] double noise_gain_db() const noexcept { return gain_to_db(noise_gain); }
};

inline constexpr double kClipPeak = 0.99;

/// Adds the leading speech-length segment of `noise` so that the
/// A-weighted active speech level exceeds the A-weighted noise level by
/// `snr_db_a`. Noise shorter than speech is an error (never looped).
[[nodiscard]] MixResult mix_at_snr(const AudioClip& speech, const AudioClip& noise, double snr_db_a);

[[nodiscard]] AudioClip apply_ns_distortion(const AudioClip& speech, int level);
[[nodiscard]] AudioClip apply_ns_distortion(const AudioClip& speech, const DistortionParams& params);

struct ConditionOutput {
  AudioClip audio;
  std::optional<double> noise_gain_db;  // set for mixed conditions
  double post_mix_scale = 1.0;
};

/// Runs the chain for one condition: distortion on clean speech first,
/// then mixing with unprocessed noise. i01 is a passthrough.
[[nodiscard]] ConditionOutput generate_condition(const ConditionSpec& spec, const AudioClip& speech,
                                                 const AudioClip& noise);

/// One line of a batch manifest.
struct ManifestEntry {
  std::filesystem::path speech_path;
  std::filesystem::path noise_path;
  std::string condition_id;
  std::filesystem::path output_path;
  std::optional<double> applied_noise_gain_db;
  std::optional<double> post_mix_scale;
};

/// Processes every entry (reading and writing WAV files), filling in the
/// applied gains. Relative output paths resolve against `out_dir`.
/// Entries run on up to `threads` workers. On any failure, files written by
/// this call are removed and the first error is rethrown.
void run_manifest(std::vector<ManifestEntry>& entries, const std::filesystem::path& out_dir,
                  unsigned threads = 1);

}  // namespace sqeval::refcond
