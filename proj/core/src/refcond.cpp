#include "sqeval/refcond.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <set>
#include <thread>

#include "sqeval/error.hpp"
#include "sqeval/logging.hpp"
#include "sqeval/spectrum.hpp"
#include "sqeval/wav.hpp"

namespace sqeval::refcond {
namespace {

const std::array<ConditionSpec, 12> kConditions{{
    {"i01", std::nullopt, std::nullopt},
    {"i02", std::nullopt, 0.0},
    {"i03", std::nullopt, 12.0},
    {"i04", std::nullopt, 24.0},
    {"i05", std::nullopt, 36.0},
    {"i06", 1, std::nullopt},
    {"i07", 2, std::nullopt},
    {"i08", 3, std::nullopt},
    {"i09", 4, std::nullopt},
    {"i10", 3, 24.0},
    {"i11", 2, 12.0},
    {"i12", 1, 0.0},
}};

// Presets are ordered strictly: over-subtraction falls and the floor rises
// from level 1 (harshest) to level 4 (mildest).
const std::array<DistortionParams, 4> kPresets{{
    {4.0, 0.05},
    {2.5, 0.10},
    {1.6, 0.18},
    {1.0, 0.30},
}};

// Scales the whole signal so its peak is kClipPeak, returning the scale.
double guard_clipping(std::initializer_list<AudioClip*> clips, const AudioClip& mixture) {
  const double peak = peak_abs(mixture.samples);
  if (peak <= 1.0) return 1.0;
  const double scale = kClipPeak / peak;
  for (AudioClip* c : clips) {
    for (double& x : c->samples) x *= scale;
  }
  return scale;
}

}  // namespace

const std::array<ConditionSpec, 12>& reference_conditions() { return kConditions; }

const ConditionSpec& find_condition(std::string_view id) {
  for (const auto& c : kConditions) {
    if (c.id == id) return c;
  }
  throw InputError("unknown reference condition '" + std::string(id) + "' (expected i01..i12)");
}

void validate(const ConditionSpec& spec) {
  for (const auto& c : kConditions) {
    if (c == spec) return;
  }
  throw ConfigError("condition '" + spec.id + "' does not match any reference condition row");
}

DistortionParams DistortionParams::preset(int level) {
  if (level < 1 || level > 4) throw ConfigError("NS distortion level must be 1..4, got " + std::to_string(level));
  return kPresets[static_cast<std::size_t>(level - 1)];
}

DistortionParams DistortionParams::identity() { return {1.0, 1.0}; }

void DistortionParams::validate() const {
  if (!(over_subtraction >= 1.0)) throw ConfigError("over_subtraction must be >= 1");
  if (!(gain_floor > 0.0 && gain_floor <= 1.0)) throw ConfigError("gain_floor must lie in (0, 1]");
  if (!(smoothing >= 0.0 && smoothing < 1.0)) throw ConfigError("smoothing must lie in [0, 1)");
  if (!std::isfinite(noise_reference_db)) throw ConfigError("noise_reference_db must be finite");
}

double active_speech_level(const AudioClip& clip) {
  if (clip.empty()) throw NoActiveSpeechError("no active speech: empty clip");
  const auto frame = static_cast<std::size_t>(std::lround(kActivityFrameMs * clip.sample_rate / 1000.0));

  std::vector<double> energy;  // per-frame sum of squares
  std::vector<std::size_t> length;
  for (std::size_t start = 0; start < clip.size(); start += frame) {
    const std::size_t end = std::min(start + frame, clip.size());
    double e = 0.0;
    for (std::size_t i = start; i < end; ++i) e += clip.samples[i] * clip.samples[i];
    energy.push_back(e);
    length.push_back(end - start);
  }

  double peak_ms = 0.0;
  for (std::size_t f = 0; f < energy.size(); ++f) {
    peak_ms = std::max(peak_ms, energy[f] / static_cast<double>(length[f]));
  }
  if (peak_ms <= 0.0) throw NoActiveSpeechError("no active speech: clip is silent");

  const double threshold = peak_ms * std::pow(10.0, -kActivityThresholdDb / 10.0);
  double active_energy = 0.0;
  std::size_t active_samples = 0;
  for (std::size_t f = 0; f < energy.size(); ++f) {
    if (energy[f] / static_cast<double>(length[f]) >= threshold) {
      active_energy += energy[f];
      active_samples += length[f];
    }
  }
  return 10.0 * std::log10(active_energy / static_cast<double>(active_samples));
}

AudioClip a_weight(const AudioClip& clip) {
  require_fullband(clip, "A-weighting input");
  if (clip.empty()) return clip;

  const std::size_t n = clip.size();
  RealFft fft(n);
  std::vector<std::complex<double>> spec(fft.bins());
  fft.forward(clip.samples, spec);
  const double bin_hz = static_cast<double>(clip.sample_rate) / static_cast<double>(n);
  spec[0] = 0.0;
  for (std::size_t k = 1; k < spec.size(); ++k) {
    spec[k] *= db_to_gain(a_weighting_db(static_cast<double>(k) * bin_hz));
  }
  AudioClip out = clip;
  fft.inverse(spec, out.samples);
  for (double& x : out.samples) x /= static_cast<double>(n);
  return out;
}

double a_weighted_speech_level(const AudioClip& speech) { return active_speech_level(a_weight(speech)); }

double a_weighted_noise_level(const AudioClip& noise) {
  const AudioClip weighted = a_weight(noise);
  if (peak_abs(weighted.samples) == 0.0) throw InputError("noise is silent; cannot set an SNR");
  return rms_level_db(weighted.samples);
}

MixResult mix_at_snr(const AudioClip& speech, const AudioClip& noise, double snr_db_a) {
  require_fullband(speech, "speech");
  require_fullband(noise, "noise");
  if (!std::isfinite(snr_db_a)) throw InputError("target SNR must be finite");
  if (noise.size() < speech.size()) {
    throw InputError("noise (" + std::to_string(noise.size()) + " samples) is shorter than speech (" +
                     std::to_string(speech.size()) + " samples)");
  }

  AudioClip segment = noise;
  segment.samples.resize(speech.size());

  const double speech_level = a_weighted_speech_level(speech);
  const double noise_level = a_weighted_noise_level(segment);

  MixResult r;
  r.noise_gain = db_to_gain(speech_level - snr_db_a - noise_level);
  r.speech_component = speech;
  r.noise_component = scaled(segment, r.noise_gain);
  r.mixture = speech;
  for (std::size_t i = 0; i < r.mixture.size(); ++i) r.mixture.samples[i] += r.noise_component.samples[i];
  r.post_mix_scale = guard_clipping({&r.mixture, &r.speech_component, &r.noise_component}, r.mixture);
  if (r.post_mix_scale != 1.0) {
    log().info("mixture peaked above full scale; scaled by {:.6f}", r.post_mix_scale);
  }
  return r;
}

AudioClip apply_ns_distortion(const AudioClip& speech, int level) {
  return apply_ns_distortion(speech, DistortionParams::preset(level));
}

AudioClip apply_ns_distortion(const AudioClip& speech, const DistortionParams& params) {
  params.validate();
  require_fullband(speech, "speech");
  if (speech.empty()) return speech;

  Stft stft(StftGeometry::from_ms(params.frame_ms, params.hop_ms, speech.sample_rate));
  Spectrogram frames = stft.analyze(speech.samples);
  const std::size_t bins = frames.front().size();

  std::vector<double> noise_psd(bins, 0.0);
  for (const auto& frame : frames) {
    for (std::size_t k = 0; k < bins; ++k) noise_psd[k] += std::norm(frame[k]);
  }
  const double reference = std::pow(10.0, params.noise_reference_db / 10.0) * params.over_subtraction /
                           static_cast<double>(frames.size());
  for (double& p : noise_psd) p = std::max(p * reference, std::numeric_limits<double>::min());

  const double beta = params.smoothing;
  std::vector<double> previous_clean(bins, 0.0);
  for (auto& frame : frames) {
    for (std::size_t k = 0; k < bins; ++k) {
      const double power = std::norm(frame[k]);
      const double posterior = power / noise_psd[k];
      const double prior = beta * previous_clean[k] / noise_psd[k] + (1.0 - beta) * std::max(posterior - 1.0, 0.0);
      const double gain = std::max(prior / (1.0 + prior), params.gain_floor);
      frame[k] *= gain;
      previous_clean[k] = gain * gain * power;
    }
  }

  AudioClip out = speech;
  out.samples = stft.synthesize(frames, speech.size());
  return out;
}

ConditionOutput generate_condition(const ConditionSpec& spec, const AudioClip& speech, const AudioClip& noise) {
  validate(spec);
  require_fullband(speech, "speech");

  ConditionOutput out;
  if (!spec.ns_level && !spec.snr_db_a) {
    out.audio = speech;
    return out;
  }

  AudioClip source = spec.ns_level ? apply_ns_distortion(speech, *spec.ns_level) : speech;
  if (spec.snr_db_a) {
    MixResult mix = mix_at_snr(source, noise, *spec.snr_db_a);
    out.audio = std::move(mix.mixture);
    out.noise_gain_db = gain_to_db(mix.noise_gain);
    out.post_mix_scale = mix.post_mix_scale;
  } else {
    out.post_mix_scale = guard_clipping({&source}, source);
    out.audio = std::move(source);
  }
  return out;
}

void run_manifest(std::vector<ManifestEntry>& entries, const std::filesystem::path& out_dir, unsigned threads) {
  namespace fs = std::filesystem;

  std::vector<fs::path> outputs;
  std::set<fs::path> seen;
  for (const auto& e : entries) {
    (void)find_condition(e.condition_id);
    for (const auto& p : {e.speech_path, e.noise_path}) {
      if (!fs::is_regular_file(p)) throw InputError("input file not found: " + p.string());
    }
    if (e.output_path.empty()) throw InputError("manifest entry for " + e.condition_id + " has no output_path");
    fs::path out = e.output_path.is_absolute() ? e.output_path : out_dir / e.output_path;
    out = out.lexically_normal();
    if (!seen.insert(out).second) throw InputError("duplicate output path " + out.string());
    outputs.push_back(std::move(out));
  }

  std::vector<std::exception_ptr> errors(entries.size());
  std::vector<char> written(entries.size(), 0);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < entries.size(); i = next++) {
      try {
        auto& e = entries[i];
        const AudioClip speech = wav::read(e.speech_path);
        const AudioClip noise = wav::read(e.noise_path);
        ConditionOutput result = generate_condition(find_condition(e.condition_id), speech, noise);
        if (outputs[i].has_parent_path()) fs::create_directories(outputs[i].parent_path());
        wav::write(outputs[i], result.audio);
        written[i] = 1;
        e.applied_noise_gain_db = result.noise_gain_db;
        e.post_mix_scale = result.post_mix_scale;
        log().debug("{} -> {}", e.condition_id, outputs[i].string());
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  const unsigned count = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(std::max<std::size_t>(entries.size(), 1)));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < count; ++t) pool.emplace_back(worker);
    worker();
  }

  const auto failed = std::find_if(errors.begin(), errors.end(), [](const auto& e) { return e != nullptr; });
  if (failed != errors.end()) {
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (written[i]) {
        std::error_code ec;
        fs::remove(outputs[i], ec);
      }
    }
    std::rethrow_exception(*failed);
  }
}

}  // namespace sqeval::refcond
