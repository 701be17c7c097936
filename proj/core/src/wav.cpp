#include "sqeval/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "sqeval/error.hpp"

namespace sqeval::wav {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kBitsPerSample = 16;

std::uint32_t read_u32(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint32_t>(b[at]) | (static_cast<std::uint32_t>(b[at + 1]) << 8) |
         (static_cast<std::uint32_t>(b[at + 2]) << 16) | (static_cast<std::uint32_t>(b[at + 3]) << 24);
}

std::uint16_t read_u16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

bool tag_is(std::span<const std::uint8_t> b, std::size_t at, const char (&tag)[5]) {
  return std::memcmp(b.data() + at, tag, 4) == 0;
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_tag(std::vector<std::uint8_t>& out, const char (&tag)[5]) { out.insert(out.end(), tag, tag + 4); }

std::int16_t to_pcm16(double x) {
  const double code = std::nearbyint(x * 32768.0);
  return static_cast<std::int16_t>(std::clamp(code, -32768.0, 32767.0));
}

}  // namespace

AudioClip decode(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12 || !tag_is(bytes, 0, "RIFF") || !tag_is(bytes, 8, "WAVE")) {
    throw InputError("not a RIFF/WAVE file");
  }

  bool have_fmt = false;
  std::uint16_t channels = 0;
  std::uint32_t rate = 0;
  std::span<const std::uint8_t> data;
  bool have_data = false;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint32_t chunk_size = read_u32(bytes, pos + 4);
    const std::size_t body = pos + 8;
    if (chunk_size > bytes.size() - body) throw InputError("truncated WAV chunk");

    if (tag_is(bytes, pos, "fmt ")) {
      if (chunk_size < 16) throw InputError("WAV fmt chunk too short");
      const std::uint16_t format = read_u16(bytes, body);
      channels = read_u16(bytes, body + 2);
      rate = read_u32(bytes, body + 4);
      const std::uint16_t bits = read_u16(bytes, body + 14);
      if (format != kFormatPcm || bits != kBitsPerSample) {
        throw InputError("unsupported WAV encoding (format " + std::to_string(format) + ", " +
                         std::to_string(bits) + " bit); only PCM 16-bit is accepted");
      }
      have_fmt = true;
    } else if (tag_is(bytes, pos, "data")) {
      data = bytes.subspan(body, chunk_size);
      have_data = true;
    }
    pos = body + chunk_size + (chunk_size & 1u);
  }

  if (!have_fmt) throw InputError("WAV file has no fmt chunk");
  if (!have_data) throw InputError("WAV file has no data chunk");
  if (channels != 1) throw InputError("unsupported WAV channel count " + std::to_string(channels) + "; mono only");
  if (rate != static_cast<std::uint32_t>(kFullbandRate)) {
    throw InputError("unsupported WAV sample rate " + std::to_string(rate) + " Hz; 48000 only");
  }

  AudioClip clip;
  clip.sample_rate = kFullbandRate;
  clip.channels = 1;
  clip.samples.resize(data.size() / 2);
  for (std::size_t i = 0; i < clip.samples.size(); ++i) {
    const auto code = static_cast<std::int16_t>(read_u16(data, 2 * i));
    clip.samples[i] = static_cast<double>(code) / 32768.0;
  }
  return clip;
}

std::vector<std::uint8_t> encode(const AudioClip& clip) {
  require_fullband(clip, "WAV output");
  const auto data_bytes = static_cast<std::uint32_t>(clip.samples.size() * 2);
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_bytes);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, kFormatPcm);
  put_u16(out, 1);
  put_u32(out, static_cast<std::uint32_t>(clip.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(clip.sample_rate) * 2);
  put_u16(out, 2);
  put_u16(out, kBitsPerSample);
  put_tag(out, "data");
  put_u32(out, data_bytes);
  for (double x : clip.samples) put_u16(out, static_cast<std::uint16_t>(to_pcm16(x)));
  return out;
}

AudioClip read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode(bytes);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write(const std::filesystem::path& path, const AudioClip& clip) {
  const auto bytes = encode(clip);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw InputError("write failed for " + path.string());
}

AudioClip quantize_pcm16(const AudioClip& clip) {
  AudioClip out = clip;
  for (double& x : out.samples) x = static_cast<double>(to_pcm16(x)) / 32768.0;
  return out;
}

}  // namespace sqeval::wav
