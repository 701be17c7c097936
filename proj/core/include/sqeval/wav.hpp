#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "sqeval/audio.hpp"

namespace sqeval::wav {

/// Decodes a RIFF/WAVE image. Only PCM 16-bit mono 48 kHz is accepted;
/// anything else is an InputError (there is no conversion path).
[[nodiscard]] AudioClip decode(std::span<const std::uint8_t> bytes);

/// Encodes as PCM 16-bit. Samples are rounded to the nearest code and
/// saturated at the int16 range.
[[nodiscard]] std::vector<std::uint8_t> encode(const AudioClip& clip);

[[nodiscard]] AudioClip read(const std::filesystem::path& path);
void write(const std::filesystem::path& path, const AudioClip& clip);

/// Rounds every sample onto the 16-bit grid the file format can hold.
[[nodiscard]] AudioClip quantize_pcm16(const AudioClip& clip);

}  // namespace sqeval::wav
