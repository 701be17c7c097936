#include <catch_amalgamated.hpp>

#include <cmath>
#include <fstream>
#include <random>

#include "fixtures.hpp"
#include "sqeval/error.hpp"
#include "sqeval/wav.hpp"

using namespace sqeval;
using Catch::Approx;

namespace {

std::vector<std::uint8_t> header(std::uint16_t format, std::uint16_t channels, std::uint32_t rate, std::uint16_t bits,
                                 std::uint32_t data_bytes) {
  std::vector<std::uint8_t> b;
  auto u32 = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) b.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  };
  auto u16 = [&](std::uint16_t v) {
    b.push_back(static_cast<std::uint8_t>(v));
    b.push_back(static_cast<std::uint8_t>(v >> 8));
  };
  auto tag = [&](const char* t) { b.insert(b.end(), t, t + 4); };
  tag("RIFF");
  u32(36 + data_bytes);
  tag("WAVE");
  tag("fmt ");
  u32(16);
  u16(format);
  u16(channels);
  u32(rate);
  u32(rate * channels * bits / 8);
  u16(static_cast<std::uint16_t>(channels * bits / 8));
  u16(bits);
  tag("data");
  u32(data_bytes);
  b.resize(b.size() + data_bytes, 0);
  return b;
}

}  // namespace

TEST_CASE("PCM16 encode/decode is lossless on the 16-bit grid", "[wav][property]") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    AudioClip clip;
    clip.samples.resize(rng() % 2000);
    for (double& x : clip.samples) x = static_cast<double>(static_cast<std::int16_t>(rng())) / 32768.0;
    REQUIRE(wav::decode(wav::encode(clip)) == clip);
  }
}

TEST_CASE("encoding saturates and rounds", "[wav]") {
  AudioClip clip;
  clip.samples = {1.0, -1.0, 2.0, 0.4 / 32768.0, 0.6 / 32768.0};
  const auto back = wav::decode(wav::encode(clip));
  CHECK(back.samples[0] == 32767.0 / 32768.0);
  CHECK(back.samples[1] == -1.0);
  CHECK(back.samples[2] == 32767.0 / 32768.0);
  CHECK(back.samples[3] == 0.0);
  CHECK(back.samples[4] == 1.0 / 32768.0);
  CHECK(wav::quantize_pcm16(clip) == back);
}

TEST_CASE("decoder rejects everything but PCM16 mono 48 kHz", "[wav][errors]") {
  CHECK_NOTHROW(wav::decode(header(1, 1, 48000, 16, 8)));
  CHECK_THROWS_AS(wav::decode(header(1, 2, 48000, 16, 8)), InputError);
  CHECK_THROWS_AS(wav::decode(header(1, 1, 44100, 16, 8)), InputError);
  CHECK_THROWS_AS(wav::decode(header(1, 1, 16000, 16, 8)), InputError);
  CHECK_THROWS_AS(wav::decode(header(3, 1, 48000, 32, 8)), InputError);
  CHECK_THROWS_AS(wav::decode(header(1, 1, 48000, 24, 9)), InputError);

  std::vector<std::uint8_t> junk(64, 0x41);
  CHECK_THROWS_AS(wav::decode(junk), InputError);

  auto truncated = header(1, 1, 48000, 16, 100);
  truncated.resize(truncated.size() - 50);
  CHECK_THROWS_AS(wav::decode(truncated), InputError);
}

TEST_CASE("decoder skips unknown chunks", "[wav]") {
  AudioClip clip;
  clip.samples = {0.25, -0.5};
  auto bytes = wav::encode(clip);
  // Insert an odd-sized LIST chunk (with pad byte) before fmt.
  const std::vector<std::uint8_t> list = {'L', 'I', 'S', 'T', 3, 0, 0, 0, 'a', 'b', 'c', 0};
  bytes.insert(bytes.begin() + 12, list.begin(), list.end());
  CHECK(wav::decode(bytes) == clip);
}

TEST_CASE("read/write through the filesystem", "[wav]") {
  testing::TempDir dir;
  const auto clip = testing::synth_noise(3, 0.1);
  wav::write(dir.path() / "n.wav", clip);
  CHECK(wav::read(dir.path() / "n.wav") == clip);
  CHECK_THROWS_AS(wav::read(dir.path() / "missing.wav"), InputError);
}

TEST_CASE("fullband validation and level helpers", "[audio]") {
  AudioClip ok;
  ok.samples = {0.1, 0.2};
  CHECK_NOTHROW(require_fullband(ok, "x"));

  AudioClip rate = ok;
  rate.sample_rate = 44100;
  CHECK_THROWS_AS(require_fullband(rate, "x"), InputError);

  AudioClip nan = ok;
  nan.samples[1] = std::nan("");
  CHECK_THROWS_AS(require_fullband(nan, "x"), InputError);

  AudioClip silent;
  silent.samples.assign(10, 0.0);
  CHECK(std::isinf(rms_level_db(silent.samples)));
  CHECK(rms_level_db(std::vector<double>(10, 1.0)) == Approx(0.0).margin(1e-12));
  CHECK(gain_to_db(db_to_gain(-13.5)) == Approx(-13.5));
  CHECK(peak_abs(std::vector<double>{0.1, -0.7, 0.3}) == 0.7);
}
