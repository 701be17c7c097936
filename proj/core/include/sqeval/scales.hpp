#pragma once

#include <array>
#include <cstddef>
#include <string_view>

namespace sqeval {

/// The three P.835 rating scales. OVRL is always rated last.
enum class Scale { Sig = 0, Bak = 1, Ovrl = 2 };

inline constexpr std::array<Scale, 3> kScales{Scale::Sig, Scale::Bak, Scale::Ovrl};

[[nodiscard]] constexpr std::size_t index(Scale s) noexcept { return static_cast<std::size_t>(s); }

[[nodiscard]] constexpr std::string_view to_string(Scale s) noexcept {
  switch (s) {
    case Scale::Sig: return "sig";
    case Scale::Bak: return "bak";
    case Scale::Ovrl: return "ovrl";
  }
  return "?";
}

/// One (SIG, BAK, OVRL) rating triple on the 1..5 category scale.
struct ScaleScores {
  int sig = 0;
  int bak = 0;
  int ovrl = 0;

  [[nodiscard]] constexpr int operator[](Scale s) const noexcept {
    switch (s) {
      case Scale::Sig: return sig;
      case Scale::Bak: return bak;
      case Scale::Ovrl: return ovrl;
    }
    return 0;
  }
  [[nodiscard]] constexpr int& operator[](Scale s) noexcept {
    switch (s) {
      case Scale::Bak: return bak;
      case Scale::Ovrl: return ovrl;
      default: return sig;
    }
  }
  [[nodiscard]] constexpr bool valid() const noexcept {
    return sig >= 1 && sig <= 5 && bak >= 1 && bak <= 5 && ovrl >= 1 && ovrl <= 5;
  }
  [[nodiscard]] static constexpr ScaleScores uniform(int v) noexcept { return {v, v, v}; }

  friend constexpr bool operator==(const ScaleScores&, const ScaleScores&) = default;
};

}  // namespace sqeval
