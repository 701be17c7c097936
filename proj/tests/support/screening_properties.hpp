#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sqeval/answer_key.hpp"
#include "sqeval/screening.hpp"

// Randomized screening fixtures checked against a plain rule-table oracle.
namespace sqeval::testing {

struct ScreeningFixture {
  AnswerKey key;
  std::vector<screening::Vote> votes;
  std::map<std::string, screening::QualificationResult> qualifications;
};

/// A few tasks, each answered by one to three workers, with random control
/// answers, playback flags, qualification outcomes and missing controls.
[[nodiscard]] ScreeningFixture random_screening_fixture(std::uint64_t seed);

/// Runs screen_all and filter_reliable on the fixture and on shuffled copies
/// of it; returns one message per violated property.
[[nodiscard]] std::vector<std::string> screening_violations(const ScreeningFixture& fixture, std::uint64_t seed);

}  // namespace sqeval::testing
