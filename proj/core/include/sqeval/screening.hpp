#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sqeval/answer_key.hpp"
#include "sqeval/scales.hpp"

namespace sqeval::screening {

enum class ScaleOrder { SigFirst, BakFirst };

struct PlaybackFlags {
  bool sig = false;
  bool bak = false;
  bool ovrl = false;

  [[nodiscard]] bool complete() const noexcept { return sig && bak && ovrl; }
  friend bool operator==(const PlaybackFlags&, const PlaybackFlags&) = default;
};

struct Vote {
  std::string worker_id;
  std::string task_id;
  std::string clip_id;
  ScaleOrder scale_order = ScaleOrder::SigFirst;
  ScaleScores scores;
  PlaybackFlags playback;
  std::string submitted_at;

  friend bool operator==(const Vote&, const Vote&) = default;
};

struct QualificationThresholds {
  double hearing_min_fraction = 0.8;
  double environment_min_fraction = 0.8;  // 4 of 5 pair comparisons
};

struct QualificationResult {
  std::string worker_id;
  double hearing_correct = 0.0;
  double environment_correct = 0.0;
  bool passed = false;
};

struct TripletResponse {
  std::string expected;
  std::string answered;
};

/// Fraction of triplets transcribed exactly (all three digits, in order).
/// Throws InputError on an empty list or anything but three digits.
[[nodiscard]] double score_digit_triplet(std::span<const TripletResponse> responses);

/// Builds a result from measured fractions; `passed` follows the thresholds.
[[nodiscard]] QualificationResult qualify(std::string worker_id, double hearing_correct,
                                          double environment_correct,
                                          const QualificationThresholds& thresholds = {});

/// Scores the raw hearing (digit triplet) and environment (JND pair) answers.
[[nodiscard]] QualificationResult qualify(std::string worker_id, std::span<const TripletResponse> triplets,
                                          const std::vector<bool>& pair_correct,
                                          const QualificationThresholds& thresholds = {});

enum class RejectReason { TrappingFailed, GoldOutOfTolerance, PlaybackIncomplete, UnqualifiedWorker };

[[nodiscard]] std::string_view to_string(RejectReason reason) noexcept;
[[nodiscard]] RejectReason parse_reject_reason(std::string_view text);

/// Verdict on one submission, i.e. one worker's pass through one task.
struct ScreeningVerdict {
  std::string task_id;
  std::string worker_id;
  bool accepted = true;
  std::vector<RejectReason> reasons;

  friend bool operator==(const ScreeningVerdict&, const ScreeningVerdict&) = default;
};

inline constexpr int kGoldTolerance = 1;

/// Screens one submission. Every vote must share task_id and worker_id.
/// A null qualification counts as an unqualified worker.
[[nodiscard]] ScreeningVerdict screen_task(std::span<const Vote> votes, const TaskKey& key,
                                           const QualificationResult* qualification);

/// Groups votes by (task_id, worker_id) and screens each group. Output is
/// sorted by (task_id, worker_id) so it does not depend on vote order.
[[nodiscard]] std::vector<ScreeningVerdict> screen_all(
    std::span<const Vote> votes, const AnswerKey& key,
    const std::map<std::string, QualificationResult>& qualifications);

/// Rating votes of accepted submissions, in input order. Control-clip votes
/// are always dropped. Throws InputError for a vote with no verdict.
[[nodiscard]] std::vector<Vote> filter_reliable(std::span<const Vote> votes,
                                                std::span<const ScreeningVerdict> verdicts,
                                                const AnswerKey& key);

}  // namespace sqeval::screening
