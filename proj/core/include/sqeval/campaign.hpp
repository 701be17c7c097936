#pragma once

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sqeval/answer_key.hpp"
#include "sqeval/audio.hpp"
#include "sqeval/scales.hpp"

namespace sqeval::campaign {

enum class StimulusKind { Rating, Trapping, Gold };

[[nodiscard]] std::string_view to_string(StimulusKind kind) noexcept;

struct Stimulus {
  std::string clip_id;
  std::string url;
  std::string condition_id;
  StimulusKind kind = StimulusKind::Rating;
  std::optional<ScaleScores> expected_answer;  // controls only

  /// Throws ConfigError when kind and expected_answer disagree.
  void validate() const;

  friend bool operator==(const Stimulus&, const Stimulus&) = default;
};

struct TaskAssignment {
  std::string task_id;
  std::string campaign_id;
  std::uint64_t scale_order_seed = 0;
  std::vector<Stimulus> stimuli;

  [[nodiscard]] const Stimulus& trapping() const;
  [[nodiscard]] const Stimulus& gold() const;
  [[nodiscard]] std::size_t rating_count() const noexcept;

  friend bool operator==(const TaskAssignment&, const TaskAssignment&) = default;
};

struct SessionPolicy {
  std::chrono::minutes setup_validity{30};
  std::chrono::minutes training_validity{60};

  void validate() const;
};

struct CampaignConfig {
  std::string campaign_id = "campaign";
  std::size_t task_size = 10;
  std::size_t target_votes_per_clip = 1;
  std::uint64_t seed = 0;
  std::vector<Stimulus> trapping_pool;
  std::vector<Stimulus> gold_pool;
  SessionPolicy policy;

  void validate() const;
};

/// Packs rating clips into tasks of `task_size` distinct clips so every clip
/// lands in at least `target_votes_per_clip` tasks, then inserts one
/// trapping and one gold stimulus per task at a position other than the
/// first. Clips are dealt round-robin from a list reshuffled every round;
/// the result depends only on (clips, config).
[[nodiscard]] std::vector<TaskAssignment> plan_campaign(std::span<const Stimulus> clips,
                                                        const CampaignConfig& config);

/// Control answers and clip -> condition map for a plan.
[[nodiscard]] AnswerKey make_answer_key(std::span<const TaskAssignment> plan);

struct TrappingOptions {
  std::string clip_id = "trapping";
  std::string url;
  std::string condition_id = "trapping";
  double splice_fraction = 0.5;
};

struct TrappingClip {
  AudioClip audio;
  Stimulus stimulus;
  std::size_t splice_sample = 0;
};

/// Keeps the first `splice_fraction` of `base` and appends the spoken
/// instruction. The expected answer is `demanded_score` on all three scales.
[[nodiscard]] TrappingClip make_trapping_stimulus(const AudioClip& base, const AudioClip& prompt,
                                                  int demanded_score, const TrappingOptions& options = {});

/// A clean clip expected to score 5 on every scale.
[[nodiscard]] Stimulus make_gold_stimulus(std::string clip_id, std::string url, std::string condition_id);

using Timestamp = std::chrono::sys_seconds;

struct WorkerState {
  std::string worker_id;
  bool qualification_passed = false;
  std::optional<Timestamp> qualification_at;
  std::optional<Timestamp> last_setup_pass;
  std::optional<Timestamp> last_training_pass;

  friend bool operator==(const WorkerState&, const WorkerState&) = default;
};

enum class Section { Qualification, Setup, Training };

struct RequiredSections {
  bool qualification = false;
  bool setup = false;
  bool training = false;

  [[nodiscard]] bool empty() const noexcept { return !qualification && !setup && !training; }
  friend bool operator==(const RequiredSections&, const RequiredSections&) = default;
};

/// Qualification is required until passed once. Setup and training are
/// required when their last successful pass is older than the policy
/// window (strictly greater) or absent.
[[nodiscard]] RequiredSections gate_session(const WorkerState& state, Timestamp now,
                                            const SessionPolicy& policy);

/// Records a successful pass. Failures do not touch the state. Throws
/// InputError if `at` is earlier than the section's previous pass.
void record_pass(WorkerState& state, Section section, Timestamp at);

/// Reads the newline-delimited worker-state log; the last record per
/// worker wins. Blank lines are skipped.
[[nodiscard]] std::map<std::string, WorkerState> load_worker_states(std::istream& in);

void append_worker_state(std::ostream& out, const WorkerState& state);

}  // namespace sqeval::campaign
