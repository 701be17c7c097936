#include "sqeval/screening.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>
#include <tuple>

#include "sqeval/error.hpp"

namespace sqeval::screening {
namespace {

bool is_triplet(std::string_view s) {
  return s.size() == 3 && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

using SubmissionId = std::pair<std::string, std::string>;  // (task_id, worker_id)

}  // namespace

double score_digit_triplet(std::span<const TripletResponse> responses) {
  if (responses.empty()) throw InputError("digit-triplet test has no responses");
  std::size_t correct = 0;
  for (const auto& r : responses) {
    if (!is_triplet(r.expected)) throw InputError("malformed expected triplet '" + r.expected + "'");
    if (!is_triplet(r.answered)) throw InputError("malformed answered triplet '" + r.answered + "'");
    if (r.expected == r.answered) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(responses.size());
}

QualificationResult qualify(std::string worker_id, double hearing_correct, double environment_correct,
                            const QualificationThresholds& thresholds) {
  for (double f : {hearing_correct, environment_correct}) {
    if (!(f >= 0.0 && f <= 1.0)) throw InputError("qualification fraction outside [0, 1] for " + worker_id);
  }
  // A small epsilon keeps 4/5 from failing a 0.8 threshold on rounding.
  constexpr double eps = 1e-12;
  const bool passed = hearing_correct + eps >= thresholds.hearing_min_fraction &&
                      environment_correct + eps >= thresholds.environment_min_fraction;
  return {std::move(worker_id), hearing_correct, environment_correct, passed};
}

QualificationResult qualify(std::string worker_id, std::span<const TripletResponse> triplets,
                            const std::vector<bool>& pair_correct, const QualificationThresholds& thresholds) {
  if (pair_correct.empty()) throw InputError("environment test has no answers for " + worker_id);
  const double hearing = score_digit_triplet(triplets);
  const auto right = std::count(pair_correct.begin(), pair_correct.end(), true);
  const double environment = static_cast<double>(right) / static_cast<double>(pair_correct.size());
  return qualify(std::move(worker_id), hearing, environment, thresholds);
}

std::string_view to_string(RejectReason reason) noexcept {
  switch (reason) {
    case RejectReason::TrappingFailed: return "trapping_failed";
    case RejectReason::GoldOutOfTolerance: return "gold_out_of_tolerance";
    case RejectReason::PlaybackIncomplete: return "playback_incomplete";
    case RejectReason::UnqualifiedWorker: return "unqualified_worker";
  }
  return "?";
}

RejectReason parse_reject_reason(std::string_view text) {
  for (auto r : {RejectReason::TrappingFailed, RejectReason::GoldOutOfTolerance, RejectReason::PlaybackIncomplete,
                 RejectReason::UnqualifiedWorker}) {
    if (to_string(r) == text) return r;
  }
  throw InputError("unknown rejection reason '" + std::string(text) + "'");
}

ScreeningVerdict screen_task(std::span<const Vote> votes, const TaskKey& key, const QualificationResult* qualification) {
  ScreeningVerdict verdict;
  verdict.task_id = key.task_id;
  if (!votes.empty()) verdict.worker_id = votes.front().worker_id;
  for (const auto& v : votes) {
    if (v.task_id != key.task_id) throw InputError("vote for task " + v.task_id + " screened against " + key.task_id);
    if (v.worker_id != verdict.worker_id) throw InputError("task " + key.task_id + " screened with votes of several workers");
  }

  bool trapping_seen = false;
  bool trapping_ok = true;
  bool gold_seen = false;
  bool gold_ok = true;
  bool playback_ok = true;
  for (const auto& v : votes) {
    playback_ok = playback_ok && v.playback.complete();
    if (v.clip_id == key.trapping.clip_id) {
      trapping_seen = true;
      trapping_ok = trapping_ok && v.scores == key.trapping.expected;
    }
    if (v.clip_id == key.gold.clip_id) {
      gold_seen = true;
      for (Scale s : kScales) {
        gold_ok = gold_ok && std::abs(v.scores[s] - key.gold.expected[s]) <= kGoldTolerance;
      }
    }
  }

  if (!trapping_seen || !trapping_ok) verdict.reasons.push_back(RejectReason::TrappingFailed);
  if (!gold_seen || !gold_ok) verdict.reasons.push_back(RejectReason::GoldOutOfTolerance);
  if (!playback_ok) verdict.reasons.push_back(RejectReason::PlaybackIncomplete);
  if (qualification == nullptr || !qualification->passed) verdict.reasons.push_back(RejectReason::UnqualifiedWorker);
  verdict.accepted = verdict.reasons.empty();
  return verdict;
}

std::vector<ScreeningVerdict> screen_all(std::span<const Vote> votes, const AnswerKey& key,
                                         const std::map<std::string, QualificationResult>& qualifications) {
  std::map<SubmissionId, std::vector<Vote>> submissions;
  for (const auto& v : votes) {
    if (!v.scores.valid()) throw InputError("vote on " + v.clip_id + " by " + v.worker_id + " has a score outside 1..5");
    submissions[{v.task_id, v.worker_id}].push_back(v);
  }

  std::vector<ScreeningVerdict> verdicts;
  verdicts.reserve(submissions.size());
  for (const auto& [id, group] : submissions) {
    const auto task = key.tasks.find(id.first);
    if (task == key.tasks.end()) throw InputError("votes reference task " + id.first + " missing from the answer key");
    const auto qual = qualifications.find(id.second);
    verdicts.push_back(screen_task(group, task->second, qual == qualifications.end() ? nullptr : &qual->second));
  }
  return verdicts;
}

std::vector<Vote> filter_reliable(std::span<const Vote> votes, std::span<const ScreeningVerdict> verdicts,
                                  const AnswerKey& key) {
  std::map<SubmissionId, bool> accepted;
  for (const auto& v : verdicts) accepted[{v.task_id, v.worker_id}] = v.accepted;

  std::vector<Vote> out;
  for (const auto& v : votes) {
    const auto it = accepted.find({v.task_id, v.worker_id});
    if (it == accepted.end()) {
      throw InputError("no verdict for task " + v.task_id + " / worker " + v.worker_id);
    }
    if (!it->second) continue;
    const auto task = key.tasks.find(v.task_id);
    if (task == key.tasks.end()) throw InputError("task " + v.task_id + " missing from the answer key");
    if (v.clip_id == task->second.trapping.clip_id || v.clip_id == task->second.gold.clip_id) continue;
    out.push_back(v);
  }
  return out;
}

}  // namespace sqeval::screening
