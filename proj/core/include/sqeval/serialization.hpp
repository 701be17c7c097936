#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "sqeval/answer_key.hpp"
#include "sqeval/campaign.hpp"
#include "sqeval/refcond.hpp"
#include "sqeval/screening.hpp"
#include "sqeval/stats.hpp"

// File formats: JSON for plans, keys, verdicts, scores and reports; CSV for
// votes and the score summary mirror.
namespace sqeval::io {

using nlohmann::json;

inline constexpr std::string_view kVotesCsvHeader =
    "worker_id,task_id,clip_id,scale_order,sig,bak,ovrl,playback_sig,playback_bak,playback_ovrl,submitted_at";

inline constexpr std::string_view kScoresCsvHeader = "condition_id,bak_mos,sig_mos,ovrl_mos,bak_dmos,sig_dmos,ovrl_dmos";

/// Throws InputError naming the line on any malformed row, and echoing the
/// expected header if the first line differs from kVotesCsvHeader.
[[nodiscard]] std::vector<screening::Vote> read_votes_csv(std::istream& in);
void write_votes_csv(std::ostream& out, std::span<const screening::Vote> votes);

[[nodiscard]] std::string_view to_string(screening::ScaleOrder order) noexcept;
[[nodiscard]] screening::ScaleOrder parse_scale_order(std::string_view text);

[[nodiscard]] json to_json(const ScaleScores& s);
[[nodiscard]] ScaleScores scale_scores_from_json(const json& j);

[[nodiscard]] json to_json(const campaign::Stimulus& s);
[[nodiscard]] campaign::Stimulus stimulus_from_json(const json& j, campaign::StimulusKind kind);
[[nodiscard]] campaign::CampaignConfig campaign_config_from_json(const json& j);
[[nodiscard]] json to_json(const campaign::CampaignConfig& c);
/// Worker-visible plan: ids, urls and order only. Stimulus kind, condition
/// and expected answers are not serialized.
[[nodiscard]] json plan_payload_json(std::span<const campaign::TaskAssignment> plan);
[[nodiscard]] json to_json(const campaign::WorkerState& s);
[[nodiscard]] campaign::WorkerState worker_state_from_json(const json& j);

[[nodiscard]] json to_json(const AnswerKey& key);
[[nodiscard]] AnswerKey answer_key_from_json(const json& j);

[[nodiscard]] json to_json(const screening::ScreeningVerdict& v);
[[nodiscard]] json verdicts_json(std::span<const screening::ScreeningVerdict> verdicts);
[[nodiscard]] std::vector<screening::ScreeningVerdict> verdicts_from_json(const json& j);

/// Accepts either measured fractions {worker_id, hearing_correct,
/// environment_correct} or raw answers {worker_id, triplets:[[exp, ans]],
/// pairs:[bool]}; `passed` is always recomputed from the thresholds.
[[nodiscard]] std::map<std::string, screening::QualificationResult> qualifications_from_json(const json& j);
[[nodiscard]] json to_json(const screening::QualificationResult& q);

[[nodiscard]] json to_json(const stats::ConditionScore& s);
[[nodiscard]] json scores_json(std::span<const stats::ConditionScore> scores);
[[nodiscard]] std::vector<stats::ConditionScore> scores_from_json(const json& j);
void write_scores_csv(std::ostream& out, std::span<const stats::ConditionScore> scores);

[[nodiscard]] json to_json(const stats::RegressionFit& fit);
[[nodiscard]] json to_json(const stats::ComparisonReport& report);

[[nodiscard]] json to_json(const refcond::ManifestEntry& e);
[[nodiscard]] std::vector<refcond::ManifestEntry> manifest_from_json(const json& j);
[[nodiscard]] json manifest_json(std::span<const refcond::ManifestEntry> entries);

/// Reads and parses a JSON file, wrapping parse errors in InputError.
[[nodiscard]] json read_json_file(const std::string& path);
/// Writes `j.dump(2)` plus a trailing newline.
void write_json_file(const std::string& path, const json& j);

}  // namespace sqeval::io
