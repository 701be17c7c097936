#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sqeval/answer_key.hpp"
#include "sqeval/scales.hpp"

namespace sqeval::screening {
struct Vote;
}

namespace sqeval::stats {

/// A reliable vote resolved to its condition.
struct RatedVote {
  std::string worker_id;
  std::string condition_id;
  ScaleScores scores;
};

/// Maps votes to conditions via the answer key. Throws InputError for a
/// clip the key does not know.
[[nodiscard]] std::vector<RatedVote> resolve_conditions(std::span<const screening::Vote> votes,
                                                        const AnswerKey& key);

struct ScaleStatistic {
  double mos = 0.0;
  std::optional<double> ci95;  // absent when n < 2
  std::size_t n = 0;
  std::optional<double> dmos;
  std::optional<double> rank_mean;  // per-worker rank transform, if computed
};

struct ConditionScore {
  std::string condition_id;
  std::array<ScaleStatistic, 3> scales;

  [[nodiscard]] ScaleStatistic& operator[](Scale s) noexcept { return scales[index(s)]; }
  [[nodiscard]] const ScaleStatistic& operator[](Scale s) const noexcept { return scales[index(s)]; }
};

/// Two-sided 95% Student-t quantile t(0.975, dof).
[[nodiscard]] double t_quantile_975(std::size_t dof);

/// Mean and t-based 95% half-width of one sample.
[[nodiscard]] ScaleStatistic summarize(std::span<const double> values);

/// Per-condition MOS/CI on all three scales, sorted by condition id. When a
/// baseline is given, DMOS is filled in (InputError if it has no votes).
/// Conditions listed in `expected_conditions` without votes are logged and
/// omitted.
[[nodiscard]] std::vector<ConditionScore> aggregate(std::span<const RatedVote> votes,
                                                    std::optional<std::string_view> baseline = std::nullopt,
                                                    std::span<const std::string> expected_conditions = {});

/// dmos = mos - mos(baseline) on every scale.
void apply_dmos(std::span<ConditionScore> scores, std::string_view baseline);

struct RegressionFit {
  double intercept = 0.0;
  double coef_sig = 0.0;
  double coef_bak = 0.0;
  double adjusted_r2 = 0.0;
  double pearson_rho = 0.0;
  std::size_t n = 0;
};

struct MosPoint {
  double sig = 0.0;
  double bak = 0.0;
  double ovrl = 0.0;
};

/// Unweighted OLS of OVRL on SIG and BAK with intercept over condition
/// means. Needs at least 4 points; throws SingularFitError if the design is
/// rank deficient.
[[nodiscard]] RegressionFit fit_ovrl_regression(std::span<const MosPoint> points);
[[nodiscard]] RegressionFit fit_ovrl_regression(std::span<const ConditionScore> scores);

/// intercept + coef_sig*sig + coef_bak*bak; warns (does not clamp) outside [1, 5].
[[nodiscard]] double predict_ovrl(const RegressionFit& fit, double sig_mos, double bak_mos);

[[nodiscard]] double pearson(std::span<const double> a, std::span<const double> b);
/// Ranks 1..n, ties get the average of the ranks they span.
[[nodiscard]] std::vector<double> average_ranks(std::span<const double> values);
[[nodiscard]] double spearman(std::span<const double> a, std::span<const double> b);
[[nodiscard]] double rmse(std::span<const double> a, std::span<const double> b);

struct ScaleComparison {
  double pcc = 0.0;
  double srcc = 0.0;
  std::optional<double> srcc_rank_transformed;
  double rmse = 0.0;
  std::optional<double> average_ci_a;
  std::optional<double> average_ci_b;
};

struct ComparisonReport {
  std::size_t conditions = 0;
  std::array<ScaleComparison, 3> scales;

  [[nodiscard]] const ScaleComparison& operator[](Scale s) const noexcept { return scales[index(s)]; }
};

/// Compares two runs over the same condition set. The rank-transformed
/// SRCC is reported when both runs carry rank_mean on every condition.
[[nodiscard]] ComparisonReport compare_runs(std::span<const ConditionScore> a,
                                            std::span<const ConditionScore> b);

/// Per-condition mean of per-worker average ranks, per scale. A worker's
/// repeated votes on one condition are averaged before ranking; workers
/// covering fewer than two conditions are dropped with a warning.
[[nodiscard]] std::map<std::string, std::array<double, 3>> rank_transform(std::span<const RatedVote> votes);

/// Copies rank_transform output into the matching scores.
void attach_rank_means(std::span<ConditionScore> scores,
                       const std::map<std::string, std::array<double, 3>>& rank_means);

}  // namespace sqeval::stats
