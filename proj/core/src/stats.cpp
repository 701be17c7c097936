#include "sqeval/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>

#include "sqeval/error.hpp"
#include "sqeval/logging.hpp"
#include "sqeval/screening.hpp"

namespace sqeval::stats {
namespace {

double mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

void require_pairs(std::span<const double> a, std::span<const double> b, std::string_view what) {
  if (a.size() != b.size()) throw InputError(std::string(what) + ": length mismatch");
  if (a.empty()) throw InputError(std::string(what) + ": empty input");
}

std::vector<double> column(std::span<const ConditionScore> scores, Scale s) {
  std::vector<double> out;
  out.reserve(scores.size());
  for (const auto& c : scores) out.push_back(c[s].mos);
  return out;
}

}  // namespace

std::vector<RatedVote> resolve_conditions(std::span<const screening::Vote> votes, const AnswerKey& key) {
  std::vector<RatedVote> out;
  out.reserve(votes.size());
  for (const auto& v : votes) {
    const auto it = key.clip_conditions.find(v.clip_id);
    if (it == key.clip_conditions.end()) throw InputError("clip " + v.clip_id + " has no condition in the answer key");
    out.push_back({v.worker_id, it->second, v.scores});
  }
  return out;
}

double t_quantile_975(std::size_t dof) {
  if (dof == 0) throw InputError("t quantile needs at least one degree of freedom");
  const boost::math::students_t dist(static_cast<double>(dof));
  return boost::math::quantile(dist, 0.975);
}

ScaleStatistic summarize(std::span<const double> values) {
  if (values.empty()) throw InputError("cannot summarize an empty sample");
  ScaleStatistic s;
  s.n = values.size();
  s.mos = mean(values);
  if (s.n > 1) {
    double ss = 0.0;
    for (double x : values) ss += (x - s.mos) * (x - s.mos);
    const double sd = std::sqrt(ss / static_cast<double>(s.n - 1));
    s.ci95 = t_quantile_975(s.n - 1) * sd / std::sqrt(static_cast<double>(s.n));
  }
  return s;
}

std::vector<ConditionScore> aggregate(std::span<const RatedVote> votes, std::optional<std::string_view> baseline,
                                      std::span<const std::string> expected_conditions) {
  std::map<std::string, std::array<std::vector<double>, 3>> by_condition;
  for (const auto& v : votes) {
    if (!v.scores.valid()) throw InputError("vote for " + v.condition_id + " has a score outside 1..5");
    auto& cols = by_condition[v.condition_id];
    for (Scale s : kScales) cols[index(s)].push_back(v.scores[s]);
  }
  for (const auto& c : expected_conditions) {
    if (!by_condition.contains(c)) log().warn("condition {} has no reliable votes; omitted", c);
  }

  std::vector<ConditionScore> scores;
  scores.reserve(by_condition.size());
  for (const auto& [id, cols] : by_condition) {
    ConditionScore c;
    c.condition_id = id;
    for (Scale s : kScales) c[s] = summarize(cols[index(s)]);
    if (c[Scale::Sig].n == 1) log().warn("condition {} has a single vote; no confidence interval", id);
    scores.push_back(std::move(c));
  }
  if (baseline) apply_dmos(scores, *baseline);
  return scores;
}

void apply_dmos(std::span<ConditionScore> scores, std::string_view baseline) {
  const auto base = std::find_if(scores.begin(), scores.end(), [&](const auto& c) { return c.condition_id == baseline; });
  if (base == scores.end()) throw InputError("baseline condition '" + std::string(baseline) + "' has no scores");
  std::array<double, 3> reference{};
  for (Scale s : kScales) reference[index(s)] = (*base)[s].mos;
  for (auto& c : scores) {
    for (Scale s : kScales) c[s].dmos = c[s].mos - reference[index(s)];
  }
}

RegressionFit fit_ovrl_regression(std::span<const MosPoint> points) {
  const auto n = points.size();
  if (n < 4) throw InputError("OVRL regression needs at least 4 conditions, got " + std::to_string(n));

  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd target(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    design(row, 0) = 1.0;
    design(row, 1) = points[i].sig;
    design(row, 2) = points[i].bak;
    target(row) = points[i].ovrl;
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  qr.setThreshold(1e-10);
  if (qr.rank() < 3) throw SingularFitError("SIG and BAK MOS are collinear; OVRL regression is singular");
  const Eigen::VectorXd beta = qr.solve(target);

  RegressionFit fit;
  fit.n = n;
  fit.intercept = beta(0);
  fit.coef_sig = beta(1);
  fit.coef_bak = beta(2);

  const Eigen::VectorXd fitted = design * beta;
  const double ss_res = (target - fitted).squaredNorm();
  const double ss_tot = (target.array() - target.mean()).square().sum();
  const double r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  fit.adjusted_r2 = n > 3 ? 1.0 - (1.0 - r2) * static_cast<double>(n - 1) / static_cast<double>(n - 3) : r2;
  fit.pearson_rho = pearson(std::span<const double>(fitted.data(), n), std::span<const double>(target.data(), n));
  return fit;
}

RegressionFit fit_ovrl_regression(std::span<const ConditionScore> scores) {
  std::vector<MosPoint> points;
  points.reserve(scores.size());
  for (const auto& c : scores) points.push_back({c[Scale::Sig].mos, c[Scale::Bak].mos, c[Scale::Ovrl].mos});
  return fit_ovrl_regression(points);
}

double predict_ovrl(const RegressionFit& fit, double sig_mos, double bak_mos) {
  if (sig_mos < 1.0 || sig_mos > 5.0 || bak_mos < 1.0 || bak_mos > 5.0) {
    log().warn("predicting OVRL outside the 1..5 MOS range (sig={}, bak={})", sig_mos, bak_mos);
  }
  return fit.intercept + fit.coef_sig * sig_mos + fit.coef_bak * bak_mos;
}

double pearson(std::span<const double> a, std::span<const double> b) {
  require_pairs(a, b, "pearson");
  const double ma = mean(a);
  const double mb = mean(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> a, std::span<const double> b) {
  require_pairs(a, b, "spearman");
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  return pearson(ra, rb);
}

double rmse(std::span<const double> a, std::span<const double> b) {
  require_pairs(a, b, "rmse");
  double ss = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) ss += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(ss / static_cast<double>(a.size()));
}

ComparisonReport compare_runs(std::span<const ConditionScore> a, std::span<const ConditionScore> b) {
  std::map<std::string, const ConditionScore*> in_a, in_b;
  for (const auto& c : a) in_a[c.condition_id] = &c;
  for (const auto& c : b) in_b[c.condition_id] = &c;
  if (in_a.size() != a.size() || in_b.size() != b.size()) throw InputError("duplicate condition ids in a run");

  std::string only_a, only_b;
  for (const auto& [id, _] : in_a) {
    if (!in_b.contains(id)) only_a += (only_a.empty() ? "" : ", ") + id;
  }
  for (const auto& [id, _] : in_b) {
    if (!in_a.contains(id)) only_b += (only_b.empty() ? "" : ", ") + id;
  }
  if (!only_a.empty() || !only_b.empty()) {
    throw InputError("runs cover different conditions; only in A: [" + only_a + "], only in B: [" + only_b + "]");
  }
  if (in_a.size() < 2) throw InputError("comparing runs needs at least 2 conditions");

  std::vector<ConditionScore> sa, sb;
  for (const auto& [id, c] : in_a) {
    sa.push_back(*c);
    sb.push_back(*in_b.at(id));
  }

  ComparisonReport report;
  report.conditions = sa.size();
  for (Scale s : kScales) {
    auto& out = report.scales[index(s)];
    const auto xa = column(sa, s);
    const auto xb = column(sb, s);
    out.pcc = pearson(xa, xb);
    out.srcc = spearman(xa, xb);
    out.rmse = rmse(xa, xb);

    const auto has_ranks = [&](const std::vector<ConditionScore>& v) {
      return std::all_of(v.begin(), v.end(), [&](const auto& c) { return c[s].rank_mean.has_value(); });
    };
    if (has_ranks(sa) && has_ranks(sb)) {
      std::vector<double> ra, rb;
      for (std::size_t i = 0; i < sa.size(); ++i) {
        ra.push_back(*sa[i][s].rank_mean);
        rb.push_back(*sb[i][s].rank_mean);
      }
      out.srcc_rank_transformed = spearman(ra, rb);
    }

    const auto average_ci = [&](const std::vector<ConditionScore>& v) -> std::optional<double> {
      double sum = 0.0;
      std::size_t count = 0;
      for (const auto& c : v) {
        if (c[s].ci95) {
          sum += *c[s].ci95;
          ++count;
        }
      }
      if (count == 0) return std::nullopt;
      return sum / static_cast<double>(count);
    };
    out.average_ci_a = average_ci(sa);
    out.average_ci_b = average_ci(sb);
  }
  return report;
}

std::map<std::string, std::array<double, 3>> rank_transform(std::span<const RatedVote> votes) {
  // worker -> condition -> per-scale (sum, count)
  std::map<std::string, std::map<std::string, std::array<std::pair<double, std::size_t>, 3>>> per_worker;
  for (const auto& v : votes) {
    auto& cell = per_worker[v.worker_id][v.condition_id];
    for (Scale s : kScales) {
      cell[index(s)].first += v.scores[s];
      cell[index(s)].second += 1;
    }
  }

  std::map<std::string, std::array<std::pair<double, std::size_t>, 3>> rank_sums;
  for (const auto& [worker, conditions] : per_worker) {
    if (conditions.size() < 2) {
      log().warn("worker {} rated a single condition; dropped from rank transform", worker);
      continue;
    }
    for (Scale s : kScales) {
      std::vector<double> means;
      for (const auto& [_, cell] : conditions) {
        means.push_back(cell[index(s)].first / static_cast<double>(cell[index(s)].second));
      }
      const auto ranks = average_ranks(means);
      std::size_t i = 0;
      for (const auto& [condition, _] : conditions) {
        auto& acc = rank_sums[condition][index(s)];
        acc.first += ranks[i++];
        acc.second += 1;
      }
    }
  }

  std::map<std::string, std::array<double, 3>> out;
  for (const auto& [condition, sums] : rank_sums) {
    auto& row = out[condition];
    for (Scale s : kScales) row[index(s)] = sums[index(s)].first / static_cast<double>(sums[index(s)].second);
  }
  return out;
}

void attach_rank_means(std::span<ConditionScore> scores, const std::map<std::string, std::array<double, 3>>& rank_means) {
  for (auto& c : scores) {
    const auto it = rank_means.find(c.condition_id);
    if (it == rank_means.end()) continue;
    for (Scale s : kScales) c[s].rank_mean = it->second[index(s)];
  }
}

}  // namespace sqeval::stats
