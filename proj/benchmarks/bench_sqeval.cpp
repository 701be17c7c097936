#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <random>

#include "sqeval/campaign.hpp"
#include "sqeval/refcond.hpp"
#include "sqeval/stats.hpp"

using namespace sqeval;

namespace {

AudioClip voiced(double seconds, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 0.02);
  AudioClip c;
  c.samples.resize(static_cast<std::size_t>(seconds * kFullbandRate));
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double t = static_cast<double>(i) / kFullbandRate;
    const double envelope = 0.5 + 0.5 * std::sin(2.0 * std::numbers::pi * 3.0 * t);
    c.samples[i] = 0.3 * envelope * std::sin(2.0 * std::numbers::pi * 180.0 * t) + n(rng);
  }
  return c;
}

AudioClip noise(double seconds, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 0.1);
  AudioClip c;
  c.samples.resize(static_cast<std::size_t>(seconds * kFullbandRate));
  for (double& x : c.samples) x = n(rng);
  return c;
}

void BM_GenerateCondition(benchmark::State& state) {
  const auto spec = refcond::reference_conditions()[static_cast<std::size_t>(state.range(0))];
  const auto s = voiced(8.0, 1);
  const auto n = noise(10.0, 2);
  for (auto _ : state) benchmark::DoNotOptimize(refcond::generate_condition(spec, s, n));
  state.SetLabel(spec.id);
}
BENCHMARK(BM_GenerateCondition)->Arg(1)->Arg(5)->Arg(11)->Unit(benchmark::kMillisecond);

void BM_Aggregate(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::vector<stats::RatedVote> votes;
  const auto count = static_cast<std::size_t>(state.range(0));
  for (std::size_t i = 0; i < count; ++i) {
    votes.push_back({"w" + std::to_string(rng() % 500), "c" + std::to_string(rng() % 20),
                     {1 + static_cast<int>(rng() % 5), 1 + static_cast<int>(rng() % 5), 1 + static_cast<int>(rng() % 5)}});
  }
  for (auto _ : state) benchmark::DoNotOptimize(stats::aggregate(votes, std::string_view("c0")));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * count));
}
BENCHMARK(BM_Aggregate)->Arg(2600)->Arg(52000);

void BM_PlanCampaign(benchmark::State& state) {
  std::vector<campaign::Stimulus> clips;
  for (int i = 0; i < state.range(0); ++i) {
    clips.push_back({"clip" + std::to_string(i), "", "sys", campaign::StimulusKind::Rating, {}});
  }
  campaign::CampaignConfig config;
  config.target_votes_per_clip = 5;
  config.trapping_pool.push_back({"trap", "", "trapping", campaign::StimulusKind::Trapping, ScaleScores::uniform(2)});
  config.gold_pool.push_back(campaign::make_gold_stimulus("gold", "", "clean"));
  for (auto _ : state) benchmark::DoNotOptimize(campaign::plan_campaign(clips, config));
}
BENCHMARK(BM_PlanCampaign)->Arg(700)->Arg(4200)->Unit(benchmark::kMillisecond);

void BM_Spearman(benchmark::State& state) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(1.0, 5.0);
  std::vector<double> a(static_cast<std::size_t>(state.range(0))), b(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = u(rng);
    b[i] = u(rng);
  }
  for (auto _ : state) benchmark::DoNotOptimize(stats::spearman(a, b));
}
BENCHMARK(BM_Spearman)->Arg(12)->Arg(700);

}  // namespace

BENCHMARK_MAIN();
