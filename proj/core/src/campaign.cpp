#include "sqeval/campaign.hpp"

#include <algorithm>
#include <deque>
#include <istream>
#include <ostream>
#include <set>
#include <string>

#include "random.hpp"
#include "sqeval/error.hpp"
#include "sqeval/serialization.hpp"

namespace sqeval::campaign {
namespace {

constexpr std::uint64_t kRoundStream = 0x726f756e64ULL;  // "round"
constexpr std::uint64_t kTaskStream = 0x7461736bULL;     // "task"

std::string task_name(const std::string& campaign_id, std::size_t index) {
  std::string digits = std::to_string(index);
  if (digits.size() < 5) digits.insert(0, 5 - digits.size(), '0');
  return campaign_id + "-" + digits;
}

const Stimulus& find_kind(const std::vector<Stimulus>& stimuli, StimulusKind kind, const std::string& task_id) {
  const auto it = std::find_if(stimuli.begin(), stimuli.end(), [&](const Stimulus& s) { return s.kind == kind; });
  if (it == stimuli.end()) throw InputError("task " + task_id + " has no " + std::string(to_string(kind)) + " stimulus");
  return *it;
}

}  // namespace

std::string_view to_string(StimulusKind kind) noexcept {
  switch (kind) {
    case StimulusKind::Rating: return "rating";
    case StimulusKind::Trapping: return "trapping";
    case StimulusKind::Gold: return "gold";
  }
  return "?";
}

void Stimulus::validate() const {
  if (clip_id.empty()) throw ConfigError("stimulus without clip_id");
  const bool control = kind != StimulusKind::Rating;
  if (control && !expected_answer) {
    throw ConfigError(std::string(to_string(kind)) + " stimulus " + clip_id + " needs an expected answer");
  }
  if (!control && expected_answer) throw ConfigError("rating stimulus " + clip_id + " must not carry an expected answer");
  if (expected_answer && !expected_answer->valid()) throw ConfigError("expected answer of " + clip_id + " outside 1..5");
}

const Stimulus& TaskAssignment::trapping() const { return find_kind(stimuli, StimulusKind::Trapping, task_id); }

const Stimulus& TaskAssignment::gold() const { return find_kind(stimuli, StimulusKind::Gold, task_id); }

std::size_t TaskAssignment::rating_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(stimuli.begin(), stimuli.end(), [](const Stimulus& s) { return s.kind == StimulusKind::Rating; }));
}

void SessionPolicy::validate() const {
  if (setup_validity.count() <= 0 || training_validity.count() <= 0) {
    throw ConfigError("session validity windows must be positive");
  }
}

void CampaignConfig::validate() const {
  if (campaign_id.empty()) throw ConfigError("campaign_id must not be empty");
  if (task_size < 2) throw ConfigError("task_size must be at least 2");
  if (target_votes_per_clip < 1) throw ConfigError("target_votes_per_clip must be at least 1");
  if (trapping_pool.empty()) throw ConfigError("trapping pool is empty");
  if (gold_pool.empty()) throw ConfigError("gold pool is empty");
  for (const auto& s : trapping_pool) {
    s.validate();
    if (s.kind != StimulusKind::Trapping) throw ConfigError("trapping pool holds non-trapping stimulus " + s.clip_id);
  }
  for (const auto& s : gold_pool) {
    s.validate();
    if (s.kind != StimulusKind::Gold) throw ConfigError("gold pool holds non-gold stimulus " + s.clip_id);
  }
  policy.validate();
}

std::vector<TaskAssignment> plan_campaign(std::span<const Stimulus> clips, const CampaignConfig& config) {
  config.validate();
  if (clips.empty()) throw ConfigError("no rating clips to plan");
  std::set<std::string> ids;
  for (const auto& c : clips) {
    c.validate();
    if (c.kind != StimulusKind::Rating) throw ConfigError("clip list holds control stimulus " + c.clip_id);
    if (!ids.insert(c.clip_id).second) throw ConfigError("duplicate clip_id " + c.clip_id);
  }
  if (config.task_size > clips.size()) {
    throw ConfigError("task_size " + std::to_string(config.task_size) + " exceeds the " +
                      std::to_string(clips.size()) + " distinct rating clips");
  }

  const std::size_t n = clips.size();
  std::vector<std::size_t> memberships(n, 0);
  std::size_t short_clips = n;  // clips still below target
  std::deque<std::size_t> stream;
  std::uint64_t round = 0;
  auto deal_round = [&] {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    auto rng = detail::make_rng({config.seed, kRoundStream, round++});
    detail::shuffle(order, rng);
    stream.insert(stream.end(), order.begin(), order.end());
  };

  std::vector<TaskAssignment> plan;
  while (short_clips > 0) {
    std::vector<std::size_t> members;
    while (members.size() < config.task_size) {
      auto it = std::find_if(stream.begin(), stream.end(), [&](std::size_t c) {
        return std::find(members.begin(), members.end(), c) == members.end();
      });
      if (it == stream.end()) {
        deal_round();
        continue;
      }
      members.push_back(*it);
      stream.erase(it);
    }

    const std::size_t index = plan.size();
    auto rng = detail::make_rng({config.seed, kTaskStream, index});
    detail::shuffle(members, rng);

    TaskAssignment task;
    task.campaign_id = config.campaign_id;
    task.task_id = task_name(config.campaign_id, index);
    for (std::size_t c : members) {
      task.stimuli.push_back(clips[c]);
      if (++memberships[c] == config.target_votes_per_clip) --short_clips;
    }

    const auto& trap = config.trapping_pool[detail::uniform_below(rng, config.trapping_pool.size())];
    const auto& gold = config.gold_pool[detail::uniform_below(rng, config.gold_pool.size())];
    // Controls go anywhere but the first slot.
    const auto trap_pos = 1 + detail::uniform_below(rng, task.stimuli.size());
    task.stimuli.insert(task.stimuli.begin() + static_cast<std::ptrdiff_t>(trap_pos), trap);
    const auto gold_pos = 1 + detail::uniform_below(rng, task.stimuli.size());
    task.stimuli.insert(task.stimuli.begin() + static_cast<std::ptrdiff_t>(gold_pos), gold);
    task.scale_order_seed = rng();
    plan.push_back(std::move(task));
  }
  return plan;
}

AnswerKey make_answer_key(std::span<const TaskAssignment> plan) {
  AnswerKey key;
  if (!plan.empty()) key.campaign_id = plan.front().campaign_id;
  for (const auto& task : plan) {
    const Stimulus& trap = task.trapping();
    const Stimulus& gold = task.gold();
    key.tasks[task.task_id] = TaskKey{task.task_id, {trap.clip_id, *trap.expected_answer}, {gold.clip_id, *gold.expected_answer}};
    for (const auto& s : task.stimuli) {
      if (s.kind == StimulusKind::Rating) key.clip_conditions[s.clip_id] = s.condition_id;
    }
  }
  return key;
}

TrappingClip make_trapping_stimulus(const AudioClip& base, const AudioClip& prompt, int demanded_score,
                                    const TrappingOptions& options) {
  require_fullband(base, "trapping base clip");
  require_fullband(prompt, "trapping prompt");
  if (demanded_score < 1 || demanded_score > 5) throw InputError("demanded score must be 1..5");
  if (prompt.size() > base.size()) throw InputError("trapping prompt is longer than the base clip");
  if (!(options.splice_fraction > 0.0 && options.splice_fraction <= 1.0)) {
    throw InputError("splice fraction must lie in (0, 1]");
  }

  TrappingClip out;
  out.splice_sample = static_cast<std::size_t>(static_cast<double>(base.size()) * options.splice_fraction);
  out.audio = base;
  out.audio.samples.resize(out.splice_sample);
  out.audio.samples.insert(out.audio.samples.end(), prompt.samples.begin(), prompt.samples.end());
  out.stimulus = Stimulus{options.clip_id, options.url, options.condition_id, StimulusKind::Trapping,
                          ScaleScores::uniform(demanded_score)};
  return out;
}

Stimulus make_gold_stimulus(std::string clip_id, std::string url, std::string condition_id) {
  return Stimulus{std::move(clip_id), std::move(url), std::move(condition_id), StimulusKind::Gold,
                  ScaleScores::uniform(5)};
}

RequiredSections gate_session(const WorkerState& state, Timestamp now, const SessionPolicy& policy) {
  const auto expired = [&](const std::optional<Timestamp>& last, std::chrono::minutes window) {
    return !last || now - *last > window;
  };
  return RequiredSections{
      .qualification = !state.qualification_passed,
      .setup = expired(state.last_setup_pass, policy.setup_validity),
      .training = expired(state.last_training_pass, policy.training_validity),
  };
}

void record_pass(WorkerState& state, Section section, Timestamp at) {
  auto advance = [&](std::optional<Timestamp>& slot, std::string_view name) {
    if (slot && at < *slot) {
      throw InputError("worker " + state.worker_id + ": " + std::string(name) + " pass time goes backwards");
    }
    slot = at;
  };
  switch (section) {
    case Section::Qualification:
      advance(state.qualification_at, "qualification");
      state.qualification_passed = true;
      break;
    case Section::Setup: advance(state.last_setup_pass, "setup"); break;
    case Section::Training: advance(state.last_training_pass, "training"); break;
  }
}

std::map<std::string, WorkerState> load_worker_states(std::istream& in) {
  std::map<std::string, WorkerState> states;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      WorkerState s = io::worker_state_from_json(io::json::parse(line));
      states[s.worker_id] = std::move(s);
    } catch (const io::json::exception& e) {
      throw InputError("worker-state line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return states;
}

void append_worker_state(std::ostream& out, const WorkerState& state) { out << io::to_json(state).dump() << '\n'; }

}  // namespace sqeval::campaign
