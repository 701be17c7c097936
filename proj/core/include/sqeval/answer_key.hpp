#pragma once

#include <map>
#include <string>

#include "sqeval/scales.hpp"

namespace sqeval {

struct ControlAnswer {
  std::string clip_id;
  ScaleScores expected;

  friend bool operator==(const ControlAnswer&, const ControlAnswer&) = default;
};

struct TaskKey {
  std::string task_id;
  ControlAnswer trapping;
  ControlAnswer gold;

  friend bool operator==(const TaskKey&, const TaskKey&) = default;
};

/// Moderator-only half of a campaign plan: the control answers per task and
/// the condition each rating clip belongs to. Never shipped to workers.
struct AnswerKey {
  std::string campaign_id;
  std::map<std::string, TaskKey> tasks;
  std::map<std::string, std::string> clip_conditions;

  friend bool operator==(const AnswerKey&, const AnswerKey&) = default;
};

}  // namespace sqeval
