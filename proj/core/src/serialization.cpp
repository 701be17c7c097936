#include "sqeval/serialization.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "sqeval/error.hpp"

namespace sqeval::io {
namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> number_or_null(const json& j, const char* field) {
  if (!j.contains(field) || j.at(field).is_null()) return std::nullopt;
  return j.at(field).get<double>();
}

json optional_time(const std::optional<campaign::Timestamp>& t) {
  return t ? json(t->time_since_epoch().count()) : json(nullptr);
}

std::optional<campaign::Timestamp> time_or_null(const json& j, const char* field) {
  if (!j.contains(field) || j.at(field).is_null()) return std::nullopt;
  return campaign::Timestamp(std::chrono::seconds(j.at(field).get<std::int64_t>()));
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

int parse_score(std::string_view s, std::size_t line_no, std::string_view column) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || v < 1 || v > 5) {
    throw InputError("votes CSV line " + std::to_string(line_no) + ": " + std::string(column) + " must be 1..5, got '" +
                     std::string(s) + "'");
  }
  return v;
}

bool parse_flag(std::string_view s, std::size_t line_no, std::string_view column) {
  if (s == "1" || s == "true") return true;
  if (s == "0" || s == "false") return false;
  throw InputError("votes CSV line " + std::to_string(line_no) + ": " + std::string(column) + " must be 0/1, got '" +
                   std::string(s) + "'");
}

void require_plain_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") != std::string_view::npos) {
    throw InputError("CSV field '" + std::string(s) + "' contains a separator or quote");
  }
}

std::string fixed2(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << (std::abs(v) < 0.005 ? 0.0 : v);
  return os.str();
}

std::string text(const json& j, const char* field) {
  if (!j.contains(field)) throw InputError(std::string("missing field '") + field + "'");
  return j.at(field).get<std::string>();
}

std::string text_or(const json& j, const char* field, std::string fallback) {
  return j.contains(field) && !j.at(field).is_null() ? j.at(field).get<std::string>() : fallback;
}

json scale_json(const stats::ScaleStatistic& s) {
  json j{{"mos", s.mos}, {"ci95", optional_number(s.ci95)}, {"n", s.n}, {"dmos", optional_number(s.dmos)}};
  if (s.rank_mean) j["rank_mean"] = *s.rank_mean;
  return j;
}

json comparison_json(const stats::ScaleComparison& c) {
  const auto finite = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  return json{{"pcc", finite(c.pcc)},
              {"srcc", finite(c.srcc)},
              {"srcc_rank_transformed", c.srcc_rank_transformed ? finite(*c.srcc_rank_transformed) : json(nullptr)},
              {"rmse", c.rmse},
              {"average_ci_a", optional_number(c.average_ci_a)},
              {"average_ci_b", optional_number(c.average_ci_b)}};
}

}  // namespace

std::string_view to_string(screening::ScaleOrder order) noexcept {
  return order == screening::ScaleOrder::SigFirst ? "sig_first" : "bak_first";
}

screening::ScaleOrder parse_scale_order(std::string_view text) {
  if (text == "sig_first") return screening::ScaleOrder::SigFirst;
  if (text == "bak_first") return screening::ScaleOrder::BakFirst;
  throw InputError("scale_order must be sig_first or bak_first, got '" + std::string(text) + "'");
}

std::vector<screening::Vote> read_votes_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("votes CSV is empty; expected header: " + std::string(kVotesCsvHeader));
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
  if (line != kVotesCsvHeader) {
    throw InputError("malformed votes CSV header; expected: " + std::string(kVotesCsvHeader));
  }

  std::vector<screening::Vote> votes;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 11) {
      throw InputError("votes CSV line " + std::to_string(line_no) + ": expected 11 fields, got " +
                       std::to_string(f.size()));
    }
    screening::Vote v;
    v.worker_id = f[0];
    v.task_id = f[1];
    v.clip_id = f[2];
    if (v.worker_id.empty() || v.task_id.empty() || v.clip_id.empty()) {
      throw InputError("votes CSV line " + std::to_string(line_no) + ": empty id field");
    }
    try {
      v.scale_order = parse_scale_order(f[3]);
    } catch (const InputError& e) {
      throw InputError("votes CSV line " + std::to_string(line_no) + ": " + e.what());
    }
    v.scores = {parse_score(f[4], line_no, "sig"), parse_score(f[5], line_no, "bak"), parse_score(f[6], line_no, "ovrl")};
    v.playback = {parse_flag(f[7], line_no, "playback_sig"), parse_flag(f[8], line_no, "playback_bak"),
                  parse_flag(f[9], line_no, "playback_ovrl")};
    v.submitted_at = f[10];
    votes.push_back(std::move(v));
  }
  return votes;
}

void write_votes_csv(std::ostream& out, std::span<const screening::Vote> votes) {
  out << kVotesCsvHeader << '\n';
  for (const auto& v : votes) {
    for (std::string_view s : {std::string_view(v.worker_id), std::string_view(v.task_id), std::string_view(v.clip_id),
                               std::string_view(v.submitted_at)}) {
      require_plain_field(s);
    }
    out << v.worker_id << ',' << v.task_id << ',' << v.clip_id << ',' << to_string(v.scale_order) << ',' << v.scores.sig
        << ',' << v.scores.bak << ',' << v.scores.ovrl << ',' << int{v.playback.sig} << ',' << int{v.playback.bak} << ','
        << int{v.playback.ovrl} << ',' << v.submitted_at << '\n';
  }
}

json to_json(const ScaleScores& s) { return json{{"sig", s.sig}, {"bak", s.bak}, {"ovrl", s.ovrl}}; }

ScaleScores scale_scores_from_json(const json& j) {
  if (j.is_number_integer()) return ScaleScores::uniform(j.get<int>());
  return {j.at("sig").get<int>(), j.at("bak").get<int>(), j.at("ovrl").get<int>()};
}

json to_json(const campaign::Stimulus& s) {
  json j{{"clip_id", s.clip_id}, {"url", s.url}, {"condition_id", s.condition_id}};
  if (s.expected_answer) j["expected"] = to_json(*s.expected_answer);
  return j;
}

campaign::Stimulus stimulus_from_json(const json& j, campaign::StimulusKind kind) {
  campaign::Stimulus s;
  s.clip_id = text(j, "clip_id");
  s.url = text_or(j, "url", "");
  s.kind = kind;
  switch (kind) {
    case campaign::StimulusKind::Rating: s.condition_id = text(j, "condition_id"); break;
    case campaign::StimulusKind::Trapping:
      s.condition_id = text_or(j, "condition_id", "trapping");
      if (j.contains("demanded_score")) {
        s.expected_answer = ScaleScores::uniform(j.at("demanded_score").get<int>());
      } else if (j.contains("expected")) {
        s.expected_answer = scale_scores_from_json(j.at("expected"));
      }
      break;
    case campaign::StimulusKind::Gold:
      s.condition_id = text_or(j, "condition_id", "gold");
      s.expected_answer = j.contains("expected") ? scale_scores_from_json(j.at("expected")) : ScaleScores::uniform(5);
      break;
  }
  s.validate();
  return s;
}

campaign::CampaignConfig campaign_config_from_json(const json& j) {
  campaign::CampaignConfig c;
  c.campaign_id = text_or(j, "campaign_id", c.campaign_id);
  c.task_size = j.value("task_size", c.task_size);
  c.target_votes_per_clip = j.value("target_votes_per_clip", c.target_votes_per_clip);
  c.seed = j.value("seed", c.seed);
  for (const auto& s : j.value("trapping_pool", json::array())) {
    c.trapping_pool.push_back(stimulus_from_json(s, campaign::StimulusKind::Trapping));
  }
  for (const auto& s : j.value("gold_pool", json::array())) {
    c.gold_pool.push_back(stimulus_from_json(s, campaign::StimulusKind::Gold));
  }
  if (j.contains("policy")) {
    const auto& p = j.at("policy");
    c.policy.setup_validity = std::chrono::minutes(p.value("setup_minutes", c.policy.setup_validity.count()));
    c.policy.training_validity = std::chrono::minutes(p.value("training_minutes", c.policy.training_validity.count()));
  }
  return c;
}

json to_json(const campaign::CampaignConfig& c) {
  json trap = json::array(), gold = json::array();
  for (const auto& s : c.trapping_pool) trap.push_back(to_json(s));
  for (const auto& s : c.gold_pool) gold.push_back(to_json(s));
  return json{{"campaign_id", c.campaign_id},
              {"task_size", c.task_size},
              {"target_votes_per_clip", c.target_votes_per_clip},
              {"seed", c.seed},
              {"trapping_pool", trap},
              {"gold_pool", gold},
              {"policy",
               {{"setup_minutes", c.policy.setup_validity.count()},
                {"training_minutes", c.policy.training_validity.count()}}}};
}

json plan_payload_json(std::span<const campaign::TaskAssignment> plan) {
  json tasks = json::array();
  for (const auto& t : plan) {
    json stimuli = json::array();
    for (const auto& s : t.stimuli) stimuli.push_back(json{{"clip_id", s.clip_id}, {"url", s.url}});
    tasks.push_back(json{{"task_id", t.task_id}, {"scale_order_seed", t.scale_order_seed}, {"stimuli", stimuli}});
  }
  return json{{"campaign_id", plan.empty() ? std::string() : plan.front().campaign_id}, {"tasks", tasks}};
}

json to_json(const campaign::WorkerState& s) {
  return json{{"worker_id", s.worker_id},
              {"qualification_passed", s.qualification_passed},
              {"qualification_at", optional_time(s.qualification_at)},
              {"last_setup_pass", optional_time(s.last_setup_pass)},
              {"last_training_pass", optional_time(s.last_training_pass)}};
}

campaign::WorkerState worker_state_from_json(const json& j) {
  campaign::WorkerState s;
  s.worker_id = text(j, "worker_id");
  s.qualification_passed = j.value("qualification_passed", false);
  s.qualification_at = time_or_null(j, "qualification_at");
  s.last_setup_pass = time_or_null(j, "last_setup_pass");
  s.last_training_pass = time_or_null(j, "last_training_pass");
  return s;
}

json to_json(const AnswerKey& key) {
  json tasks = json::object();
  for (const auto& [id, t] : key.tasks) {
    tasks[id] = json{{"trapping", {{"clip_id", t.trapping.clip_id}, {"expected", to_json(t.trapping.expected)}}},
                     {"gold", {{"clip_id", t.gold.clip_id}, {"expected", to_json(t.gold.expected)}}}};
  }
  return json{{"campaign_id", key.campaign_id}, {"tasks", tasks}, {"clip_conditions", key.clip_conditions}};
}

AnswerKey answer_key_from_json(const json& j) {
  AnswerKey key;
  key.campaign_id = text_or(j, "campaign_id", "");
  for (const auto& [id, t] : j.at("tasks").items()) {
    const auto control = [](const json& c) {
      return ControlAnswer{c.at("clip_id").get<std::string>(), scale_scores_from_json(c.at("expected"))};
    };
    key.tasks[id] = TaskKey{id, control(t.at("trapping")), control(t.at("gold"))};
  }
  key.clip_conditions = j.value("clip_conditions", std::map<std::string, std::string>{});
  return key;
}

json to_json(const screening::ScreeningVerdict& v) {
  json reasons = json::array();
  for (auto r : v.reasons) reasons.push_back(std::string(screening::to_string(r)));
  return json{{"task_id", v.task_id}, {"worker_id", v.worker_id}, {"accepted", v.accepted}, {"reasons", reasons}};
}

json verdicts_json(std::span<const screening::ScreeningVerdict> verdicts) {
  json out = json::array();
  for (const auto& v : verdicts) out.push_back(to_json(v));
  return out;
}

std::vector<screening::ScreeningVerdict> verdicts_from_json(const json& j) {
  std::vector<screening::ScreeningVerdict> out;
  for (const auto& v : j) {
    screening::ScreeningVerdict s;
    s.task_id = text(v, "task_id");
    s.worker_id = text(v, "worker_id");
    s.accepted = v.at("accepted").get<bool>();
    for (const auto& r : v.at("reasons")) s.reasons.push_back(screening::parse_reject_reason(r.get<std::string>()));
    if (s.accepted != s.reasons.empty()) throw InputError("verdict for " + s.task_id + " is inconsistent");
    out.push_back(std::move(s));
  }
  return out;
}

std::map<std::string, screening::QualificationResult> qualifications_from_json(const json& j) {
  std::map<std::string, screening::QualificationResult> out;
  for (const auto& q : j) {
    std::string worker = text(q, "worker_id");
    screening::QualificationResult r;
    if (q.contains("triplets")) {
      std::vector<screening::TripletResponse> triplets;
      for (const auto& t : q.at("triplets")) triplets.push_back({t.at(0).get<std::string>(), t.at(1).get<std::string>()});
      std::vector<bool> pairs;
      for (const auto& p : q.at("pairs")) pairs.push_back(p.get<bool>());
      r = screening::qualify(worker, triplets, pairs);
    } else {
      r = screening::qualify(worker, q.at("hearing_correct").get<double>(), q.at("environment_correct").get<double>());
    }
    out[worker] = std::move(r);
  }
  return out;
}

json to_json(const screening::QualificationResult& q) {
  return json{{"worker_id", q.worker_id},
              {"hearing_correct", q.hearing_correct},
              {"environment_correct", q.environment_correct},
              {"passed", q.passed}};
}

json to_json(const stats::ConditionScore& s) {
  json j{{"condition_id", s.condition_id}};
  for (Scale sc : kScales) j[std::string(to_string(sc))] = scale_json(s[sc]);
  return j;
}

json scores_json(std::span<const stats::ConditionScore> scores) {
  json out = json::array();
  for (const auto& s : scores) out.push_back(to_json(s));
  return out;
}

std::vector<stats::ConditionScore> scores_from_json(const json& j) {
  std::vector<stats::ConditionScore> out;
  for (const auto& c : j) {
    stats::ConditionScore s;
    s.condition_id = text(c, "condition_id");
    for (Scale sc : kScales) {
      const auto& x = c.at(std::string(to_string(sc)));
      auto& stat = s[sc];
      stat.mos = x.at("mos").get<double>();
      stat.ci95 = number_or_null(x, "ci95");
      stat.n = x.value("n", std::size_t{0});
      stat.dmos = number_or_null(x, "dmos");
      stat.rank_mean = number_or_null(x, "rank_mean");
    }
    out.push_back(std::move(s));
  }
  return out;
}

void write_scores_csv(std::ostream& out, std::span<const stats::ConditionScore> scores) {
  out << kScoresCsvHeader << '\n';
  const auto dmos = [](const stats::ScaleStatistic& s) { return s.dmos ? fixed2(*s.dmos) : std::string(); };
  for (const auto& c : scores) {
    require_plain_field(c.condition_id);
    out << c.condition_id << ',' << fixed2(c[Scale::Bak].mos) << ',' << fixed2(c[Scale::Sig].mos) << ','
        << fixed2(c[Scale::Ovrl].mos) << ',' << dmos(c[Scale::Bak]) << ',' << dmos(c[Scale::Sig]) << ','
        << dmos(c[Scale::Ovrl]) << '\n';
  }
}

json to_json(const stats::RegressionFit& fit) {
  return json{{"intercept", fit.intercept},     {"coef_sig", fit.coef_sig},       {"coef_bak", fit.coef_bak},
              {"adjusted_r2", fit.adjusted_r2}, {"pearson_rho", fit.pearson_rho}, {"n", fit.n}};
}

json to_json(const stats::ComparisonReport& report) {
  json j{{"conditions", report.conditions}};
  for (Scale s : kScales) j[std::string(to_string(s))] = comparison_json(report[s]);
  return j;
}

json to_json(const refcond::ManifestEntry& e) {
  json j{{"speech_path", e.speech_path.string()},
         {"noise_path", e.noise_path.string()},
         {"condition_id", e.condition_id},
         {"output_path", e.output_path.string()}};
  if (e.post_mix_scale) {
    j["applied_noise_gain_db"] = optional_number(e.applied_noise_gain_db);
    j["post_mix_scale"] = *e.post_mix_scale;
  }
  return j;
}

std::vector<refcond::ManifestEntry> manifest_from_json(const json& j) {
  if (!j.is_array()) throw InputError("manifest must be a JSON list");
  std::vector<refcond::ManifestEntry> out;
  for (const auto& e : j) {
    refcond::ManifestEntry m;
    m.speech_path = text(e, "speech_path");
    m.noise_path = text(e, "noise_path");
    m.condition_id = text(e, "condition_id");
    m.output_path = text(e, "output_path");
    out.push_back(std::move(m));
  }
  return out;
}

json manifest_json(std::span<const refcond::ManifestEntry> entries) {
  json out = json::array();
  for (const auto& e : entries) out.push_back(to_json(e));
  return out;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw InputError("cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace sqeval::io
