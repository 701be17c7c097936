#include "sqeval/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "sqeval/campaign.hpp"
#include "sqeval/error.hpp"
#include "sqeval/logging.hpp"
#include "sqeval/refcond.hpp"
#include "sqeval/screening.hpp"
#include "sqeval/serialization.hpp"
#include "sqeval/stats.hpp"

namespace sqeval::cli {
namespace {

namespace fs = std::filesystem;
using io::json;

struct Options {
  bool json_output = false;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> task_size;
  std::optional<std::size_t> target_votes;
  std::optional<std::string> baseline;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());

  std::string manifest;
  std::string config;
  std::string clips;
  std::string votes;
  std::string key;
  std::string qualifications;
  std::string scores;
  std::string scores_b;
};

void require_file(const std::string& path, std::string_view role) {
  if (!fs::is_regular_file(path)) throw InputError(std::string(role) + " not found: " + path);
}

fs::path prepare_out_dir(const std::string& dir) {
  if (dir.empty()) throw InputError("--out is required");
  fs::create_directories(dir);
  return dir;
}

std::vector<screening::Vote> read_votes(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  return io::read_votes_csv(in);
}

std::string fixed(double v, int digits = 2) {
  if (!std::isfinite(v)) return "nan";
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << (std::abs(v) < 0.5 * std::pow(10.0, -digits) ? 0.0 : v);
  return os.str();
}

std::string fixed(const std::optional<double>& v, int digits = 2) { return v ? fixed(*v, digits) : "-"; }

int gen_refcond(const Options& o, std::ostream& out) {
  require_file(o.manifest, "manifest");
  const fs::path dir = prepare_out_dir(o.out_dir);
  auto entries = io::manifest_from_json(io::read_json_file(o.manifest));
  refcond::run_manifest(entries, dir, o.threads);
  const json augmented = io::manifest_json(entries);
  io::write_json_file((dir / "manifest.json").string(), augmented);

  if (o.json_output) {
    out << augmented.dump(2) << '\n';
  } else {
    out << std::left << std::setw(6) << "cond" << std::setw(14) << "noise_gain_db" << std::setw(10) << "scale"
        << "output\n";
    for (const auto& e : entries) {
      out << std::left << std::setw(6) << e.condition_id << std::setw(14) << fixed(e.applied_noise_gain_db)
          << std::setw(10) << fixed(e.post_mix_scale, 4) << e.output_path.string() << '\n';
    }
  }
  return 0;
}

int create_campaign(const Options& o, std::ostream& out) {
  require_file(o.config, "campaign config");
  require_file(o.clips, "clip list");
  const fs::path dir = prepare_out_dir(o.out_dir);

  auto config = io::campaign_config_from_json(io::read_json_file(o.config));
  if (o.seed) config.seed = *o.seed;
  if (o.task_size) config.task_size = *o.task_size;
  if (o.target_votes) config.target_votes_per_clip = *o.target_votes;

  std::vector<campaign::Stimulus> clips;
  for (const auto& c : io::read_json_file(o.clips)) {
    clips.push_back(io::stimulus_from_json(c, campaign::StimulusKind::Rating));
  }

  const auto plan = campaign::plan_campaign(clips, config);
  const auto key = campaign::make_answer_key(plan);
  io::write_json_file((dir / "plan.json").string(), io::plan_payload_json(plan));
  io::write_json_file((dir / "answer_key.json").string(), io::to_json(key));

  std::map<std::string, std::size_t> memberships;
  for (const auto& t : plan) {
    for (const auto& s : t.stimuli) {
      if (s.kind == campaign::StimulusKind::Rating) ++memberships[s.clip_id];
    }
  }
  std::size_t min_votes = SIZE_MAX, max_votes = 0;
  for (const auto& [_, n] : memberships) {
    min_votes = std::min(min_votes, n);
    max_votes = std::max(max_votes, n);
  }

  const json summary{{"campaign_id", config.campaign_id}, {"tasks", plan.size()},        {"clips", clips.size()},
                     {"task_size", config.task_size},     {"min_votes_per_clip", min_votes}, {"max_votes_per_clip", max_votes}};
  if (o.json_output) {
    out << summary.dump(2) << '\n';
  } else {
    out << "campaign " << config.campaign_id << ": " << plan.size() << " tasks for " << clips.size()
        << " clips, votes per clip " << min_votes << ".." << max_votes << '\n';
  }
  return 0;
}

int screen(const Options& o, std::ostream& out) {
  require_file(o.votes, "votes CSV");
  require_file(o.key, "answer key");
  require_file(o.qualifications, "qualifications");
  const fs::path dir = prepare_out_dir(o.out_dir);

  const auto votes = read_votes(o.votes);
  const auto key = io::answer_key_from_json(io::read_json_file(o.key));
  const auto quals = io::qualifications_from_json(io::read_json_file(o.qualifications));

  const auto verdicts = screening::screen_all(votes, key, quals);
  const auto reliable = screening::filter_reliable(votes, verdicts, key);

  io::write_json_file((dir / "verdicts.json").string(), io::verdicts_json(verdicts));
  {
    std::ofstream csv(dir / "reliable_votes.csv", std::ios::trunc);
    if (!csv) throw InputError("cannot write " + (dir / "reliable_votes.csv").string());
    io::write_votes_csv(csv, reliable);
  }

  const auto accepted = std::count_if(verdicts.begin(), verdicts.end(), [](const auto& v) { return v.accepted; });
  std::map<std::string, std::size_t> reasons;
  for (const auto& v : verdicts) {
    for (auto r : v.reasons) ++reasons[std::string(screening::to_string(r))];
  }
  const json summary{{"submissions", verdicts.size()},
                     {"accepted", accepted},
                     {"rejected", verdicts.size() - static_cast<std::size_t>(accepted)},
                     {"reliable_votes", reliable.size()},
                     {"reasons", reasons}};
  if (o.json_output) {
    out << summary.dump(2) << '\n';
  } else {
    out << "submissions " << verdicts.size() << ", accepted " << accepted << ", reliable votes " << reliable.size()
        << '\n';
    for (const auto& [r, n] : reasons) out << "  " << r << ": " << n << '\n';
  }
  return 0;
}

void print_scores_table(std::ostream& out, std::span<const stats::ConditionScore> scores) {
  out << std::left << std::setw(12) << "condition" << std::right;
  for (const char* h : {"BAK", "SIG", "OVRL", "dBAK", "dSIG", "dOVRL", "CI95", "N"}) out << std::setw(8) << h;
  out << '\n';
  for (const auto& c : scores) {
    out << std::left << std::setw(12) << c.condition_id << std::right;
    for (Scale s : {Scale::Bak, Scale::Sig, Scale::Ovrl}) out << std::setw(8) << fixed(c[s].mos);
    for (Scale s : {Scale::Bak, Scale::Sig, Scale::Ovrl}) out << std::setw(8) << fixed(c[s].dmos);
    out << std::setw(8) << fixed(c[Scale::Ovrl].ci95) << std::setw(8) << c[Scale::Ovrl].n << '\n';
  }
}

int aggregate(const Options& o, std::ostream& out) {
  require_file(o.votes, "reliable votes CSV");
  require_file(o.key, "answer key");
  std::optional<fs::path> dir;
  if (!o.out_dir.empty()) dir = prepare_out_dir(o.out_dir);

  const auto votes = read_votes(o.votes);
  if (votes.empty()) throw InputError("no reliable votes to aggregate");
  const auto key = io::answer_key_from_json(io::read_json_file(o.key));
  const auto rated = stats::resolve_conditions(votes, key);

  std::vector<std::string> conditions;
  for (const auto& [_, c] : key.clip_conditions) conditions.push_back(c);
  std::sort(conditions.begin(), conditions.end());
  conditions.erase(std::unique(conditions.begin(), conditions.end()), conditions.end());

  std::optional<std::string_view> baseline;
  if (o.baseline) baseline = *o.baseline;
  auto scores = stats::aggregate(rated, baseline, conditions);
  stats::attach_rank_means(scores, stats::rank_transform(rated));

  const json j = io::scores_json(scores);
  if (dir) {
    io::write_json_file((*dir / "scores.json").string(), j);
    std::ofstream csv(*dir / "scores.csv", std::ios::trunc);
    if (!csv) throw InputError("cannot write " + (*dir / "scores.csv").string());
    io::write_scores_csv(csv, scores);
  }
  if (o.json_output) {
    out << j.dump(2) << '\n';
  } else {
    print_scores_table(out, scores);
  }
  return 0;
}

int analyze(const Options& o, std::ostream& out) {
  require_file(o.scores, "scores JSON");
  std::optional<fs::path> dir;
  if (!o.out_dir.empty()) dir = prepare_out_dir(o.out_dir);

  const auto scores = io::scores_from_json(io::read_json_file(o.scores));
  const auto fit = stats::fit_ovrl_regression(scores);

  json rows = json::array();
  for (const auto& c : scores) {
    const double predicted = fit.intercept + fit.coef_sig * c[Scale::Sig].mos + fit.coef_bak * c[Scale::Bak].mos;
    rows.push_back(json{{"condition_id", c.condition_id},
                        {"sig_mos", c[Scale::Sig].mos},
                        {"bak_mos", c[Scale::Bak].mos},
                        {"ovrl_mos", c[Scale::Ovrl].mos},
                        {"ovrl_predicted", predicted},
                        {"residual", c[Scale::Ovrl].mos - predicted}});
  }
  const json result{{"fit", io::to_json(fit)}, {"predictions", rows}};
  if (dir) io::write_json_file((*dir / "regression.json").string(), result);

  if (o.json_output) {
    out << result.dump(2) << '\n';
  } else {
    out << "OVRL = " << fixed(fit.intercept, 3) << " + " << fixed(fit.coef_sig, 3) << " SIG + " << fixed(fit.coef_bak, 3)
        << " BAK   (adjusted R2 " << fixed(fit.adjusted_r2) << ", rho " << fixed(fit.pearson_rho) << ", n " << fit.n
        << ")\n";
    out << std::left << std::setw(12) << "condition" << std::right << std::setw(8) << "SIG" << std::setw(8) << "BAK"
        << std::setw(8) << "OVRL" << std::setw(8) << "pred" << std::setw(8) << "resid" << '\n';
    for (const auto& r : rows) {
      out << std::left << std::setw(12) << r["condition_id"].get<std::string>() << std::right;
      for (const char* f : {"sig_mos", "bak_mos", "ovrl_mos", "ovrl_predicted", "residual"}) {
        out << std::setw(8) << fixed(r[f].get<double>());
      }
      out << '\n';
    }
  }
  return 0;
}

int compare_runs(const Options& o, std::ostream& out) {
  require_file(o.scores, "scores JSON (run A)");
  require_file(o.scores_b, "scores JSON (run B)");
  std::optional<fs::path> dir;
  if (!o.out_dir.empty()) dir = prepare_out_dir(o.out_dir);

  const auto a = io::scores_from_json(io::read_json_file(o.scores));
  const auto b = io::scores_from_json(io::read_json_file(o.scores_b));
  const auto report = stats::compare_runs(a, b);
  const json j = io::to_json(report);
  if (dir) io::write_json_file((*dir / "comparison.json").string(), j);

  if (o.json_output) {
    out << j.dump(2) << '\n';
  } else {
    out << std::left << std::setw(6) << "scale" << std::right;
    for (const char* h : {"PCC", "SRCC", "SRCC-rt", "RMSE", "CI-A", "CI-B"}) out << std::setw(9) << h;
    out << '\n';
    for (Scale s : {Scale::Ovrl, Scale::Bak, Scale::Sig}) {
      const auto& c = report[s];
      out << std::left << std::setw(6) << to_string(s) << std::right << std::setw(9) << fixed(c.pcc, 3) << std::setw(9)
          << fixed(c.srcc, 3) << std::setw(9) << fixed(c.srcc_rank_transformed, 3) << std::setw(9) << fixed(c.rmse, 3)
          << std::setw(9) << fixed(c.average_ci_a) << std::setw(9) << fixed(c.average_ci_b) << '\n';
    }
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Crowdsourced P.835 evaluation toolkit: reference conditions, campaigns, screening, statistics", "sqeval"};
  app.require_subcommand(1);

  auto add_json = [&](CLI::App* sub) { sub->add_flag("--json", o.json_output, "Machine-readable JSON on stdout"); };

  auto* gen = app.add_subcommand("gen-refcond", "Synthesize reference-condition WAVs from a batch manifest");
  gen->add_option("manifest", o.manifest, "Manifest JSON")->required();
  gen->add_option("--out", o.out_dir, "Output directory")->required();
  gen->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
  add_json(gen);

  auto* create = app.add_subcommand("create-campaign", "Plan rating tasks and write the answer key");
  create->add_option("config", o.config, "Campaign config JSON")->required();
  create->add_option("clips", o.clips, "Rating clip list JSON")->required();
  create->add_option("--out", o.out_dir, "Output directory")->required();
  create->add_option("--seed", o.seed, "Planner seed (overrides config)");
  create->add_option("--task-size", o.task_size, "Rating stimuli per task (default 10)");
  create->add_option("--target-votes", o.target_votes, "Minimum tasks per clip");
  add_json(create);

  auto* scr = app.add_subcommand("screen", "Screen submitted votes; write verdicts and reliable votes");
  scr->add_option("votes", o.votes, "Votes CSV")->required();
  scr->add_option("answer_key", o.key, "Answer key JSON")->required();
  scr->add_option("qualifications", o.qualifications, "Qualification results JSON")->required();
  scr->add_option("--out", o.out_dir, "Output directory")->required();
  add_json(scr);

  auto* agg = app.add_subcommand("aggregate", "Per-condition MOS, CI95 and DMOS");
  agg->add_option("votes", o.votes, "Reliable votes CSV")->required();
  agg->add_option("--key", o.key, "Answer key JSON (clip -> condition)")->required();
  agg->add_option("--baseline", o.baseline, "Baseline condition for DMOS");
  agg->add_option("--out", o.out_dir, "Output directory for scores.json / scores.csv");
  add_json(agg);

  auto* ana = app.add_subcommand("analyze", "Fit OVRL ~ SIG + BAK over condition MOS");
  ana->add_option("scores", o.scores, "Scores JSON")->required();
  ana->add_option("--out", o.out_dir, "Output directory for regression.json");
  add_json(ana);

  auto* cmp = app.add_subcommand("compare-runs", "PCC / SRCC / RMSE between two runs");
  cmp->add_option("scores_a", o.scores, "Scores JSON of run A")->required();
  cmp->add_option("scores_b", o.scores_b, "Scores JSON of run B")->required();
  cmp->add_option("--out", o.out_dir, "Output directory for comparison.json");
  add_json(cmp);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (gen->parsed()) return gen_refcond(o, out);
    if (create->parsed()) return create_campaign(o, out);
    if (scr->parsed()) return screen(o, out);
    if (agg->parsed()) return aggregate(o, out);
    if (ana->parsed()) return analyze(o, out);
    if (cmp->parsed()) return compare_runs(o, out);
  } catch (const json::exception& e) {
    err << "sqeval: malformed JSON input: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "sqeval: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace sqeval::cli
