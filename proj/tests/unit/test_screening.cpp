#include <catch_amalgamated.hpp>

#include <algorithm>

#include "screening_properties.hpp"
#include "sqeval/error.hpp"
#include "sqeval/screening.hpp"

using namespace sqeval;
using namespace sqeval::screening;

namespace {

TaskKey task_key(const std::string& task_id, int demanded) {
  return {task_id, {"trap", ScaleScores::uniform(demanded)}, {"gold", ScaleScores::uniform(5)}};
}

Vote vote(const std::string& worker, const std::string& task, const std::string& clip, ScaleScores s) {
  return {worker, task, clip, ScaleOrder::SigFirst, s, {true, true, true}, "2021-03-01T10:00:00Z"};
}

std::vector<Vote> clean_submission(const std::string& worker, const std::string& task, int demanded) {
  return {vote(worker, task, task + "_a", {3, 4, 3}), vote(worker, task, "trap", ScaleScores::uniform(demanded)),
          vote(worker, task, task + "_b", {2, 2, 2}), vote(worker, task, "gold", {5, 5, 5})};
}

const QualificationResult kQualified{"w", 1.0, 1.0, true};

}  // namespace

TEST_CASE("digit-triplet scoring", "[screening][qualification]") {
  const std::vector<TripletResponse> perfect{{"123", "123"}, {"905", "905"}};
  CHECK(score_digit_triplet(perfect) == 1.0);
  const std::vector<TripletResponse> half{{"123", "124"}, {"905", "905"}};
  CHECK(score_digit_triplet(half) == 0.5);
  const std::vector<TripletResponse> swapped{{"123", "132"}};
  CHECK(score_digit_triplet(swapped) == 0.0);

  std::vector<TripletResponse> ten;
  for (int i = 0; i < 10; ++i) ten.push_back({"4" + std::to_string(10 + i), i < 8 ? "4" + std::to_string(10 + i) : "000"});
  CHECK(score_digit_triplet(ten) == Catch::Approx(0.8));
  CHECK(qualify("w", ten, {true, true, true, true, false}).passed);

  CHECK_THROWS_AS(score_digit_triplet(std::vector<TripletResponse>{}), InputError);
  CHECK_THROWS_AS(score_digit_triplet(std::vector<TripletResponse>{{"12", "12"}}), InputError);
  CHECK_THROWS_AS(score_digit_triplet(std::vector<TripletResponse>{{"123", "12a"}}), InputError);
}

TEST_CASE("qualification thresholds", "[screening][qualification]") {
  CHECK(qualify("w", 0.8, 0.8).passed);
  CHECK(qualify("w", 4.0 / 5.0, 4.0 / 5.0).passed);
  CHECK_FALSE(qualify("w", 0.7, 1.0).passed);
  CHECK_FALSE(qualify("w", 1.0, 3.0 / 5.0).passed);
  CHECK_FALSE(qualify("w", std::vector<TripletResponse>{{"111", "111"}}, {true, true, true, false, false}).passed);
  CHECK_THROWS_AS(qualify("w", 1.2, 1.0), InputError);
  CHECK_THROWS_AS(qualify("w", std::vector<TripletResponse>{{"111", "111"}}, {}), InputError);
}

TEST_CASE("screen_task rule table", "[screening][task]") {
  const auto key = task_key("t1", 3);
  auto votes = clean_submission("w", "t1", 3);

  SECTION("no rule fires") {
    const auto v = screen_task(votes, key, &kQualified);
    CHECK(v.accepted);
    CHECK(v.reasons.empty());
    CHECK(v.worker_id == "w");
  }
  SECTION("trapping must match exactly on every scale") {
    votes[1].scores = {3, 3, 4};
    const auto v = screen_task(votes, key, &kQualified);
    CHECK_FALSE(v.accepted);
    CHECK(v.reasons == std::vector{RejectReason::TrappingFailed});
  }
  SECTION("gold off by one is tolerated, off by two is not") {
    votes[3].scores = {4, 4, 4};
    CHECK(screen_task(votes, key, &kQualified).accepted);
    votes[3].scores = {5, 3, 5};
    CHECK(screen_task(votes, key, &kQualified).reasons == std::vector{RejectReason::GoldOutOfTolerance});
  }
  SECTION("missing controls reject with their own reasons") {
    votes.erase(votes.begin() + 3);
    votes.erase(votes.begin() + 1);
    CHECK(screen_task(votes, key, &kQualified).reasons ==
          std::vector{RejectReason::TrappingFailed, RejectReason::GoldOutOfTolerance});
  }
  SECTION("any incomplete playback rejects") {
    votes[2].playback.ovrl = false;
    CHECK(screen_task(votes, key, &kQualified).reasons == std::vector{RejectReason::PlaybackIncomplete});
  }
  SECTION("unqualified or unknown workers are rejected") {
    const QualificationResult failed{"w", 0.5, 1.0, false};
    CHECK(screen_task(votes, key, &failed).reasons == std::vector{RejectReason::UnqualifiedWorker});
    CHECK(screen_task(votes, key, nullptr).reasons == std::vector{RejectReason::UnqualifiedWorker});
  }
  SECTION("votes from another task or worker are a caller error") {
    votes[0].task_id = "t2";
    CHECK_THROWS_AS(screen_task(votes, key, &kQualified), InputError);
    votes[0].task_id = "t1";
    votes[0].worker_id = "other";
    CHECK_THROWS_AS(screen_task(votes, key, &kQualified), InputError);
  }
}

TEST_CASE("reason names round-trip", "[screening]") {
  for (auto r : {RejectReason::TrappingFailed, RejectReason::GoldOutOfTolerance, RejectReason::PlaybackIncomplete,
                 RejectReason::UnqualifiedWorker}) {
    CHECK(parse_reject_reason(to_string(r)) == r);
  }
  CHECK(to_string(RejectReason::GoldOutOfTolerance) == "gold_out_of_tolerance");
  CHECK_THROWS_AS(parse_reject_reason("bored"), InputError);
}

TEST_CASE("filter_reliable on a three-task fixture", "[screening][filter]") {
  AnswerKey key;
  for (const auto* id : {"t1", "t2", "t3"}) {
    key.tasks[id] = task_key(id, 2);
    key.clip_conditions[std::string(id) + "_a"] = "c1";
    key.clip_conditions[std::string(id) + "_b"] = "c2";
  }
  std::vector<Vote> votes;
  for (const auto* id : {"t1", "t2", "t3"}) {
    auto s = clean_submission("w", id, 2);
    votes.insert(votes.end(), s.begin(), s.end());
  }
  const std::map<std::string, QualificationResult> quals{{"w", kQualified}};

  SECTION("all accepted leaves only rating votes") {
    const auto verdicts = screen_all(votes, key, quals);
    const auto kept = filter_reliable(votes, verdicts, key);
    std::vector<std::string> ids;
    for (const auto& v : kept) ids.push_back(v.clip_id);
    CHECK(ids == std::vector<std::string>{"t1_a", "t1_b", "t2_a", "t2_b", "t3_a", "t3_b"});
  }
  SECTION("one rejected task drops exactly its two ratings") {
    votes[5].scores = {2, 2, 3};  // t2 trapping answered wrong
    const auto verdicts = screen_all(votes, key, quals);
    REQUIRE(verdicts.size() == 3);
    CHECK(verdicts[0].accepted);
    CHECK_FALSE(verdicts[1].accepted);
    CHECK(verdicts[2].accepted);
    const auto kept = filter_reliable(votes, verdicts, key);
    std::vector<std::string> ids;
    for (const auto& v : kept) ids.push_back(v.clip_id);
    CHECK(ids == std::vector<std::string>{"t1_a", "t1_b", "t3_a", "t3_b"});
  }
  SECTION("all rejected leaves nothing") {
    const auto verdicts = screen_all(votes, key, {});
    CHECK(filter_reliable(votes, verdicts, key).empty());
  }
  SECTION("a vote without a verdict is an error") {
    auto verdicts = screen_all(votes, key, quals);
    verdicts.pop_back();
    CHECK_THROWS_AS(filter_reliable(votes, verdicts, key), InputError);
  }
  SECTION("screen_all validates scores and task ids") {
    votes[0].scores.sig = 6;
    CHECK_THROWS_AS(screen_all(votes, key, quals), InputError);
    votes[0].scores.sig = 3;
    votes[0].task_id = "t9";
    CHECK_THROWS_AS(screen_all(votes, key, quals), InputError);
  }
  SECTION("two workers on one task are judged separately") {
    auto other = clean_submission("v", "t1", 2);
    other[3].scores = {1, 1, 1};
    votes.insert(votes.end(), other.begin(), other.end());
    auto q = quals;
    q["v"] = {"v", 1.0, 1.0, true};
    const auto verdicts = screen_all(votes, key, q);
    REQUIRE(verdicts.size() == 4);
    CHECK(verdicts[0].task_id == "t1");
    CHECK(verdicts[0].worker_id == "v");
    CHECK_FALSE(verdicts[0].accepted);
    CHECK(verdicts[1].accepted);
    CHECK(filter_reliable(votes, verdicts, key).size() == 6);
  }
}

TEST_CASE("screening properties hold on random fixtures", "[screening][property]") {
  std::size_t rejected = 0;
  std::size_t accepted = 0;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const auto fixture = testing::random_screening_fixture(seed);
    const auto problems = testing::screening_violations(fixture, seed + 1);
    INFO("seed " << seed);
    for (const auto& p : problems) FAIL_CHECK(p);
    for (const auto& v : screen_all(fixture.votes, fixture.key, fixture.qualifications)) (v.accepted ? accepted : rejected)++;
  }
  // The generator must exercise both outcomes.
  CHECK(accepted > 50);
  CHECK(rejected > 50);
}
