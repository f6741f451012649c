#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "dqa/infer.hpp"
#include "dqa/io.hpp"
#include "dqa/simulate.hpp"

using namespace dqa;

namespace {

SourceCampaigns parse(const std::string& text) {
  std::istringstream in(text);
  return parse_campaigns(in);
}

InputError input_error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const InputError& e) {
    return e;
  }
  FAIL("expected an InputError");
  return InputError(ErrorCode::ParseError, 0, "", "");
}

const std::string kGood =
    "campaign_id,source_id,population,d_plus,d_minus,g_plus,g_minus\n"
    "c1,s1,100,40,30,50,30\n"
    "# comment\n"
    "\n"
    "c2,s1,100,20,50,35,45\n"
    "c3,s1,100,30,20,40,40\n"
    "c1,s2,100,10,10,50,30\n";

}  // namespace

TEST_CASE("campaign file parsing") {
  const auto m = parse(kGood);
  REQUIRE(m.size() == 2);
  REQUIRE(m.at("s1").size() == 3);
  const auto& c = m.at("s1")[0];
  CHECK(c.campaign_id == "c1");
  CHECK(c.population == 100.0);
  CHECK(c.source == Eigen::Vector3d(40, 30, 30));
  CHECK(c.truth == Eigen::Vector3d(50, 30, 20));
  CHECK(m.at("s2")[0].source(2) == 80.0);
  CHECK(parse("").empty());
  CHECK(parse(std::string(kCampaignHeader) + "\n").empty());
}

TEST_CASE("campaign file errors carry line and field") {
  auto e = input_error_of(std::string(kCampaignHeader) + "\nc1,s1,100,40,30,50,30\nc2,s1,100,60,50,10,10\n");
  CHECK(e.code() == ErrorCode::ValidationError);
  CHECK(e.line() == 3);

  e = input_error_of(std::string(kCampaignHeader) + "\nc1,s1,100,forty,30,50,30\n");
  CHECK(e.code() == ErrorCode::ParseError);
  CHECK(e.line() == 2);
  CHECK(e.field() == "d_plus");

  e = input_error_of(std::string(kCampaignHeader) + "\nc1,s1,100,40,30,50\n");
  CHECK(e.code() == ErrorCode::ParseError);

  e = input_error_of("campaign,source,population,d_plus,d_minus,g_plus,g_minus\n");
  CHECK(e.code() == ErrorCode::ParseError);
  CHECK(e.line() == 1);

  e = input_error_of(std::string(kCampaignHeader) + "\nc1,s1,100,-1,30,50,30\n");
  CHECK(e.code() == ErrorCode::ValidationError);

  // Same campaign, different truth across sources.
  e = input_error_of(std::string(kCampaignHeader) + "\nc1,s1,100,40,30,50,30\nc1,s2,100,40,30,49,30\n");
  CHECK(e.code() == ErrorCode::ValidationError);
  CHECK(e.line() == 3);
  CHECK(is_input_error(e.code()));
}

TEST_CASE("campaign files round-trip through write_campaigns") {
  const auto m = parse(kGood);
  std::ostringstream out;
  write_campaigns(out, m);
  CHECK(parse(out.str()) == m);
}

TEST_CASE("json round-trip of results") {
  const auto pv = low_quality_profile();
  CHECK(predictive_values_from_json(to_json(pv)).p == pv.p);

  const auto report = assess_source(
      "s1", parse(kGood).at("s1"), 1.0, 0.05, true);
  const auto back = quality_report_from_json(nlohmann::json::parse(to_json(report).dump()));
  CHECK(back.source_id == report.source_id);
  CHECK(back.n_campaigns == report.n_campaigns);
  CHECK(back.rank == report.rank);
  CHECK(back.unique == report.unique);
  CHECK(back.skipped_campaigns == report.skipped_campaigns);
  CHECK(std::abs(back.mean_relative_err - report.mean_relative_err) <= 1e-12);
  REQUIRE(back.inferred.has_value());
  CHECK((back.inferred->p - report.inferred->p).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(back.ci_half_widths.has_value() == report.ci_half_widths.has_value());

  RankEntry entry{"s9", {0.1, 0.25}, 0.175, 1};
  const auto e2 = rank_entry_from_json(nlohmann::json::parse(to_json(entry).dump()));
  CHECK(e2.source_id == "s9");
  CHECK(e2.per_campaign_err == entry.per_campaign_err);
  CHECK(e2.mean_err == entry.mean_err);
  CHECK(e2.skipped_campaigns == entry.skipped_campaigns);

  const auto plan = plan_sample_size(2);
  const auto p2 = sample_size_plan_from_json(nlohmann::json::parse(to_json(plan).dump()));
  CHECK(p2.required_impressions == 1051);
  CHECK(p2.categories == 2);
  CHECK(p2.power == plan.power);
}

TEST_CASE("scenario files") {
  const auto s = parse_scenario(R"(
seed: 42
trials: 7
xi: 0.5
split: {fixed_per_tag: 10, uniform_remainder: 20}
campaign_counts: [3, 5]
zeta_grid: [0.0, 0.1]
noise_campaigns: 4
profiles:
  - name: P
    alpha: [0.8, 0.1, 0.1]
    beta: [0.1, 0.8, 0.1]
    gamma: [0.3, 0.3, 0.4]
)");
  CHECK(s.seed == 42);
  CHECK(s.trials == 7);
  CHECK(s.xi == 0.5);
  CHECK(s.split.total() == 50);
  CHECK(s.campaign_counts == std::vector<int>{3, 5});
  CHECK(s.zeta_grid == std::vector<double>{0.0, 0.1});
  CHECK(s.noise_campaigns == 4);
  REQUIRE(s.profiles.size() == 1);
  CHECK(s.profiles[0].values.p(2, 2) == 0.4);

  CHECK_THROWS_AS(parse_scenario("trials: 3\n"), Error);
  CHECK_THROWS_AS(parse_scenario("seed: 1\nprofiles:\n  - name: bad\n    alpha: [0.9, 0.9, 0.1]\n"
                                 "    beta: [0.1, 0.8, 0.1]\n    gamma: [0.3, 0.3, 0.4]\n"),
                  Error);
  CHECK_THROWS_AS(parse_scenario("seed: [1\n"), InputError);
}

TEST_CASE("precision tables and tagged users") {
  std::istringstream table("category,precision\nsports,0.4\nnews,0.9\n");
  const auto t = parse_precision_table(table);
  CHECK(t.at("sports") == 0.4);
  CHECK(t.at("news") == 0.9);
  std::istringstream bad("category,precision\nsports,1.4\n");
  CHECK_THROWS_AS(parse_precision_table(bad), Error);

  std::istringstream users("user_id,tags\nu1,sports;news\nu2,\nu3,news\n");
  const auto u = parse_tagged_users(users);
  REQUIRE(u.size() == 3);
  CHECK(u[0] == std::vector<std::string>{"sports", "news"});
  CHECK(u[1].empty());
}

TEST_CASE("format_number is shortest round-trip") {
  CHECK(format_number(0.345) == "0.345");
  CHECK(format_number(1051) == "1051");
  CHECK(std::stod(format_number(0.1 + 0.2)) == 0.1 + 0.2);
}
